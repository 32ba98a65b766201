//! JSON forms of the pipeline's inputs and outputs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::morse::{FilteredOrder, MorseDecomposition, MorseSetId};
use crate::mvf::MultivectorField;
use crate::persist::LyapunovFunction;

/// Parses JSON, reporting syntax and shape errors with their line.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// `{"simplices": [[v, ...], ...]}`. On input, maximal simplices suffice.
/// On output, every simplex is listed and its position is its id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub simplices: Vec<Vec<VertexId>>,
}

impl ComplexJson {
    pub fn from_complex(k: &SimplicialComplex) -> Self {
        Self {
            simplices: k.vertex_lists(),
        }
    }

    pub fn build(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::build(&self.simplices)
    }
}

/// `{"vectors": [[simplex-id, ...], ...]}`, optionally with the complex
/// embedded under `"simplices"` in the output form of [`ComplexJson`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub vectors: Vec<Vec<SimplexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<VertexId>>>,
}

impl FieldJson {
    /// Vectors are listed by smallest simplex, so ids are renumbered densely.
    pub fn from_field(field: &MultivectorField, embed: Option<&SimplicialComplex>) -> Self {
        let mut vectors: Vec<Vec<SimplexId>> = field.iter().map(|(_, v)| v.to_vec()).collect();
        vectors.sort_unstable_by_key(|v| v[0]);
        Self {
            vectors,
            simplices: embed.map(SimplicialComplex::vertex_lists),
        }
    }

    pub fn embedded_complex(&self) -> Option<Result<SimplicialComplex>> {
        self.simplices.as_ref().map(|s| SimplicialComplex::build(s))
    }

    /// Validates partition and convexity against `k`.
    pub fn build(&self, k: &SimplicialComplex) -> Result<MultivectorField> {
        MultivectorField::from_vectors(k, self.vectors.clone())
    }
}

/// Same field with vectors renumbered by smallest simplex.
pub fn canonical_field(
    k: &SimplicialComplex,
    field: &MultivectorField,
) -> Result<MultivectorField> {
    FieldJson::from_field(field, None).build(k)
}

/// `{"morse_sets": [...], "poset_edges": [[lower, upper], ...], "linear_ext": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub morse_sets: Vec<Vec<SimplexId>>,
    pub poset_edges: Vec<(MorseSetId, MorseSetId)>,
    pub linear_ext: Vec<MorseSetId>,
}

impl DecompositionJson {
    pub fn from_decomposition(md: &MorseDecomposition) -> Self {
        Self {
            morse_sets: md.sets().to_vec(),
            poset_edges: md.poset_edges(),
            linear_ext: md.linear_ext().to_vec(),
        }
    }

    /// Rebuilds the decomposition, checking that the listed edges are the
    /// ones the field induces.
    pub fn build(
        &self,
        k: &SimplicialComplex,
        field: &MultivectorField,
    ) -> Result<MorseDecomposition> {
        let md = MorseDecomposition::from_sets(k, field, self.morse_sets.clone())?;
        let given: BTreeSet<_> = self.poset_edges.iter().copied().collect();
        let induced: BTreeSet<_> = md.poset_edges().into_iter().collect();
        if given != induced {
            return Err(Error::NotMorseDecomposition(
                "poset edges differ from those induced by the field".into(),
            ));
        }
        md.with_linear_extension(self.linear_ext.clone())
    }
}

/// Filtration choices for `connect`: a linear extension of the poset and,
/// per Morse set, an order of its simplices. Missing parts use the defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_ext: Option<Vec<MorseSetId>>,
    #[serde(default)]
    pub within: BTreeMap<MorseSetId, Vec<SimplexId>>,
}

impl OrderJson {
    pub fn from_order(order: &FilteredOrder) -> Self {
        Self {
            linear_ext: Some(order.linear_ext().to_vec()),
            within: order.within_orders().into_iter().collect(),
        }
    }

    pub fn build(&self, k: &SimplicialComplex, md: &MorseDecomposition) -> Result<FilteredOrder> {
        let ext = self
            .linear_ext
            .clone()
            .unwrap_or_else(|| md.linear_ext().to_vec());
        let within: HashMap<_, _> = self.within.iter().map(|(&p, w)| (p, w.clone())).collect();
        FilteredOrder::new(k, md, &ext, &within)
    }
}

/// A Lyapunov function as a map from Morse set id to value.
pub fn lyapunov_to_json(f: &LyapunovFunction) -> BTreeMap<MorseSetId, f64> {
    f.values.iter().copied().enumerate().collect()
}

pub fn lyapunov_from_json(md: &MorseDecomposition, text: &str) -> Result<LyapunovFunction> {
    let map: HashMap<MorseSetId, f64> = parse(text)?;
    LyapunovFunction::from_map(md, &map)
}
