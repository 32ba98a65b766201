//! Connection matrices of Morse decompositions of combinatorial multivector
//! fields on simplicial complexes, and persistence of Morse decompositions
//! under Lyapunov functions.
//!
//! Pipeline: [`complex::SimplicialComplex`] → [`mvf::MultivectorField`] →
//! [`morse::MorseDecomposition`] → [`z2matrix::FilteredMatrix`] →
//! [`reduce::conmat`] → [`reduce::ConnectionMatrix`].

pub mod bench;
pub mod complex;
pub mod discretize;
pub mod error;
pub mod homology;
pub mod io;
pub mod morse;
pub mod mvf;
pub mod persist;
pub mod randgen;
pub mod reduce;
pub mod sweep;
pub mod z2matrix;

pub use complex::{SimplexId, SimplicialComplex, VertexId};
pub use error::{Error, Result};
pub use morse::{FilteredOrder, MorseDecomposition, MorseSetId};
pub use mvf::{MultivectorField, VectorId};
pub use persist::{Bar, Barcode, LyapunovFunction};
pub use reduce::{Algorithm, ConnectionMatrix};
pub use z2matrix::FilteredMatrix;
