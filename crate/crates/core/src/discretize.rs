//! Turning a sampled planar vector field into a multivector field on a
//! triangulated grid.
//!
//! Each grid cell is split along its lower-left to upper-right diagonal.
//! The field is built in four passes: singletons; every vertex joins the
//! coface its sample points into; every interior edge joins the triangle its
//! averaged sample crosses into; the whole outer boundary becomes one vector.

use serde::{Deserialize, Serialize};

use crate::complex::{SimplexId, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::mvf::{Merger, MultivectorField};

pub type Point = (f64, f64);

/// Samples on a rectangular grid, row-major with rows running along `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub vectors: Vec<Point>,
}

impl SampledField {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, vectors: Vec<Point>) -> Result<Self> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err(Error::DegenerateGrid(format!(
                "need at least 2x2 samples, got {}x{}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) || ys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DegenerateGrid(
                "coordinates must be strictly increasing".into(),
            ));
        }
        if vectors.len() != xs.len() * ys.len() {
            return Err(Error::DegenerateGrid(format!(
                "{} vectors for a {}x{} grid",
                vectors.len(),
                xs.len(),
                ys.len()
            )));
        }
        if vectors.iter().any(|v| !v.0.is_finite() || !v.1.is_finite()) {
            return Err(Error::DegenerateGrid("non-finite sample vector".into()));
        }
        Ok(Self { xs, ys, vectors })
    }

    /// Samples `g` on an `nx` by `ny` grid spanning `region = [x0, x1, y0, y1]`.
    pub fn from_fn(
        region: [f64; 4],
        nx: usize,
        ny: usize,
        g: impl Fn(f64, f64) -> Point,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::DegenerateGrid(format!(
                "resolution {nx}x{ny} is below 2x2"
            )));
        }
        let [x0, x1, y0, y1] = region;
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::DegenerateGrid(format!("empty region {region:?}")));
        }
        let axis = |a: f64, b: f64, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()
        };
        let xs = axis(x0, x1, nx);
        let ys = axis(y0, y1, ny);
        let mut vectors = Vec::with_capacity(nx * ny);
        for &y in &ys {
            for &x in &xs {
                vectors.push(g(x, y));
            }
        }
        Self::new(xs, ys, vectors)
    }

    /// `g(x, y) = (x² − y² − 4, 2xy)`: a repeller at (2, 0), an attractor at (−2, 0).
    pub fn builtin_g(region: [f64; 4], nx: usize, ny: usize) -> Result<Self> {
        Self::from_fn(region, nx, ny, g)
    }

    /// Rows `x,y,vx,vy`; an optional header line is skipped. The grid is the
    /// product of the distinct sorted coordinates, and every node needs
    /// exactly one row.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: no + 1,
                    message: format!("expected 4 fields x,y,vx,vy, got {}", fields.len()),
                });
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => rows.push((no + 1, [v[0], v[1], v[2], v[3]])),
                Err(_) if no == 0 && rows.is_empty() => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        line: no + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        let distinct = |idx: usize| {
            let mut v: Vec<f64> = rows.iter().map(|r| r.1[idx]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let xs = distinct(0);
        let ys = distinct(1);
        let mut vectors = vec![None; xs.len() * ys.len()];
        for (line, [x, y, vx, vy]) in &rows {
            let c = xs.binary_search_by(|a| a.total_cmp(x)).unwrap();
            let r = ys.binary_search_by(|a| a.total_cmp(y)).unwrap();
            let slot = &mut vectors[r * xs.len() + c];
            if slot.is_some() {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("duplicate sample at ({x}, {y})"),
                });
            }
            *slot = Some((*vx, *vy));
        }
        if let Some(missing) = vectors.iter().position(Option::is_none) {
            let (r, c) = (missing / xs.len(), missing % xs.len());
            return Err(Error::DegenerateGrid(format!(
                "no sample at ({}, {})",
                xs[c], ys[r]
            )));
        }
        Self::new(xs, ys, vectors.into_iter().map(Option::unwrap).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,vx,vy\n");
        for (r, &y) in self.ys.iter().enumerate() {
            for (c, &x) in self.xs.iter().enumerate() {
                let (vx, vy) = self.vectors[r * self.xs.len() + c];
                out.push_str(&format!("{x},{y},{vx},{vy}\n"));
            }
        }
        out
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    /// Smallest grid spacing, the length scale for tolerances.
    pub fn cell_size(&self) -> f64 {
        let step = |v: &[f64]| {
            v.windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min)
        };
        step(&self.xs).min(step(&self.ys))
    }
}

pub fn g(x: f64, y: f64) -> Point {
    (x * x - y * y - 4.0, 2.0 * x * y)
}

/// Vertex coordinates; vertex `v` of the triangulated grid is simplex `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub points: Vec<Point>,
}

impl Geometry {
    pub fn point(&self, v: VertexId) -> Point {
        self.points[v]
    }
}

/// Vertex `r * nx + c` sits at `(xs[c], ys[r])`; cell `(r, c)` becomes the
/// triangles `{v00, v10, v11}` and `{v00, v01, v11}`.
pub fn triangulate_grid(samples: &SampledField) -> Result<(SimplicialComplex, Geometry)> {
    let (nx, ny) = (samples.nx(), samples.ny());
    if nx < 2 || ny < 2 {
        return Err(Error::DegenerateGrid(format!(
            "{nx}x{ny} grid has no cells"
        )));
    }
    let id = |r: usize, c: usize| r * nx + c;
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for r in 0..ny - 1 {
        for c in 0..nx - 1 {
            let (v00, v10, v01, v11) = (id(r, c), id(r, c + 1), id(r + 1, c), id(r + 1, c + 1));
            triangles.push(vec![v00, v10, v11]);
            triangles.push(vec![v00, v01, v11]);
        }
    }
    let k = SimplicialComplex::build(&triangles)?;
    let mut points = Vec::with_capacity(nx * ny);
    for &y in &samples.ys {
        for &x in &samples.xs {
            points.push((x, y));
        }
    }
    Ok((k, Geometry { points }))
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn cross(a: Point, b: Point) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: Point, b: Point) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn norm(a: Point) -> f64 {
    a.0.hypot(a.1)
}

fn unit(a: Point) -> Point {
    let n = norm(a);
    (a.0 / n, a.1 / n)
}

/// The coface of vertex `v` whose sector contains the ray from `v` along
/// `dir`. A ray within `eps` (as the sine of the angle) of an incident edge
/// picks that edge; `None` for short rays and rays leaving the complex.
pub fn sector_of(
    k: &SimplicialComplex,
    geometry: &Geometry,
    v: SimplexId,
    dir: Point,
    eps: f64,
) -> Option<SimplexId> {
    let length = norm(dir);
    if length.is_nan() || length <= eps {
        return None;
    }
    let d = unit(dir);
    let origin = geometry.point(k.vertices(v)[0]);
    let other_end = |e: SimplexId| -> Point {
        let w = k.vertices(e).iter().copied().find(|&w| w != v).unwrap();
        unit(sub(geometry.point(w), origin))
    };
    for &e in k.cofacets(v) {
        let u = other_end(e);
        if cross(u, d).abs() <= eps && dot(u, d) > 0.0 {
            return Some(e);
        }
    }
    for &e in k.cofacets(v) {
        for &t in k.cofacets(e) {
            // Each triangle is reached through both of its edges at v; test it once.
            let edges: Vec<SimplexId> = k
                .facets(t)
                .iter()
                .copied()
                .filter(|f| k.facets(*f).contains(&v))
                .collect();
            if edges[0] != e {
                continue;
            }
            let (a, b) = (other_end(edges[0]), other_end(edges[1]));
            let span = cross(a, b);
            if span == 0.0 {
                continue;
            }
            let s = span.signum();
            if s * cross(a, d) > 0.0 && s * cross(d, b) > 0.0 {
                return Some(t);
            }
        }
    }
    None
}

/// Edges with exactly one triangle coface, and their endpoints.
pub fn boundary_simplices(k: &SimplicialComplex) -> Vec<SimplexId> {
    let mut out = Vec::new();
    for e in (0..k.len()).filter(|&s| k.dim(s) == 1) {
        if k.cofacets(e).len() == 1 {
            out.push(e);
            out.extend_from_slice(k.facets(e));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn join(
    k: &SimplicialComplex,
    merger: &mut Merger,
    field: &mut MultivectorField,
    a: SimplexId,
    b: SimplexId,
) -> Result<()> {
    let (va, vb) = (field.vector_of(a), field.vector_of(b));
    if va != vb {
        merger.merge(k, field, va, vb)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizeOptions {
    /// Tolerance as a fraction of the smallest grid spacing (for lengths) and
    /// as a plain sine (for angles).
    pub eps: f64,
}

impl Default for DiscretizeOptions {
    fn default() -> Self {
        Self { eps: 1e-9 }
    }
}

pub fn discretize_field(
    k: &SimplicialComplex,
    geometry: &Geometry,
    samples: &SampledField,
    opts: DiscretizeOptions,
) -> Result<MultivectorField> {
    let nv = samples.vectors.len();
    if geometry.points.len() != nv || (0..nv).any(|v| k.dim(v) != 0) {
        return Err(Error::DegenerateGrid(
            "complex does not come from this grid".into(),
        ));
    }
    let length_eps = opts.eps * samples.cell_size();
    let mut field = MultivectorField::singleton(k);
    let mut merger = Merger::new(k);

    for v in 0..nv {
        let dir = samples.vectors[v];
        if norm(dir) <= length_eps {
            continue;
        }
        if let Some(c) = sector_of(k, geometry, v, dir, opts.eps) {
            join(k, &mut merger, &mut field, v, c)?;
        }
    }

    for e in (0..k.len()).filter(|&s| k.dim(s) == 1) {
        let tris = k.cofacets(e);
        if tris.len() != 2 {
            continue;
        }
        let [a, b] = [k.vertices(e)[0], k.vertices(e)[1]];
        let (pa, pb) = (geometry.point(a), geometry.point(b));
        let (sa, sb) = (samples.vectors[a], samples.vectors[b]);
        let avg = ((sa.0 + sb.0) / 2.0, (sa.1 + sb.1) / 2.0);
        let along = unit(sub(pb, pa));
        let normal = (-along.1, along.0);
        let flux = dot(normal, avg);
        if flux.abs() <= length_eps {
            continue;
        }
        for &t in tris {
            let c = k
                .vertices(t)
                .iter()
                .copied()
                .find(|&w| w != a && w != b)
                .unwrap();
            let side = dot(normal, sub(geometry.point(c), pa));
            if side * flux > 0.0 {
                join(k, &mut merger, &mut field, e, t)?;
            }
        }
    }

    let ring = boundary_simplices(k);
    if let Some((&first, rest)) = ring.split_first() {
        for &s in rest {
            join(k, &mut merger, &mut field, first, s)?;
        }
    }
    Ok(field)
}

/// Samples `g` over `region`, triangulates and discretizes.
pub fn discretize_builtin_g(
    region: [f64; 4],
    resolution: usize,
    opts: DiscretizeOptions,
) -> Result<(SimplicialComplex, Geometry, MultivectorField)> {
    let samples = SampledField::builtin_g(region, resolution, resolution)?;
    let (k, geometry) = triangulate_grid(&samples)?;
    let field = discretize_field(&k, &geometry, &samples, opts)?;
    Ok((k, geometry, field))
}
