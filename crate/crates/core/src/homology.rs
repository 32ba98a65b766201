//! ℤ₂ ranks and Betti numbers from sparse column data.

use std::collections::HashMap;

use crate::complex::SimplicialComplex;
use crate::z2matrix::xor_sorted;

/// Rank over ℤ₂ of a matrix given as ascending row lists.
pub fn rank(cols: &[Vec<usize>]) -> usize {
    let mut owner: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut scratch = Vec::new();
    let mut r = 0;
    for col in cols {
        let mut c = col.clone();
        while let Some(&low) = c.last() {
            match owner.get(&low) {
                Some(o) => {
                    xor_sorted(&c, o, &mut scratch);
                    std::mem::swap(&mut c, &mut scratch);
                }
                None => {
                    owner.insert(low, c);
                    r += 1;
                    break;
                }
            }
        }
    }
    r
}

/// Left-to-right reduction of upper-triangular columns in place; returns the
/// final low of every column.
pub fn reduce_lows(cols: &mut [Vec<usize>]) -> Vec<Option<usize>> {
    let n = cols.len();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut scratch = Vec::new();
    for j in 0..n {
        while let Some(&low) = cols[j].last() {
            let Some(&s) = owner.get(&low) else {
                owner.insert(low, j);
                break;
            };
            xor_sorted(&cols[j], &cols[s], &mut scratch);
            std::mem::swap(&mut cols[j], &mut scratch);
        }
    }
    cols.iter().map(|c| c.last().copied()).collect()
}

/// Betti numbers of a chain complex with basis dimensions `dims` and boundary
/// columns `cols` (row indices into the same basis).
pub fn betti_from_boundary(dims: &[usize], cols: &[Vec<usize>]) -> Vec<usize> {
    let top = dims.iter().copied().max().unwrap_or(0);
    let mut count = vec![0usize; top + 1];
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
    for (j, &d) in dims.iter().enumerate() {
        count[d] += 1;
        by_dim[d].push(cols[j].clone());
    }
    // rank of ∂_d : C_d → C_{d-1}
    let ranks: Vec<usize> = by_dim.iter().map(|c| rank(c)).collect();
    (0..=top)
        .map(|d| count[d] - ranks[d] - ranks.get(d + 1).copied().unwrap_or(0))
        .collect()
}

/// Betti numbers of a simplicial complex.
pub fn betti_numbers(k: &SimplicialComplex) -> Vec<usize> {
    let dims: Vec<usize> = (0..k.len()).map(|s| k.dim(s)).collect();
    let cols: Vec<Vec<usize>> = (0..k.len()).map(|s| k.facets(s).to_vec()).collect();
    betti_from_boundary(&dims, &cols)
}

/// Pads or trims trailing zeros so two Betti vectors compare by content.
pub fn trim(mut b: Vec<usize>) -> Vec<usize> {
    while b.len() > 1 && b.last() == Some(&0) {
        b.pop();
    }
    b
}
