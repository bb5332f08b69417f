//! Exact linear algebra over the rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::Rational;

/// Dense matrix stored by rows.
pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (dst, src) in m[i].iter_mut().zip(&pivot_row).take(cols) {
                    *dst -= &f * src;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of `{v : m v = 0}`.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    if a.is_empty() {
        return (0..cols).map(|i| unit(cols, i)).collect();
    }
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// Row-reduced basis of the span of `vectors`.
pub fn span_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut m: Matrix = vectors.to_vec();
    if m.is_empty() {
        return vec![];
    }
    let k = rref(&mut m).len();
    m.truncate(k);
    m.retain(|r| r.len() == dim);
    m
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut m: Matrix = basis.to_vec();
    let r0 = rank(&m);
    m.push(v.to_vec());
    rank(&m) == r0
}

/// Solve `Σ_k x_k columns[k] = target` where vectors are sparse maps; `None` if inconsistent.
pub fn solve_sparse<K: Ord + Clone>(
    columns: &[BTreeMap<K, Rational>],
    target: &BTreeMap<K, Rational>,
) -> Option<Vec<Rational>> {
    let keys: BTreeSet<K> = columns
        .iter()
        .flat_map(|c| c.keys().cloned())
        .chain(target.keys().cloned())
        .collect();
    let n = columns.len();
    let mut m: Matrix = keys
        .iter()
        .map(|k| {
            let mut row: Vec<Rational> = columns
                .iter()
                .map(|c| c.get(k).cloned().unwrap_or_default())
                .collect();
            row.push(target.get(k).cloned().unwrap_or_default());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}
