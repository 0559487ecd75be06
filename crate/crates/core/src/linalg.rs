//! Exact dense linear algebra over `Q(ζ_L)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::Scalar;

/// Rank by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut a: Vec<Vec<Scalar>> = rows.to_vec();
    let r = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = Scalar::one();
    let mut row = 0;
    for c in 0..cols {
        if row == r {
            break;
        }
        let Some(p) = (row..r).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(row, p);
        let piv = a[row][c].clone();
        for i in row + 1..r {
            let f = a[i][c].clone();
            for j in c + 1..cols {
                let v = &(&a[i][j] * &piv) - &(&f * &a[row][j]);
                a[i][j] = v.checked_div(&prev).expect("nonzero pivot");
            }
            a[i][c] = Scalar::zero();
        }
        prev = piv;
        row += 1;
    }
    row
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(a: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][c].inverse().expect("nonzero pivot");
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[row].clone();
        for (i, other) in a.iter_mut().enumerate() {
            if i != row && !other[c].is_zero() {
                let f = other[c].clone();
                for (x, y) in other.iter_mut().zip(&pivot_row) {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

/// Coefficients `x` with `Σ_j x_j · columns[j] = target`, if any.
pub fn solve(columns: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = columns.len();
    let m = target.len();
    let mut aug: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let mut row: Vec<Scalar> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Scalar::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][n].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, if invertible.
pub fn invert(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Scalar::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &(&row[k] * &b[k][j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Vec<Vec<Scalar>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

/// Dense coordinates of sparse vectors over the union of their supports.
pub fn densify<K: Ord + Clone>(vectors: &[&BTreeMap<K, Scalar>]) -> (Vec<K>, Vec<Vec<Scalar>>) {
    let keys: Vec<K> = vectors.iter().flat_map(|v| v.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&K, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let rows = vectors
        .iter()
        .map(|v| {
            let mut row = vec![Scalar::zero(); keys.len()];
            for (k, c) in v.iter() {
                row[index[k]] = c.clone();
            }
            row
        })
        .collect();
    (keys, rows)
}

/// Rank of a family of sparse vectors.
pub fn sparse_rank<K: Ord + Clone>(vectors: &[&BTreeMap<K, Scalar>]) -> usize {
    let (_, rows) = densify(vectors);
    rank(&rows)
}

/// Expresses `target` in terms of `basis`, if it lies in their span.
pub fn sparse_solve<K: Ord + Clone>(basis: &[&BTreeMap<K, Scalar>], target: &BTreeMap<K, Scalar>) -> Option<Vec<Scalar>> {
    let mut all: Vec<&BTreeMap<K, Scalar>> = basis.to_vec();
    all.push(target);
    let (_, mut rows) = densify(&all);
    let t = rows.pop().expect("target row");
    solve(&rows, &t)
}
