//! Gaussian elimination over Q.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Row = Vec<BigRational>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut Vec<Row>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Row], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of {x : A x = 0} where A has the given rows.
pub fn nullspace(rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); ncols];
        v[f] = BigRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -m[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// A particular solution of A x = b (free variables zero), if consistent.
pub fn solve(rows: &[Row], b: &[BigRational], ncols: usize) -> Option<Row> {
    let mut aug: Vec<Row> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][ncols].clone();
    }
    Some(x)
}

/// Basis of the intersection of two subspaces given by spanning rows.
pub fn intersect(a: &[Row], b: &[Row], dim: usize) -> Vec<Row> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // x = sum s_i a_i = sum t_j b_j  <=>  [A^T | -B^T] (s,t) = 0
    let k = a.len() + b.len();
    let rows: Vec<Row> = (0..dim)
        .map(|d| {
            a.iter()
                .map(|v| v[d].clone())
                .chain(b.iter().map(|v| -v[d].clone()))
                .collect()
        })
        .collect();
    let ns = nullspace(&rows, k);
    let mut out: Vec<Row> = ns
        .iter()
        .map(|st| {
            let mut x = vec![BigRational::zero(); dim];
            for (i, v) in a.iter().enumerate() {
                for d in 0..dim {
                    x[d] += &st[i] * &v[d];
                }
            }
            x
        })
        .collect();
    // drop dependent combinations coming from dependent spanning sets
    let mut basis: Vec<Row> = Vec::new();
    for v in out.drain(..) {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if rank(&trial, dim) == trial.len() {
            basis.push(v);
        }
    }
    basis
}
