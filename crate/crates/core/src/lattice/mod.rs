//! Exact rational matrices preserving a diagonal quadratic form.

pub mod linalg;
mod matrix;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub use matrix::ExactMatrix;

use crate::qforms::DiagonalForm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("not a square matrix: {0}")]
    NotSquare(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

/// A_q, the diagonal Gram matrix of q.
pub fn form_matrix(q: &DiagonalForm) -> ExactMatrix {
    ExactMatrix::diag(&to_rational_vec(q.coeffs()))
}

/// q(x) for a rational vector.
pub fn form_value(q: &DiagonalForm, x: &[BigRational]) -> BigRational {
    q.coeffs()
        .iter()
        .zip(x)
        .fold(BigRational::zero(), |s, (a, xi)| {
            s + xi * xi * BigRational::from_integer(a.clone())
        })
}

/// Polar form B(x,y) = q(x+y) - q(x) - q(y) = 2 sum a_i x_i y_i.
pub fn polar(q: &DiagonalForm, x: &[BigRational], y: &[BigRational]) -> BigRational {
    let s = q
        .coeffs()
        .iter()
        .zip(x.iter().zip(y))
        .fold(BigRational::zero(), |s, (a, (xi, yi))| {
            s + xi * yi * BigRational::from_integer(a.clone())
        });
    s * rat(2)
}

fn check_dim(q: &DiagonalForm, n: usize) -> Result<(), LatticeError> {
    if q.rank() != n {
        return Err(LatticeError::Dimension {
            expected: q.rank(),
            got: n,
        });
    }
    Ok(())
}

pub fn preserves_form(g: &ExactMatrix, q: &DiagonalForm) -> Result<bool, LatticeError> {
    check_dim(q, g.dim())?;
    let a = form_matrix(q);
    Ok(&(&g.transpose() * &a) * g == a)
}

/// g (+) [1].
pub fn corner_embed(g: &ExactMatrix) -> ExactMatrix {
    let idx: Vec<usize> = (0..g.dim()).collect();
    embed_at(g, &idx, g.dim() + 1).expect("indices are in range")
}

/// Identity of size `dim` with g placed on the given coordinates.
pub fn embed_at(
    g: &ExactMatrix,
    indices: &[usize],
    dim: usize,
) -> Result<ExactMatrix, LatticeError> {
    if indices.len() != g.dim() {
        return Err(LatticeError::Dimension {
            expected: g.dim(),
            got: indices.len(),
        });
    }
    let mut seen = vec![false; dim];
    for &i in indices {
        if i >= dim || seen[i] {
            return Err(LatticeError::Precondition(format!(
                "bad embedding index {i} for dimension {dim}"
            )));
        }
        seen[i] = true;
    }
    let mut m = ExactMatrix::identity(dim);
    for (r, &ri) in indices.iter().enumerate() {
        for (c, &ci) in indices.iter().enumerate() {
            m.set(ri, ci, g.get(r, c).clone());
        }
    }
    Ok(m)
}

/// x -> x + B(x,u)v - B(x,v)u - q(v)B(x,u)u.
pub fn eichler_transvection(
    q: &DiagonalForm,
    u: &[BigRational],
    v: &[BigRational],
) -> Result<ExactMatrix, LatticeError> {
    let n = q.rank();
    check_dim(q, u.len())?;
    check_dim(q, v.len())?;
    if u.iter().all(Zero::is_zero) {
        return Err(LatticeError::Precondition("u is zero".into()));
    }
    if !form_value(q, u).is_zero() {
        return Err(LatticeError::Precondition("u is not isotropic".into()));
    }
    if !polar(q, u, v).is_zero() {
        return Err(LatticeError::Precondition("B(u,v) is not zero".into()));
    }
    let a: Vec<BigRational> = q
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c * 2))
        .collect();
    let bu: Vec<BigRational> = (0..n).map(|j| &a[j] * &u[j]).collect();
    let bv: Vec<BigRational> = (0..n).map(|j| &a[j] * &v[j]).collect();
    let qv = form_value(q, v);
    let mut m = ExactMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let d = &v[i] * &bu[j] - &u[i] * &bv[j] - &qv * &u[i] * &bu[j];
            if !d.is_zero() {
                let x = m.get(i, j) + d;
                m.set(i, j, x);
            }
        }
    }
    Ok(m)
}

pub fn is_unipotent(g: &ExactMatrix) -> bool {
    let n = g.dim();
    let nil = g.sub(&ExactMatrix::identity(n));
    let mut p = nil.clone();
    for _ in 1..n {
        if p.is_zero() {
            return true;
        }
        p = &p * &nil;
    }
    p.is_zero()
}

pub fn unipotent_log(g: &ExactMatrix) -> Result<ExactMatrix, LatticeError> {
    if !is_unipotent(g) {
        return Err(LatticeError::NotUnipotent);
    }
    let n = g.dim();
    let nil = g.sub(&ExactMatrix::identity(n));
    let mut out = ExactMatrix::zero(n);
    let mut p = nil.clone();
    let mut k = 1i64;
    while !p.is_zero() {
        let c = BigRational::new(
            BigInt::from(if k % 2 == 1 { 1 } else { -1 }),
            BigInt::from(k),
        );
        out = out.add(&p.scale(&c));
        p = &p * &nil;
        k += 1;
    }
    Ok(out)
}

/// exp(N) for nilpotent N.
pub fn exp_nilpotent(nm: &ExactMatrix) -> Result<ExactMatrix, LatticeError> {
    let n = nm.dim();
    let mut out = ExactMatrix::identity(n);
    let mut p = nm.clone();
    let mut fact = BigInt::one();
    let mut k = 1u32;
    while !p.is_zero() {
        if k as usize > n {
            return Err(LatticeError::Precondition("matrix is not nilpotent".into()));
        }
        fact *= k;
        out = out.add(&p.scale(&BigRational::new(BigInt::one(), fact.clone())));
        p = &p * nm;
        k += 1;
    }
    Ok(out)
}

pub fn matrix_power(g: &ExactMatrix, k: i64) -> Result<ExactMatrix, LatticeError> {
    g.pow(k)
}

/// det = 1 and the upper sheet of the hyperboloid is preserved, tested on
/// the basis vector of the negative coordinate.
pub fn is_so_plus(g: &ExactMatrix, q: &DiagonalForm) -> Result<bool, LatticeError> {
    check_dim(q, g.dim())?;
    let neg = q.negative_index().ok_or_else(|| {
        LatticeError::Precondition("form must have exactly one negative coefficient".into())
    })?;
    Ok(g.det().is_one() && g.get(neg, neg).is_positive())
}

/// Parabolic data attached to one cusp.
#[derive(Debug, Clone, Serialize)]
pub struct CuspData {
    pub index: usize,
    #[serde(with = "crate::io::rational_vec_str")]
    pub point: Vec<BigRational>,
    pub generators: Vec<ExactMatrix>,
    #[serde(skip)]
    logs: Vec<ExactMatrix>,
}

impl CuspData {
    /// Checks every invariant and caches the generator logarithms.
    pub fn new(
        q: &DiagonalForm,
        index: usize,
        point: Vec<BigRational>,
        generators: Vec<ExactMatrix>,
    ) -> Result<Self, LatticeError> {
        check_dim(q, point.len())?;
        if point.iter().all(Zero::is_zero) || !form_value(q, &point).is_zero() {
            return Err(LatticeError::Invariant(format!(
                "cusp {index}: point is not isotropic"
            )));
        }
        let mut logs = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            if !preserves_form(g, q)? {
                return Err(LatticeError::Invariant(format!(
                    "cusp {index}: generator {j} does not preserve the form"
                )));
            }
            if g.apply(&point)? != point {
                return Err(LatticeError::Invariant(format!(
                    "cusp {index}: generator {j} does not fix the cusp point"
                )));
            }
            logs.push(unipotent_log(g).map_err(|_| {
                LatticeError::Invariant(format!("cusp {index}: generator {j} is not unipotent"))
            })?);
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if &generators[i] * &generators[j] != &generators[j] * &generators[i] {
                    return Err(LatticeError::Invariant(format!(
                        "cusp {index}: generators {i} and {j} do not commute"
                    )));
                }
            }
        }
        let flat: Vec<Vec<BigRational>> = logs.iter().map(flatten).collect();
        if linalg::rank(&flat, q.rank() * q.rank()) < logs.len() {
            return Err(LatticeError::Invariant(format!(
                "cusp {index}: generator logarithms are linearly dependent"
            )));
        }
        Ok(CuspData {
            index,
            point,
            generators,
            logs,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn logs(&self) -> &[ExactMatrix] {
        &self.logs
    }
}

fn flatten(m: &ExactMatrix) -> Vec<BigRational> {
    (0..m.dim()).flat_map(|i| m.row(i).to_vec()).collect()
}

/// Integer exponents k with prod gen_j^{k_j} = c, if any.
pub fn cusp_membership(c: &ExactMatrix, cusp: &CuspData) -> Result<Option<Vec<i64>>, LatticeError> {
    let n = cusp.point.len();
    if c.dim() != n {
        return Err(LatticeError::Dimension {
            expected: n,
            got: c.dim(),
        });
    }
    if !is_unipotent(c) || c.apply(&cusp.point)? != cusp.point {
        return Ok(None);
    }
    let target = flatten(&unipotent_log(c)?);
    let m = cusp.logs.len();
    if m == 0 {
        return Ok(c.is_identity().then(Vec::new));
    }
    let cols: Vec<Vec<BigRational>> = cusp.logs.iter().map(flatten).collect();
    let rows: Vec<Vec<BigRational>> = (0..n * n)
        .map(|r| cols.iter().map(|col| col[r].clone()).collect())
        .collect();
    let Some(x) = linalg::solve(&rows, &target, m) else {
        return Ok(None);
    };
    let mut ks = Vec::with_capacity(m);
    for xi in &x {
        if !xi.is_integer() {
            return Ok(None);
        }
        match xi.to_integer().to_i64() {
            Some(k) => ks.push(k),
            None => return Ok(None),
        }
    }
    let mut prod = ExactMatrix::identity(n);
    for (g, &k) in cusp.generators.iter().zip(&ks) {
        prod = &prod * &g.pow(k)?;
    }
    Ok((prod == *c).then_some(ks))
}
