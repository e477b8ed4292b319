use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{linalg, LatticeError};
use crate::io::{parse_rational, rational_to_string};

/// Square matrix over Q, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    e: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExactMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 {
            return Err(LatticeError::NotSquare("empty matrix".into()));
        }
        let mut e = Vec::with_capacity(n * n);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::NotSquare(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            e.extend(r);
        }
        Ok(ExactMatrix { n, e })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.e[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        ExactMatrix {
            n,
            e: vec![BigRational::zero(); n * n],
        }
    }

    pub fn diag(d: &[BigRational]) -> Self {
        let n = d.len();
        let mut m = Self::zero(n);
        for (i, x) in d.iter().enumerate() {
            m.e[i * n + i] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.e[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.e[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.e.iter().all(|x| x.is_integer())
    }

    pub fn try_mul(&self, other: &ExactMatrix) -> Result<ExactMatrix, LatticeError> {
        if self.n != other.n {
            return Err(LatticeError::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.e[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, x: &[BigRational]) -> Result<Vec<BigRational>, LatticeError> {
        if x.len() != self.n {
            return Err(LatticeError::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(BigRational::zero(), |s, (a, b)| s + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        ExactMatrix {
            n: self.n,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        ExactMatrix {
            n: self.n,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> ExactMatrix {
        ExactMatrix {
            n: self.n,
            e: self.e.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> ExactMatrix {
        let n = self.n;
        let mut t = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.e[j * n + i] = self.e[i * n + j].clone();
            }
        }
        t
    }

    pub fn det(&self) -> BigRational {
        let n = self.n;
        let mut m = self.rows();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= &m[c][c];
            let inv = BigRational::one() / &m[c][c];
            for i in c + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<ExactMatrix, LatticeError> {
        let n = self.n;
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                r
            })
            .collect();
        let piv = linalg::rref(&mut aug, n);
        if piv.len() < n {
            return Err(LatticeError::Singular);
        }
        Self::from_rows(aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Exact power; negative exponents go through the inverse.
    pub fn pow(&self, k: i64) -> Result<ExactMatrix, LatticeError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.n);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Max |entry| as f64, for diagnostics.
    pub fn max_abs_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.e
            .iter()
            .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize)]
struct MatrixOut {
    entries: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    S(String),
    I(i64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixIn {
    Obj { entries: Vec<Vec<Cell>> },
    Bare(Vec<Vec<Cell>>),
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixOut {
            entries: (0..self.n)
                .map(|i| self.row(i).iter().map(rational_to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rows = match MatrixIn::deserialize(d)? {
            MatrixIn::Obj { entries } => entries,
            MatrixIn::Bare(r) => r,
        };
        let rows: Result<Vec<Vec<BigRational>>, String> = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| match c {
                        Cell::S(s) => parse_rational(&s),
                        Cell::I(i) => Ok(rat(i)),
                    })
                    .collect()
            })
            .collect();
        ExactMatrix::from_rows(rows.map_err(D::Error::custom)?).map_err(D::Error::custom)
    }
}
