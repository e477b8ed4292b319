//! Diagonal quadratic forms over Q and its completions.

pub mod arith;
mod chain;
mod isotropy;
mod montesinos;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use arith::{crt_pair, legendre_symbol};
pub use chain::{subform_chain, ChainStep, SubformChain};
pub use isotropy::{
    find_isotropic_vector, is_isotropic_global, is_isotropic_global_with, is_isotropic_local,
    is_square_local, IsotropyReport, DEFAULT_WITNESS_BOUND,
};
pub use montesinos::{
    montesinos_form, montesinos_form_with_a, replacement_prime, replacement_prime_with_cap,
    select_isotropic_subform, ConditionCheck, LegendreReading, MontesinosCase, MontesinosParams,
    Replacement, SubformSelection, ValidationReport, DEFAULT_SCAN_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("invalid place: {0} is not a prime")]
    InvalidPlace(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("rank {0} is below the required minimum {1}")]
    Rank(usize, usize),
    #[error("moduli {m1} and {m2} are not coprime")]
    NonCoprime { m1: String, m2: String },
    #[error("could not certify primality of {0}")]
    Uncertified(String),
    #[error("factorization of {0} failed")]
    FactorizationFailed(String),
    #[error("validation failed: {condition}")]
    Validation { condition: String },
    #[error("search exhausted after {0} candidates")]
    SearchExhausted(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A completion of Q: the real place or a p-adic one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinity,
    Two,
    Odd(BigUint),
}

impl Place {
    /// Place at a verified prime.
    pub fn prime<T: Into<BigUint>>(p: T) -> Result<Place, FormError> {
        let p: BigUint = p.into();
        if !arith::is_prime(&p)? {
            return Err(FormError::InvalidPlace(p.to_string()));
        }
        if p == BigUint::from(2u32) {
            Ok(Place::Two)
        } else {
            Ok(Place::Odd(p))
        }
    }

    pub fn prime_value(&self) -> Option<BigUint> {
        match self {
            Place::Infinity => None,
            Place::Two => Some(BigUint::from(2u32)),
            Place::Odd(p) => Some(p.clone()),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Place::Infinity)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Two => write!(f, "2"),
            Place::Odd(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = FormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Place::Infinity),
            t => {
                let p: BigUint = t
                    .parse()
                    .map_err(|_| FormError::InvalidPlace(t.to_string()))?;
                Place::prime(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// q = <a_1, ..., a_n> with nonzero integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalForm {
    coeffs: Vec<BigInt>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, FormError> {
        if coeffs.is_empty() {
            return Err(FormError::Rank(0, 1));
        }
        if coeffs.iter().any(Zero::is_zero) {
            return Err(FormError::InvalidInput("zero coefficient".into()));
        }
        Ok(DiagonalForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, FormError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn signature(&self) -> (usize, usize) {
        let pos = self.coeffs.iter().filter(|c| c.is_positive()).count();
        (pos, self.rank() - pos)
    }

    pub fn is_definite(&self) -> bool {
        let (p, n) = self.signature();
        p == 0 || n == 0
    }

    pub fn product(&self) -> BigInt {
        self.coeffs.iter().product()
    }

    /// q(x) for an integer vector.
    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        self.coeffs.iter().zip(x).map(|(a, xi)| a * xi * xi).sum()
    }

    /// Subform on the given coordinate indices, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<DiagonalForm, FormError> {
        let mut c = Vec::with_capacity(indices.len());
        for &i in indices {
            c.push(
                self.coeffs
                    .get(i)
                    .cloned()
                    .ok_or(FormError::Dimension(i, self.rank()))?,
            );
        }
        DiagonalForm::new(c)
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &DiagonalForm) -> DiagonalForm {
        let mut c = self.coeffs.clone();
        c.extend(other.coeffs.iter().cloned());
        DiagonalForm { coeffs: c }
    }

    /// Index of the unique negative coefficient, if exactly one exists.
    pub fn negative_index(&self) -> Option<usize> {
        let neg: Vec<usize> = (0..self.rank())
            .filter(|&i| self.coeffs[i].is_negative())
            .collect();
        (neg.len() == 1).then(|| neg[0])
    }

    /// {inf, 2} together with every odd prime dividing a coefficient.
    pub fn support_places(&self) -> Result<Vec<Place>, FormError> {
        let mut primes = std::collections::BTreeSet::new();
        for c in &self.coeffs {
            for p in arith::prime_divisors(c)? {
                primes.insert(p);
            }
        }
        let mut out = vec![Place::Infinity, Place::Two];
        for p in primes {
            if p != BigUint::from(2u32) {
                out.push(Place::Odd(p));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

impl Serialize for DiagonalForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::io::bigint_vec_str::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for DiagonalForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = crate::io::bigint_vec_str::deserialize(d)?;
        DiagonalForm::new(c).map_err(serde::de::Error::custom)
    }
}

fn epsilon2(u: &BigInt) -> u8 {
    // (u - 1)/2 mod 2 for odd u
    if u.mod_floor(&BigInt::from(4)) == BigInt::one() {
        0
    } else {
        1
    }
}

fn omega2(u: &BigInt) -> u8 {
    // (u^2 - 1)/8 mod 2 for odd u
    match u.mod_floor(&BigInt::from(8)).to_u8() {
        Some(1) | Some(7) => 0,
        _ => 1,
    }
}

/// Hilbert symbol (a, b)_v.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, v: &Place) -> Result<i8, FormError> {
    if a.is_zero() || b.is_zero() {
        return Err(FormError::InvalidInput("Hilbert symbol of zero".into()));
    }
    match v {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Two => {
            let two = BigUint::from(2u32);
            let (alpha, u) = arith::valuation(a, &two);
            let (beta, w) = arith::valuation(b, &two);
            let e = epsilon2(&u) * epsilon2(&w)
                + (alpha % 2) as u8 * omega2(&w)
                + (beta % 2) as u8 * omega2(&u);
            Ok(if e.is_multiple_of(2) { 1 } else { -1 })
        }
        Place::Odd(p) => {
            let (alpha, u) = arith::valuation(a, p);
            let (beta, w) = arith::valuation(b, p);
            let pi = BigInt::from(p.clone());
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && epsilon2(&pi) == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= arith::jacobi(&u, p);
            }
            if alpha % 2 == 1 {
                s *= arith::jacobi(&w, p);
            }
            Ok(s)
        }
    }
}

/// c_v(q) = prod_{i<j} (a_i, a_j)_v.
pub fn hasse_invariant(q: &DiagonalForm, v: &Place) -> Result<i8, FormError> {
    let c = q.coeffs();
    let mut s = 1i8;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            s *= hilbert_symbol(&c[i], &c[j], v)?;
        }
    }
    Ok(s)
}

/// Squarefree class of the coefficient product, sign included.
pub fn discriminant(q: &DiagonalForm) -> Result<BigInt, FormError> {
    arith::squarefree_part(&q.product())
}

pub fn signature(q: &DiagonalForm) -> (usize, usize) {
    q.signature()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FormInvariants {
    pub rank: usize,
    pub signature: (usize, usize),
    #[serde(with = "crate::io::bigint_str")]
    pub discriminant: BigInt,
    /// Squarefree class of |prod a_i|, reported next to the signed class.
    #[serde(with = "crate::io::bigint_str")]
    pub discriminant_abs: BigInt,
    pub hasse: BTreeMap<Place, i8>,
}

pub fn invariants(q: &DiagonalForm) -> Result<FormInvariants, FormError> {
    let d = discriminant(q)?;
    let mut hasse = BTreeMap::new();
    for v in q.support_places()? {
        let c = hasse_invariant(q, &v)?;
        hasse.insert(v, c);
    }
    Ok(FormInvariants {
        rank: q.rank(),
        signature: q.signature(),
        discriminant_abs: d.abs(),
        discriminant: d,
        hasse,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub signature: [(usize, usize); 2],
    pub signature_equal: bool,
    #[serde(with = "crate::io::bigint_vec_str")]
    pub discriminant: Vec<BigInt>,
    pub discriminant_equal: bool,
    pub hasse: BTreeMap<Place, [i8; 2]>,
    pub hasse_equal: bool,
}

/// Rational equivalence via signature, discriminant and Hasse invariants.
pub fn rationally_equivalent(
    q1: &DiagonalForm,
    q2: &DiagonalForm,
) -> Result<EquivalenceReport, FormError> {
    if q1.rank() != q2.rank() {
        return Err(FormError::Dimension(q1.rank(), q2.rank()));
    }
    let d1 = discriminant(q1)?;
    let d2 = discriminant(q2)?;
    let mut places: Vec<Place> = q1.support_places()?;
    places.extend(q2.support_places()?);
    places.sort();
    places.dedup();
    let mut hasse = BTreeMap::new();
    let mut hasse_equal = true;
    for v in places {
        let c1 = hasse_invariant(q1, &v)?;
        let c2 = hasse_invariant(q2, &v)?;
        hasse_equal &= c1 == c2;
        hasse.insert(v, [c1, c2]);
    }
    let signature_equal = q1.signature() == q2.signature();
    let discriminant_equal = d1 == d2;
    Ok(EquivalenceReport {
        equivalent: signature_equal && discriminant_equal && hasse_equal,
        signature: [q1.signature(), q2.signature()],
        signature_equal,
        discriminant: vec![d1, d2],
        discriminant_equal,
        hasse,
        hasse_equal,
    })
}
