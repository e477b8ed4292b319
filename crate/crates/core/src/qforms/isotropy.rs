use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::{arith, hasse_invariant, hilbert_symbol, DiagonalForm, FormError, Place};

pub const DEFAULT_WITNESS_BOUND: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsotropyReport {
    pub isotropic: bool,
    #[serde(with = "crate::io::opt_bigint_vec_str")]
    pub witness: Option<Vec<BigInt>>,
    pub obstruction: Option<Place>,
}

/// Whether the nonzero integer d is a square in Q_v.
pub fn is_square_local(d: &BigInt, v: &Place) -> bool {
    match v {
        Place::Infinity => d.is_positive(),
        Place::Two => {
            let (e, u) = arith::valuation(d, &2u32.into());
            e % 2 == 0 && u.mod_floor(&BigInt::from(8)).is_one()
        }
        Place::Odd(p) => {
            let (e, u) = arith::valuation(d, p);
            e % 2 == 0 && arith::jacobi(&u, p) == 1
        }
    }
}

pub fn is_isotropic_local(q: &DiagonalForm, v: &Place) -> Result<bool, FormError> {
    let n = q.rank();
    if n < 2 {
        return Err(FormError::Rank(n, 2));
    }
    if *v == Place::Infinity {
        return Ok(!q.is_definite());
    }
    let c = q.coeffs();
    let d = q.product();
    let minus_one = BigInt::from(-1);
    Ok(match n {
        2 => is_square_local(&(-(&c[0] * &c[1])), v),
        3 => hasse_invariant(q, v)? == hilbert_symbol(&minus_one, &(-&d), v)?,
        4 => {
            !is_square_local(&d, v)
                || hasse_invariant(q, v)? == hilbert_symbol(&minus_one, &minus_one, v)?
        }
        _ => true,
    })
}

pub fn is_isotropic_global(q: &DiagonalForm) -> Result<IsotropyReport, FormError> {
    is_isotropic_global_with(q, DEFAULT_WITNESS_BOUND)
}

/// Local-global test; witness search up to `bound` for rank <= 5.
pub fn is_isotropic_global_with(q: &DiagonalForm, bound: u64) -> Result<IsotropyReport, FormError> {
    if q.rank() < 2 {
        return Err(FormError::Rank(q.rank(), 2));
    }
    for v in q.support_places()? {
        if !is_isotropic_local(q, &v)? {
            return Ok(IsotropyReport {
                isotropic: false,
                witness: None,
                obstruction: Some(v),
            });
        }
    }
    let witness = if q.rank() <= 5 && bound > 0 {
        find_isotropic_vector(q, bound)
    } else {
        None
    };
    Ok(IsotropyReport {
        isotropic: true,
        witness,
        obstruction: None,
    })
}

/// Height-graded search for a primitive zero. Within one height the
/// candidates run in descending lexicographic order over vectors whose
/// first nonzero entry is positive; the last coordinate is solved for,
/// positive root first.
pub fn find_isotropic_vector(q: &DiagonalForm, bound: u64) -> Option<Vec<BigInt>> {
    if q.rank() < 2 || q.is_definite() || bound == 0 {
        return None;
    }
    let small: Option<Vec<i128>> = q
        .coeffs()
        .iter()
        .map(|c| c.to_i64().map(i128::from))
        .collect();
    match small {
        Some(a) if bound <= 1 << 20 => {
            search(&a, bound as i128).map(|x| x.into_iter().map(BigInt::from).collect())
        }
        _ => search(q.coeffs(), BigInt::from(bound)),
    }
}

fn search<T>(a: &[T], bound: T) -> Option<Vec<T>>
where
    T: Clone + Integer + Signed + Roots,
{
    let n = a.len();
    let last = &a[n - 1];
    let mut h = T::one();
    while h <= bound {
        let mut x: Vec<T> = vec![h.clone(); n - 1];
        loop {
            if let Some(found) = try_prefix(a, last, &x, &h) {
                return Some(found);
            }
            if !step_down(&mut x, &h) {
                break;
            }
        }
        h = h + T::one();
    }
    None
}

/// Next prefix in descending lexicographic order, keeping x[0] >= 0.
fn step_down<T: Clone + Integer + Signed>(x: &mut [T], h: &T) -> bool {
    let lo = -h.clone();
    for i in (0..x.len()).rev() {
        let floor = if i == 0 { T::zero() } else { lo.clone() };
        if x[i] > floor {
            x[i] = x[i].clone() - T::one();
            for xj in x.iter_mut().skip(i + 1) {
                *xj = h.clone();
            }
            return true;
        }
    }
    false
}

fn try_prefix<T>(a: &[T], last: &T, x: &[T], h: &T) -> Option<Vec<T>>
where
    T: Clone + Integer + Signed + Roots,
{
    let first_nonzero = x.iter().find(|v| !v.is_zero());
    if let Some(v) = first_nonzero {
        if v.is_negative() {
            return None;
        }
    }
    let mut r = T::zero();
    for (ai, xi) in a.iter().zip(x) {
        r = r - ai.clone() * xi.clone() * xi.clone();
    }
    let (t, rem) = r.div_rem(last);
    if !rem.is_zero() || t.is_negative() {
        return None;
    }
    let y = t.sqrt();
    if y.clone() * y.clone() != t || &y > h {
        return None;
    }
    let prefix_max = x.iter().map(|v| v.abs()).max().unwrap_or_else(T::zero);
    if &prefix_max != h && &y != h {
        return None;
    }
    let mut g = y.clone();
    for v in x {
        g = g.gcd(v);
    }
    if !g.is_one() {
        return None;
    }
    let mut cands = vec![y.clone()];
    if !y.is_zero() {
        cands.push(-y);
    }
    for c in cands {
        if first_nonzero.is_none() && !c.is_positive() {
            continue;
        }
        let mut out = x.to_vec();
        out.push(c);
        return Some(out);
    }
    None
}
