//! Brute-force reference procedures used to cross-check the closed forms.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{arith, DiagonalForm, FormError, Place};

/// Precision exponent k = 3 + 2 v_p(2 prod a_i) for the mod p^k search.
pub fn lifting_exponent(q: &DiagonalForm, p: &num_bigint::BigUint) -> u32 {
    let two_prod = q.product() * 2;
    3 + 2 * arith::valuation(&two_prod, p).0
}

/// Search for a primitive solution of q(x) = 0 mod p^k by lifting solutions
/// one p-adic digit at a time, depth first. At the real place this is the
/// sign test. Intended for small primes and ranks.
pub fn locally_solvable_bruteforce(q: &DiagonalForm, v: &Place) -> Result<bool, FormError> {
    let p = match v.prime_value() {
        None => {
            let (pos, neg) = q.signature();
            return Ok(pos > 0 && neg > 0);
        }
        Some(p) => p,
    };
    let k = lifting_exponent(q, &p);
    let p = p
        .to_i64()
        .ok_or_else(|| FormError::InvalidInput("prime too large for brute force".into()))?;
    let modulus = (p as i128)
        .checked_pow(k)
        .filter(|m| *m < (1i128 << 62))
        .ok_or_else(|| FormError::InvalidInput("p^k too large for brute force".into()))?;
    let a: Vec<i128> = q
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.clone() % BigInt::from(modulus);
            r.to_i128().expect("reduced")
        })
        .collect();
    let n = a.len();
    let p = p as i128;
    let mut x = vec![0i128; n];
    // level 1: every nonzero residue vector mod p
    let total = p.pow(n as u32);
    for idx in 1..total {
        let mut t = idx;
        for xi in x.iter_mut() {
            *xi = t % p;
            t /= p;
        }
        if eval_mod(&a, &x, p) == 0 && lift(&a, &mut x.clone(), p, p, 1, k) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn eval_mod(a: &[i128], x: &[i128], m: i128) -> i128 {
    let mut s = 0i128;
    for (ai, xi) in a.iter().zip(x) {
        s = (s + ai * (xi * xi % m)) % m;
    }
    s.rem_euclid(m)
}

fn lift(a: &[i128], x: &mut [i128], p: i128, pj: i128, j: u32, k: u32) -> bool {
    if j == k {
        return true;
    }
    let n = x.len();
    let next = pj * p;
    let base = x.to_vec();
    let total = p.pow(n as u32);
    for idx in 0..total {
        let mut t = idx;
        for i in 0..n {
            x[i] = base[i] + pj * (t % p);
            t /= p;
        }
        if eval_mod(a, x, next) == 0 && lift(a, x, p, next, j + 1, k) {
            return true;
        }
    }
    x.copy_from_slice(&base);
    false
}

/// (a,b)_v via solvability of a x^2 + b y^2 - z^2 = 0.
pub fn hilbert_symbol_bruteforce(a: &BigInt, b: &BigInt, v: &Place) -> Result<i8, FormError> {
    if *v == Place::Infinity {
        return Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        });
    }
    let q = DiagonalForm::new(vec![a.clone(), b.clone(), BigInt::from(-1)])?;
    Ok(if locally_solvable_bruteforce(&q, v)? {
        1
    } else {
        -1
    })
}
