//! Integer helpers: primality, factorization, Jacobi symbols, CRT.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FormError;

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Bases 2..41 are a deterministic Miller-Rabin witness set below this bound.
const MR_DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";

const TRIAL_LIMIT: u64 = 1000;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES[..12] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Proven primality. Exact for every input below 3.3e24; above that a
/// Pocklington certificate built from a full factorization of n - 1 is
/// required, otherwise `FormError::Uncertified`.
pub fn is_prime(n: &BigUint) -> Result<bool, FormError> {
    if let Some(small) = n.to_u64() {
        return Ok(is_prime_u64(small));
    }
    for p in 2..TRIAL_LIMIT {
        if (n % p).is_zero() {
            return Ok(false);
        }
    }
    for &a in &SMALL_PRIMES {
        if !miller_rabin_big(n, a) {
            return Ok(false);
        }
    }
    let limit: BigUint = MR_DETERMINISTIC_LIMIT.parse().expect("constant");
    if n < &limit {
        return Ok(true);
    }
    pocklington(n)
}

fn pocklington(n: &BigUint) -> Result<bool, FormError> {
    let one = BigUint::one();
    let nm1 = n - &one;
    let factors = factor_biguint(&nm1).map_err(|_| FormError::Uncertified(n.to_string()))?;
    'prime: for (q, _) in &factors {
        let e = &nm1 / q;
        for a in 2u64..200 {
            let a = BigUint::from(a);
            if a.modpow(&nm1, n) != one {
                return Ok(false);
            }
            let t = a.modpow(&e, n);
            let g = if t.is_zero() {
                n.clone()
            } else {
                (t + n - &one) % n
            };
            if g.gcd(n) == one {
                continue 'prime;
            }
        }
        return Err(FormError::Uncertified(n.to_string()));
    }
    Ok(true)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn rho_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mulmod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let m = 128u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn rho_big(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut x = BigUint::from(2u32);
    let mut y = x.clone();
    let mut g = BigUint::one();
    let mut steps = 0u64;
    while g.is_one() {
        x = f(&x);
        y = f(&f(&y));
        let diff = if x > y { &x - &y } else { &y - &x };
        g = diff.gcd(n);
        steps += 1;
        if steps > 5_000_000 {
            return None;
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split(n: &BigUint) -> Result<BigUint, FormError> {
    for c in 1..64u64 {
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c).map(BigUint::from),
            None => rho_big(n, c),
        };
        if let Some(d) = found {
            return Ok(d);
        }
    }
    Err(FormError::FactorizationFailed(n.to_string()))
}

fn factor_into(n: BigUint, out: &mut Vec<BigUint>) -> Result<(), FormError> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n)? {
        out.push(n);
        return Ok(());
    }
    let r = n.sqrt();
    if &r * &r == n {
        factor_into(r.clone(), out)?;
        return factor_into(r, out);
    }
    let d = split(&n)?;
    let e = &n / &d;
    factor_into(d, out)?;
    factor_into(e, out)
}

/// Prime factorization of a positive integer, sorted by prime.
pub fn factor_biguint(n: &BigUint) -> Result<Vec<(BigUint, u32)>, FormError> {
    if n.is_zero() {
        return Err(FormError::InvalidInput("cannot factor zero".into()));
    }
    let mut rest = n.clone();
    let mut primes = Vec::new();
    for p in 2..TRIAL_LIMIT {
        if rest.is_one() {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(BigUint::from(p));
        }
    }
    factor_into(rest, &mut primes)?;
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Factorization of |n| for nonzero n.
pub fn factor(n: &BigInt) -> Result<Vec<(BigUint, u32)>, FormError> {
    factor_biguint(n.magnitude())
}

/// Distinct prime divisors of |n|.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigUint>, FormError> {
    Ok(factor(n)?.into_iter().map(|(p, _)| p).collect())
}

/// Squarefree representative of n modulo nonzero squares, sign kept.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt, FormError> {
    let mut out = BigInt::one();
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            out *= BigInt::from(p);
        }
    }
    if n.sign() == Sign::Minus {
        out = -out;
    }
    Ok(out)
}

/// p-adic valuation and unit part: n = p^v * u with p not dividing u.
pub fn valuation(n: &BigInt, p: &BigUint) -> (u32, BigInt) {
    let p = BigInt::from(p.clone());
    let mut u = n.clone();
    let mut v = 0;
    while !u.is_zero() && (&u % &p).is_zero() {
        u /= &p;
        v += 1;
    }
    (v, u)
}

/// Jacobi symbol (a | n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i8 {
    let n0 = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n0);
    let mut n = n0;
    let mut t = 1i8;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol (a | p); p must be an odd prime.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> Result<i8, FormError> {
    if !p.is_positive() || p.is_even() || !is_prime(p.magnitude())? {
        return Err(FormError::InvalidPlace(p.to_string()));
    }
    Ok(jacobi(a, p.magnitude()))
}

/// Unique n in [0, m1*m2) with n = r1 mod m1 and n = r2 mod m2.
pub fn crt_pair(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> Result<BigInt, FormError> {
    if !m1.is_positive() || !m2.is_positive() {
        return Err(FormError::InvalidInput("moduli must be positive".into()));
    }
    let e = m1.extended_gcd(m2);
    if !e.gcd.is_one() {
        return Err(FormError::NonCoprime {
            m1: m1.to_string(),
            m2: m2.to_string(),
        });
    }
    let m = m1 * m2;
    // e.x * m1 = 1 mod m2
    let n = r1 + m1 * ((r2 - r1) * &e.x);
    Ok(n.mod_floor(&m))
}

/// Integer square root if n is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn small_primes() {
        let naive = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), naive(n), "{n}");
        }
    }

    #[test]
    fn carmichael_and_strong_pseudoprimes() {
        for n in [561u64, 1105, 1729, 2047, 3215031751, 3825123056546413051] {
            assert!(!is_prime_u64(n));
        }
        assert!(is_prime_u64(18446744073709551557));
    }

    #[test]
    fn big_prime_and_composite() {
        let p: BigUint = "170141183460469231731687303715884105727".parse().unwrap();
        assert!(is_prime(&p).unwrap());
        let c = &p * BigUint::from(3u32);
        assert!(!is_prime(&c).unwrap());
    }

    #[test]
    fn factor_roundtrip() {
        let n: BigUint = "600851475143".parse().unwrap();
        let f = factor_biguint(&n).unwrap();
        let primes: Vec<u64> = f.iter().map(|(p, _)| p.to_u64().unwrap()).collect();
        assert_eq!(primes, vec![71, 839, 1471, 6857]);
        let m = BigUint::from(2u32).pow(10) * BigUint::from(1000003u32).pow(2);
        let g = factor_biguint(&m).unwrap();
        assert_eq!(g[0], (BigUint::from(2u32), 10));
        assert_eq!(g[1], (BigUint::from(1000003u32), 2));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(&b(1), &b(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(&b(4), &b(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(&b(2), &b(5)).unwrap(), -1);
        assert_eq!(legendre_symbol(&b(10), &b(5)).unwrap(), 0);
        assert!(legendre_symbol(&b(2), &b(9)).is_err());
        assert!(legendre_symbol(&b(2), &b(2)).is_err());
    }

    #[test]
    fn legendre_matches_squares_table() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let squares: Vec<i64> = (1..p).map(|x| x * x % p).collect();
            for a in -40..40i64 {
                let r = a.rem_euclid(p);
                let want = if r == 0 {
                    0
                } else if squares.contains(&r) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol(&b(a), &b(p)).unwrap(), want, "({a}|{p})");
            }
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_pair(&b(7), &b(33), &b(3), &b(8)).unwrap(), b(139));
        assert_eq!(crt_pair(&b(1), &b(3), &b(1), &b(8)).unwrap(), b(1));
        assert_eq!(crt_pair(&b(0), &b(5), &b(0), &b(7)).unwrap(), b(0));
        assert!(crt_pair(&b(1), &b(4), &b(1), &b(6)).is_err());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&b(16)).unwrap(), b(1));
        assert_eq!(squarefree_part(&b(-45)).unwrap(), b(-5));
        assert_eq!(valuation(&b(-96), &BigUint::from(2u32)), (5, b(-3)));
    }
}
