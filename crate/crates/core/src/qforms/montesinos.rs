use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{
    arith, find_isotropic_vector, rationally_equivalent, DiagonalForm, EquivalenceReport,
    FormError, Place,
};

pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

/// How the Legendre side condition on (S, a) is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegendreReading {
    /// (-a | p_i) = -1
    #[default]
    NegAOverP,
    /// (a | p_i) = -1
    AOverP,
    /// (p_i | a) = -1
    POverA,
}

impl FromStr for LegendreReading {
    type Err = FormError;
    fn from_str(s: &str) -> Result<Self, FormError> {
        match s {
            "neg-a-over-p" => Ok(Self::NegAOverP),
            "a-over-p" => Ok(Self::AOverP),
            "p-over-a" => Ok(Self::POverA),
            _ => Err(FormError::InvalidInput(format!(
                "unknown Legendre reading {s}"
            ))),
        }
    }
}

impl fmt::Display for LegendreReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NegAOverP => "neg-a-over-p",
            Self::AOverP => "a-over-p",
            Self::POverA => "p-over-a",
        })
    }
}

/// S mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MontesinosCase {
    #[serde(rename = "S=1 mod 4")]
    Plus,
    #[serde(rename = "S=-1 mod 4")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub reading: LegendreReading,
    pub conditions: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.conditions
            .iter()
            .find(|c| !c.holds)
            .map(|c| c.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MontesinosParams {
    #[serde(rename = "S", with = "crate::io::bigint_str")]
    s: BigInt,
    #[serde(with = "crate::io::bigint_str")]
    a: BigInt,
    #[serde(rename = "primes", with = "crate::io::bigint_vec_str")]
    s_primes: Vec<BigInt>,
    case: MontesinosCase,
    report: ValidationReport,
}

fn check(out: &mut Vec<ConditionCheck>, name: impl Into<String>, holds: bool) {
    out.push(ConditionCheck {
        name: name.into(),
        holds,
    });
}

impl MontesinosParams {
    /// Evaluate every side condition on (S, a) without failing early.
    pub fn validate(
        s: &BigInt,
        a: &BigInt,
        reading: LegendreReading,
    ) -> Result<ValidationReport, FormError> {
        let mut c = Vec::new();
        let three = BigInt::from(3);
        let four = BigInt::from(4);
        if s < &three {
            check(&mut c, "S >= 3", false);
            return Ok(ValidationReport {
                reading,
                conditions: c,
            });
        }
        check(&mut c, "S >= 3", true);
        check(&mut c, "S odd", s.is_odd());
        let factors = arith::factor(s)?;
        check(&mut c, "S squarefree", factors.iter().all(|(_, e)| *e == 1));
        let a_prime = a >= &three && arith::is_prime(a.magnitude())?;
        check(&mut c, "a odd prime", a_prime);
        if !a_prime {
            return Ok(ValidationReport {
                reading,
                conditions: c,
            });
        }
        check(&mut c, "a does not divide S", !s.is_multiple_of(a));
        for (p, _) in &factors {
            let p = BigInt::from(p.clone());
            if p == BigInt::from(2) {
                continue;
            }
            let sym = match reading {
                LegendreReading::NegAOverP => arith::jacobi(&-a, p.magnitude()),
                LegendreReading::AOverP => arith::jacobi(a, p.magnitude()),
                LegendreReading::POverA => arith::jacobi(&p, a.magnitude()),
            };
            let label = match reading {
                LegendreReading::NegAOverP => format!("(-a|{p}) = -1"),
                LegendreReading::AOverP => format!("(a|{p}) = -1"),
                LegendreReading::POverA => format!("({p}|a) = -1"),
            };
            check(&mut c, label, sym == -1);
        }
        let n = factors.len() as u32;
        let s_plus = s.mod_floor(&four).is_one();
        let exponent = if s_plus { n } else { n + 1 };
        let want = if exponent % 2 == 0 {
            BigInt::one()
        } else {
            three.clone()
        };
        let label = if s_plus {
            "a = (-1)^n mod 4"
        } else {
            "a = (-1)^(n+1) mod 4"
        };
        check(&mut c, label, a.mod_floor(&four) == want);
        Ok(ValidationReport {
            reading,
            conditions: c,
        })
    }

    pub fn new(s: BigInt, a: BigInt) -> Result<Self, FormError> {
        Self::with_reading(s, a, LegendreReading::default())
    }

    pub fn with_reading(s: BigInt, a: BigInt, reading: LegendreReading) -> Result<Self, FormError> {
        let report = Self::validate(&s, &a, reading)?;
        if let Some(name) = report.first_failure() {
            return Err(FormError::Validation {
                condition: name.to_string(),
            });
        }
        let s_primes = arith::prime_divisors(&s)?
            .into_iter()
            .map(BigInt::from)
            .collect();
        let case = if s.mod_floor(&BigInt::from(4)).is_one() {
            MontesinosCase::Plus
        } else {
            MontesinosCase::Minus
        };
        Ok(MontesinosParams {
            s,
            a,
            s_primes,
            case,
            report,
        })
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn s_primes(&self) -> &[BigInt] {
        &self.s_primes
    }

    pub fn case(&self) -> MontesinosCase {
        self.case
    }

    pub fn reading(&self) -> LegendreReading {
        self.report.reading
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    /// The closed-form Hasse invariant table for this family.
    pub fn tabulated_hasse_invariant(&self, v: &Place) -> i8 {
        let four = BigInt::from(4);
        let a1 = self.a.mod_floor(&four).is_one();
        match v {
            Place::Two => match (self.case, a1) {
                (MontesinosCase::Plus, _) => 1,
                (MontesinosCase::Minus, true) => -1,
                (MontesinosCase::Minus, false) => 1,
            },
            Place::Odd(p) if BigInt::from(p.clone()) == self.a => match (self.case, a1) {
                (MontesinosCase::Plus, true) => 1,
                (MontesinosCase::Plus, false) => -1,
                (MontesinosCase::Minus, _) => 1,
            },
            Place::Odd(p) if self.s_primes.contains(&BigInt::from(p.clone())) => -1,
            _ => 1,
        }
    }
}

/// <-1,1,1,aS,a> for S = 1 mod 4, <1,1,1,aS,-a> for S = -1 mod 4.
pub fn montesinos_form(params: &MontesinosParams) -> DiagonalForm {
    montesinos_form_with_a(params, &params.a)
}

/// The same family with a replaced by another prime (used for q').
pub fn montesinos_form_with_a(params: &MontesinosParams, a: &BigInt) -> DiagonalForm {
    let one = BigInt::one();
    let c = match params.case {
        MontesinosCase::Plus => vec![-&one, one.clone(), one.clone(), a * &params.s, a.clone()],
        MontesinosCase::Minus => vec![one.clone(), one.clone(), one, a * &params.s, -a],
    };
    DiagonalForm::new(c).expect("nonzero coefficients")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Replacement {
    #[serde(with = "crate::io::bigint_str")]
    pub a_prime: BigInt,
    #[serde(with = "crate::io::bigint_str")]
    pub residue: BigInt,
    #[serde(with = "crate::io::bigint_str")]
    pub modulus: BigInt,
    pub candidates_scanned: u64,
}

pub fn replacement_prime(params: &MontesinosParams) -> Result<Replacement, FormError> {
    replacement_prime_with_cap(params, DEFAULT_SCAN_CAP)
}

/// Least prime a' = n mod 8S with n = a mod S, n = 3 mod 8.
pub fn replacement_prime_with_cap(
    params: &MontesinosParams,
    cap: u64,
) -> Result<Replacement, FormError> {
    let eight = BigInt::from(8);
    if params.case != MontesinosCase::Minus {
        return Err(FormError::Validation {
            condition: "S = -1 mod 4".into(),
        });
    }
    if params.a.mod_floor(&eight) != BigInt::from(7) {
        return Err(FormError::Validation {
            condition: "a = 7 mod 8".into(),
        });
    }
    let s = &params.s;
    let n = arith::crt_pair(&params.a.mod_floor(s), s, &BigInt::from(3), &eight)?;
    let modulus = &eight * s;
    let mut c = n.clone();
    for scanned in 1..=cap {
        if arith::is_prime(c.magnitude())? {
            return Ok(Replacement {
                a_prime: c,
                residue: n,
                modulus,
                candidates_scanned: scanned,
            });
        }
        c += &modulus;
    }
    Err(FormError::SearchExhausted(cap))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubformSelection {
    /// The Montesinos form built from (S, a).
    pub q: DiagonalForm,
    /// The form that actually contains f: q itself or q' after replacement.
    pub q_used: DiagonalForm,
    pub f: DiagonalForm,
    /// Coordinates of q_used occupied by f.
    pub indices: Vec<usize>,
    #[serde(with = "crate::io::bigint_vec_str")]
    pub witness: Vec<BigInt>,
    pub replacement: Option<Replacement>,
    pub equivalence: Option<EquivalenceReport>,
}

/// The isotropic rank-4 subform, replacing a when a = 7 mod 8 in the S = -1 case.
pub fn select_isotropic_subform(params: &MontesinosParams) -> Result<SubformSelection, FormError> {
    let q = montesinos_form(params);
    let indices = vec![0, 1, 2, 4];
    let (q_used, replacement, equivalence) = match params.case {
        MontesinosCase::Minus if params.a.mod_floor(&BigInt::from(8)) == BigInt::from(7) => {
            let r = replacement_prime(params)?;
            let q2 = montesinos_form_with_a(params, &r.a_prime);
            let eq = rationally_equivalent(&q, &q2)?;
            (q2, Some(r), Some(eq))
        }
        _ => (q.clone(), None, None),
    };
    let f = q_used.restrict(&indices)?;
    let a_eff = f.coeffs()[3].magnitude().clone();
    let bound = a_eff.sqrt().to_u64().unwrap_or(u64::MAX).saturating_add(1);
    let witness = find_isotropic_vector(&f, bound.max(1)).ok_or_else(|| {
        FormError::Precondition(format!("no isotropic vector for {f} within {bound}"))
    })?;
    Ok(SubformSelection {
        q,
        q_used,
        f,
        indices,
        witness,
        replacement,
        equivalence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::hasse_invariant;

    fn p(s: i64, a: i64) -> Result<MontesinosParams, FormError> {
        MontesinosParams::new(BigInt::from(s), BigInt::from(a))
    }

    #[test]
    fn smallest_fixtures_per_case() {
        // smallest valid (S, a) by S then a, one per (S mod 4, a mod 4)
        for (s, a) in [(21, 37), (5, 3), (3, 13), (15, 7)] {
            assert!(p(s, a).is_ok(), "({s},{a})");
        }
        for s in 3..21 {
            for a in 3..37 {
                if let Ok(m) = p(s, a) {
                    let key = (s % 4, a % 4);
                    assert_ne!(key, (1, 1), "smaller (1,1) fixture ({},{})", m.s(), m.a());
                }
            }
        }
    }

    #[test]
    fn form_shapes() {
        let q = montesinos_form(&p(21, 37).unwrap());
        assert_eq!(q, DiagonalForm::from_i64(&[-1, 1, 1, 777, 37]).unwrap());
        assert_eq!(q.signature(), (4, 1));
        let q = montesinos_form(&p(3, 13).unwrap());
        assert_eq!(q, DiagonalForm::from_i64(&[1, 1, 1, 39, -13]).unwrap());
    }

    #[test]
    fn validation_errors_name_condition() {
        match p(6, 5) {
            Err(FormError::Validation { condition }) => assert_eq!(condition, "S odd"),
            other => panic!("{other:?}"),
        }
        match p(9, 5) {
            Err(FormError::Validation { condition }) => assert_eq!(condition, "S squarefree"),
            other => panic!("{other:?}"),
        }
        match p(15, 5) {
            Err(FormError::Validation { condition }) => {
                assert_eq!(condition, "a does not divide S")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn readings_differ() {
        let s = BigInt::from(3);
        let a = BigInt::from(5);
        let r = MontesinosParams::validate(&s, &a, LegendreReading::AOverP).unwrap();
        assert!(r.all_hold());
        let r = MontesinosParams::validate(&s, &a, LegendreReading::NegAOverP).unwrap();
        assert!(!r.all_hold());
    }

    #[test]
    fn replacement_fixture() {
        let m = p(15, 7).unwrap();
        let r = replacement_prime(&m).unwrap();
        assert_eq!(r.residue, BigInt::from(67));
        assert_eq!(r.a_prime, BigInt::from(67));
        assert!(p(15, 67).is_ok());
        let m3 = p(3, 13).unwrap();
        assert!(replacement_prime(&m3).is_err());
    }

    #[test]
    fn subform_cases() {
        let s = select_isotropic_subform(&p(21, 37).unwrap()).unwrap();
        assert_eq!(s.f, DiagonalForm::from_i64(&[-1, 1, 1, 37]).unwrap());
        assert_eq!(
            s.witness,
            vec![1, 1, 0, 0]
                .into_iter()
                .map(BigInt::from)
                .collect::<Vec<_>>()
        );
        let s = select_isotropic_subform(&p(15, 7).unwrap()).unwrap();
        assert_eq!(s.f, DiagonalForm::from_i64(&[1, 1, 1, -67]).unwrap());
        assert!(s.equivalence.unwrap().equivalent);
        assert!(s.f.eval(&s.witness) == BigInt::from(0));
    }

    #[test]
    fn dyadic_invariant_when_s1_a3_is_minus_one() {
        // the table's "p = 2, S = 1 mod 4" row gives +1 here; the pairwise product gives -1
        let m = p(5, 3).unwrap();
        let q = montesinos_form(&m);
        assert_eq!(hasse_invariant(&q, &Place::Two).unwrap(), -1);
        assert_eq!(
            hasse_invariant(&q, &Place::prime(3u32).unwrap()).unwrap(),
            1
        );
        assert_eq!(m.tabulated_hasse_invariant(&Place::Two), 1);
    }
}
