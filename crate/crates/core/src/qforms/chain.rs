use num_traits::Signed;
use serde::Serialize;

use super::{is_isotropic_global_with, DiagonalForm, FormError, IsotropyReport};

const CHAIN_WITNESS_BOUND: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainStep {
    pub form: DiagonalForm,
    /// Coordinates of the input form kept in this step.
    pub indices: Vec<usize>,
    /// Coordinate of the input form removed to reach this step.
    pub deleted_index: usize,
    pub isotropy: IsotropyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubformChain {
    pub input: DiagonalForm,
    pub steps: Vec<ChainStep>,
    /// Set when no positive deletion at rank 4 is isotropic.
    pub tail_failure: Option<String>,
}

impl SubformChain {
    pub fn last(&self) -> Option<&ChainStep> {
        self.steps.last()
    }
}

/// f_{n-1}, ..., f_3 for q of signature (n,1), n >= 4, obtained by deleting
/// positive coefficients (largest |a_i| first, later index first on ties).
pub fn subform_chain(q: &DiagonalForm) -> Result<SubformChain, FormError> {
    let (pos, neg) = q.signature();
    if neg != 1 || pos < 4 {
        return Err(FormError::Precondition(format!(
            "signature (n,1) with n >= 4 required, got ({pos},{neg})"
        )));
    }
    let mut indices: Vec<usize> = (0..q.rank()).collect();
    let mut steps = Vec::new();
    while indices.len() > 4 {
        let mut candidates: Vec<usize> = indices
            .iter()
            .copied()
            .filter(|&i| q.coeffs()[i].is_positive())
            .collect();
        candidates.sort_by(|&i, &j| {
            q.coeffs()[j]
                .abs()
                .cmp(&q.coeffs()[i].abs())
                .then(j.cmp(&i))
        });
        let mut chosen = None;
        for del in candidates {
            let kept: Vec<usize> = indices.iter().copied().filter(|&i| i != del).collect();
            let form = q.restrict(&kept)?;
            let iso = is_isotropic_global_with(&form, CHAIN_WITNESS_BOUND)?;
            if iso.isotropic {
                chosen = Some(ChainStep {
                    form,
                    indices: kept,
                    deleted_index: del,
                    isotropy: iso,
                });
                break;
            }
        }
        match chosen {
            Some(step) => {
                indices = step.indices.clone();
                steps.push(step);
            }
            None => {
                return Ok(SubformChain {
                    input: q.clone(),
                    steps,
                    tail_failure: Some(format!(
                        "no positive deletion of {} is isotropic",
                        q.restrict(&indices)?
                    )),
                });
            }
        }
    }
    Ok(SubformChain {
        input: q.clone(),
        steps,
        tail_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_five_one_step() {
        let q = DiagonalForm::from_i64(&[-1, 1, 1, 1, 1]).unwrap();
        let c = subform_chain(&q).unwrap();
        assert_eq!(c.steps.len(), 1);
        assert_eq!(
            c.steps[0].form,
            DiagonalForm::from_i64(&[-1, 1, 1, 1]).unwrap()
        );
        assert_eq!(c.steps[0].deleted_index, 4);
        assert!(c.tail_failure.is_none());
    }

    #[test]
    fn rank_six_two_steps() {
        let q = DiagonalForm::from_i64(&[-1, 1, 1, 1, 2, 3]).unwrap();
        let c = subform_chain(&q).unwrap();
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.steps[0].deleted_index, 5);
        for s in &c.steps {
            assert!(s.isotropy.isotropic);
            assert_eq!(s.form.signature().1, 1);
        }
    }

    #[test]
    fn tail_failure_reported() {
        // every rank-4 deletion is <-1,1,1,7>-like or anisotropic at 2
        let q = DiagonalForm::from_i64(&[-7, 1, 1, 1, 1]).unwrap();
        let c = subform_chain(&q).unwrap();
        assert!(c.tail_failure.is_some());
    }

    #[test]
    fn definite_rejected() {
        let q = DiagonalForm::from_i64(&[1, 1, 1, 1, 1]).unwrap();
        assert!(subform_chain(&q).is_err());
    }
}
