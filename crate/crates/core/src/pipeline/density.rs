use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::PipelineError;
use crate::lattice::linalg::{intersect, nullspace, Row};
use crate::lattice::{form_value, preserves_form, ExactMatrix};
use crate::qforms::DiagonalForm;

pub const MAX_GENERATORS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityReport {
    #[serde(with = "crate::io::rational_matrix_str")]
    pub hyperplane_invariant_vectors: Vec<Vec<BigRational>>,
    /// Sign pattern of each reported vector (+1 fixed, -1 negated).
    pub signs: Vec<Vec<i8>>,
    pub contains_corner_block: bool,
    /// Every generator is the identity.
    pub degenerate: bool,
    pub patterns_visited: u64,
}

fn scaled_identity(n: usize, s: i64) -> ExactMatrix {
    ExactMatrix::identity(n).scale(&BigRational::from_integer(s.into()))
}

/// Whether g fixes some basis vector e_k and preserves its complement,
/// without being the identity.
pub fn is_corner_block(g: &ExactMatrix) -> bool {
    let n = g.dim();
    !g.is_identity()
        && (0..n).any(|k| {
            (0..n).all(|j| {
                let want = if j == k {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                *g.get(k, j) == want && *g.get(j, k) == want
            })
        })
}

fn positive_vector(q: &DiagonalForm, basis: &[Row]) -> Option<Vec<BigRational>> {
    if let Some(b) = basis.iter().find(|b| form_value(q, b).is_positive()) {
        return Some(b.clone());
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            for sign in [1i64, -1] {
                let s = BigRational::from_integer(sign.into());
                let v: Vec<BigRational> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(x, y)| x + &s * y)
                    .collect();
                if form_value(q, &v).is_positive() {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Exact search for q-positive vectors sent to +-themselves by every
/// generator, one sign pattern at a time with pruning on empty
/// intersections.
pub fn hyperplane_invariance_check(
    gens: &[ExactMatrix],
    q: &DiagonalForm,
) -> Result<DensityReport, PipelineError> {
    let n = q.rank();
    if gens.len() > MAX_GENERATORS {
        return Err(PipelineError::Input(format!(
            "{} generators exceed the limit of {MAX_GENERATORS}",
            gens.len()
        )));
    }
    for (i, g) in gens.iter().enumerate() {
        if g.dim() != n || !preserves_form(g, q)? {
            return Err(PipelineError::Input(format!(
                "generator {i} does not preserve q"
            )));
        }
    }
    let eig: Vec<[Vec<Row>; 2]> = gens
        .iter()
        .map(|g| {
            [1i64, -1].map(|s| {
                let d = g.sub(&scaled_identity(n, s));
                nullspace(&d.rows(), n)
            })
        })
        .collect();
    let mut report = DensityReport {
        hyperplane_invariant_vectors: Vec::new(),
        signs: Vec::new(),
        contains_corner_block: gens.iter().any(is_corner_block),
        degenerate: gens.iter().all(ExactMatrix::is_identity),
        patterns_visited: 0,
    };
    let full: Vec<Row> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut signs = Vec::new();
    search(q, &eig, 0, full, &mut signs, &mut report);
    for (v, sg) in report
        .hyperplane_invariant_vectors
        .iter()
        .zip(&report.signs)
    {
        for (g, &s) in gens.iter().zip(sg) {
            let want: Vec<BigRational> = v
                .iter()
                .map(|x| if s > 0 { x.clone() } else { -x })
                .collect();
            if g.apply(v)? != want {
                return Err(PipelineError::Invariant(
                    "reported vector is not invariant".into(),
                ));
            }
        }
    }
    Ok(report)
}

fn search(
    q: &DiagonalForm,
    eig: &[[Vec<Row>; 2]],
    j: usize,
    space: Vec<Row>,
    signs: &mut Vec<i8>,
    out: &mut DensityReport,
) {
    out.patterns_visited += 1;
    if space.is_empty() {
        return;
    }
    if j == eig.len() {
        if let Some(v) = positive_vector(q, &space) {
            out.hyperplane_invariant_vectors.push(v);
            out.signs.push(signs.clone());
        }
        return;
    }
    let n = q.rank();
    for (which, sign) in [(0, 1i8), (1, -1)] {
        let next = intersect(&space, &eig[j][which], n);
        signs.push(sign);
        search(q, eig, j + 1, next, signs, out);
        signs.pop();
    }
}
