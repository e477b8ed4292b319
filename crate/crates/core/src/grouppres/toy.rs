//! Shipped toy configurations in q = <-1,1,1,1,1> with H_G = {x_4 = 0}.

use num_rational::BigRational;

use super::{CuspSpec, GroupConfig, GroupError, NamedMatrix, SweepBounds};
use crate::lattice::{eichler_transvection, rat, ExactMatrix};
use crate::qforms::DiagonalForm;

pub const TOY_NAMES: [&str; 3] = ["T1", "T1-1", "T1-3"];

fn v(x: &[i64]) -> Vec<BigRational> {
    x.iter().map(|&a| rat(a)).collect()
}

fn e(i: usize) -> Vec<BigRational> {
    let mut x = vec![0; 5];
    x[i] = 1;
    v(&x)
}

fn eichler(q: &DiagonalForm, u: &[BigRational], w: &[BigRational]) -> ExactMatrix {
    eichler_transvection(q, u, w).expect("toy vectors satisfy the preconditions")
}

/// T1 has two cusps u0 = (1,1,0,0,0), u1 = (1,-1,0,0,0) with base
/// generators a = E(u0, e2), b = E(u1, e3); T1-1 keeps only cusp 0 and a;
/// T1-3 adds u2 = (1,0,1,0,0) with c = E(u2, e3). Stable letters are the
/// unpowered parabolics E(u_i, e4).
pub fn toy_config(name: &str) -> Result<GroupConfig, GroupError> {
    let cusps = match name {
        "T1" => 2,
        "T1-1" => 1,
        "T1-3" => 3,
        _ => {
            return Err(GroupError::Invalid(format!(
                "unknown toy config {name:?}; expected one of {TOY_NAMES:?}"
            )))
        }
    };
    let q = DiagonalForm::from_i64(&[-1, 1, 1, 1, 1]).expect("nonzero coefficients");
    let points = [
        v(&[1, 1, 0, 0, 0]),
        v(&[1, -1, 0, 0, 0]),
        v(&[1, 0, 1, 0, 0]),
    ];
    let dirs = [e(2), e(3), e(3)];
    let names = ["a", "b", "c"];
    let mut base_generators = Vec::new();
    let mut cusp_specs = Vec::new();
    let mut stable_letters = Vec::new();
    for i in 0..cusps {
        base_generators.push(NamedMatrix {
            name: names[i].into(),
            matrix: eichler(&q, &points[i], &dirs[i]),
        });
        cusp_specs.push(CuspSpec {
            point: points[i].clone(),
            generators: vec![vec![i as i32 + 1]],
        });
        stable_letters.push(eichler(&q, &points[i], &e(4)));
    }
    Ok(GroupConfig {
        form: q,
        subform_indices: vec![0, 1, 2, 3],
        base_generators,
        cusps: cusp_specs,
        stable_letters,
        d: Some(6.0),
        precision_bits: Some(256),
        sweep: Some(SweepBounds { l: 5, e: 3, b: 3 }),
    })
}
