use num_rational::BigRational;
use proptest::prelude::*;
use thinsurf::lattice::linalg::nullspace;
use thinsurf::lattice::{
    corner_embed, cusp_membership, eichler_transvection, exp_nilpotent, form_value, is_so_plus,
    is_unipotent, polar, preserves_form, rat, unipotent_log, CuspData, ExactMatrix,
};
use thinsurf::qforms::DiagonalForm;

fn v(x: &[i64]) -> Vec<BigRational> {
    x.iter().map(|&a| rat(a)).collect()
}

fn q5() -> DiagonalForm {
    DiagonalForm::from_i64(&[-1, 1, 1, 1, 1]).unwrap()
}

/// Integer vectors orthogonal to u = (1,1,0,0,0) under the polar form.
fn perp(c: &[i64]) -> Vec<BigRational> {
    let u = v(&[1, 1, 0, 0, 0]);
    let row: Vec<BigRational> = q5()
        .coeffs()
        .iter()
        .zip(&u)
        .map(|(a, x)| BigRational::from_integer(a.clone()) * x)
        .collect();
    let basis = nullspace(&[row], 5);
    let mut out = vec![rat(0); 5];
    for (b, &k) in basis.iter().zip(c) {
        for i in 0..5 {
            out[i] += &b[i] * rat(k);
        }
    }
    out
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 4)
}

#[test]
fn eichler_examples() {
    let q = q5();
    let u = v(&[1, 1, 0, 0, 0]);
    let g = eichler_transvection(&q, &u, &v(&[0, 0, 1, 0, 0])).unwrap();
    assert!(preserves_form(&g, &q).unwrap());
    assert!(is_so_plus(&g, &q).unwrap());
    assert!(is_unipotent(&g));
    assert_eq!(g.apply(&u).unwrap(), u);
    assert!(eichler_transvection(&q, &v(&[1, 0, 0, 0, 0]), &v(&[0, 0, 1, 0, 0])).is_err());
    assert!(eichler_transvection(&q, &u, &v(&[1, 0, 0, 0, 0])).is_err());
    assert!(eichler_transvection(&q, &u, &v(&[0, 0, 0, 0])).is_err());
    assert!(eichler_transvection(&q, &u, &v(&[0, 0, 0, 0, 0]))
        .unwrap()
        .is_identity());
}

#[test]
fn corner_embedding_fixes_last_vector() {
    let q4 = DiagonalForm::from_i64(&[-1, 1, 1, 1]).unwrap();
    let g = eichler_transvection(&q4, &v(&[1, 1, 0, 0]), &v(&[0, 0, 2, 1])).unwrap();
    let c = corner_embed(&g);
    assert!(preserves_form(&c, &q4.direct_sum(&DiagonalForm::from_i64(&[7]).unwrap())).unwrap());
    assert_eq!(c.apply(&v(&[0, 0, 0, 0, 1])).unwrap(), v(&[0, 0, 0, 0, 1]));
}

#[test]
fn cusp_membership_examples() {
    let q = q5();
    let u = v(&[1, 1, 0, 0, 0]);
    let gens = vec![
        eichler_transvection(&q, &u, &v(&[0, 0, 1, 0, 0])).unwrap(),
        eichler_transvection(&q, &u, &v(&[0, 0, 0, 1, 0])).unwrap(),
    ];
    let cusp = CuspData::new(&q, 0, u.clone(), gens.clone()).unwrap();
    let x = &gens[0].pow(3).unwrap() * &gens[1].pow(-2).unwrap();
    assert_eq!(cusp_membership(&x, &cusp).unwrap(), Some(vec![3, -2]));
    let half = eichler_transvection(&q, &u, &v(&[0, 0, 0, 0, 1])).unwrap();
    assert_eq!(cusp_membership(&half, &cusp).unwrap(), None);
    assert_eq!(
        cusp_membership(&ExactMatrix::identity(5), &cusp).unwrap(),
        Some(vec![0, 0])
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eichler_is_isometry_and_additive(a in coeffs(), b in coeffs()) {
        let q = q5();
        let u = v(&[1, 1, 0, 0, 0]);
        let (x, y) = (perp(&a), perp(&b));
        prop_assert!(polar(&q, &u, &x) == rat(0));
        let gx = eichler_transvection(&q, &u, &x).unwrap();
        let gy = eichler_transvection(&q, &u, &y).unwrap();
        let sum: Vec<BigRational> = x.iter().zip(&y).map(|(s, t)| s + t).collect();
        let gs = eichler_transvection(&q, &u, &sum).unwrap();
        prop_assert!(preserves_form(&gx, &q).unwrap());
        prop_assert!(is_unipotent(&gx));
        prop_assert_eq!(gx.apply(&u).unwrap(), u.clone());
        prop_assert_eq!(&gx * &gy, gs);
        let neg: Vec<BigRational> = x.iter().map(|s| -s).collect();
        prop_assert_eq!(gx.inverse().unwrap(), eichler_transvection(&q, &u, &neg).unwrap());
    }

    #[test]
    fn log_and_exp_are_inverse(a in coeffs(), k in -4i64..=4) {
        let q = q5();
        let g = eichler_transvection(&q, &v(&[1, 1, 0, 0, 0]), &perp(&a)).unwrap().pow(k).unwrap();
        let l = unipotent_log(&g).unwrap();
        prop_assert_eq!(exp_nilpotent(&l).unwrap(), g.clone());
        prop_assert_eq!(unipotent_log(&exp_nilpotent(&l).unwrap()).unwrap(), l);
    }

    #[test]
    fn membership_recovers_exponents(k in prop::collection::vec(-5i64..=5, 3)) {
        let q = q5();
        let u = v(&[1, 1, 0, 0, 0]);
        let gens: Vec<ExactMatrix> = [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]
            .iter()
            .map(|w| eichler_transvection(&q, &u, &v(w)).unwrap())
            .collect();
        let cusp = CuspData::new(&q, 0, u, gens.clone()).unwrap();
        let mut x = ExactMatrix::identity(5);
        for (g, &e) in gens.iter().zip(&k) {
            x = &x * &g.pow(e).unwrap();
        }
        prop_assert_eq!(cusp_membership(&x, &cusp).unwrap(), Some(k));
    }

    #[test]
    fn corner_embed_is_homomorphism(a in coeffs(), b in coeffs()) {
        let q4 = DiagonalForm::from_i64(&[-1, 1, 1, 1]).unwrap();
        let u = v(&[1, 1, 0, 0]);
        let g = eichler_transvection(&q4, &u, &v(&[0, 0, a[0], a[1]])).unwrap();
        let h = eichler_transvection(&q4, &v(&[1, 0, 1, 0]), &v(&[0, b[0], 0, b[1]])).unwrap();
        prop_assert_eq!(corner_embed(&(&g * &h)), &corner_embed(&g) * &corner_embed(&h));
        prop_assert_eq!(corner_embed(&g.inverse().unwrap()), corner_embed(&g).inverse().unwrap());
        prop_assert!(form_value(&q4, &g.apply(&u).unwrap()) == rat(0));
    }
}
