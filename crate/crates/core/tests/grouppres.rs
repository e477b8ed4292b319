use proptest::prelude::*;
use thinsurf::grouppres::toy::toy_config;
use thinsurf::grouppres::*;
use thinsurf::lattice::ExactMatrix;

fn t1() -> Group {
    Group::new(toy_config("T1").unwrap()).unwrap()
}

fn w(letters: &[Letter]) -> Word {
    Word::from_letters(letters).unwrap()
}

fn t(c: usize, k: i64) -> Letter {
    Letter::Stable { cusp: c, power: k }
}

#[test]
fn toy_configs_validate() {
    for name in toy::TOY_NAMES {
        let g = Group::new(toy_config(name).unwrap()).unwrap();
        assert_eq!(g.cusp_count(), g.config().stable_letters.len());
    }
    assert!(toy_config("T9").is_err());
}

#[test]
fn config_json_roundtrip() {
    let cfg = toy_config("T1").unwrap();
    let back = GroupConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn rejects_noncommuting_stable() {
    let mut cfg = toy_config("T1").unwrap();
    cfg.stable_letters.swap(0, 1);
    assert!(matches!(Group::new(cfg), Err(GroupError::Invalid(_))));
}

#[test]
fn rejects_generator_leaving_hg() {
    let mut cfg = toy_config("T1").unwrap();
    cfg.base_generators[0].matrix = cfg.stable_letters[0].clone();
    assert!(Group::new(cfg).is_err());
}

#[test]
fn britton_examples() {
    let g = t1();
    // t0 a t0^-1 a^-1
    let x = w(&[t(0, 1), Letter::Base(1), t(0, -1), Letter::Base(-1)]);
    assert!(britton_reduce(&x, &g).unwrap().is_empty());
    // t0^2 a t0^-2 -> a
    let x = w(&[t(0, 2), Letter::Base(1), t(0, -2)]);
    assert_eq!(britton_reduce(&x, &g).unwrap(), Word::base(&[1]).unwrap());
    // b t1^3 stays
    let x = w(&[Letter::Base(2), t(1, 3)]);
    assert_eq!(britton_reduce(&x, &g).unwrap(), x);
    // b between two t0 letters is not in P_0
    let x = w(&[t(0, 1), Letter::Base(2), t(0, -1)]);
    assert_eq!(britton_reduce(&x, &g).unwrap(), x);
}

#[test]
fn identity_examples() {
    let g = t1();
    let v = is_identity(&Word::empty(), &g).unwrap();
    assert!(v.identity);
    let v = is_identity(&Word::stable(0, 3), &g).unwrap();
    assert!(!v.identity);
    let v = is_identity(&Word::base(&[1]).unwrap(), &g).unwrap();
    assert!(!v.identity);
    assert_eq!(v.reason, "ℓ=1, m₁≠1");
}

#[test]
fn presentations() {
    for (name, cusps) in [("T1-1", 1), ("T1", 2), ("T1-3", 3)] {
        let g = Group::new(toy_config(name).unwrap()).unwrap();
        let fm = folded_presentation(&g);
        assert_eq!(
            fm.generators.iter().filter(|s| s.starts_with('t')).count(),
            cusps
        );
        assert_eq!(fm.folded_relators.len(), cusps);
        for r in &fm.folded_relators {
            assert!(evaluate(r, &g).unwrap().is_identity());
        }
        let dm = double_presentation(&g).unwrap();
        assert_eq!(dm.double_relators.len(), cusps);
        assert_eq!(
            dm.generators.iter().filter(|s| s.starts_with('t')).count(),
            cusps - 1
        );
        for r in &dm.double_relators {
            let img = dm_to_fm(r, &g).unwrap();
            assert!(britton_reduce(&img, &g).unwrap().is_empty(), "{}", img);
            assert!(evaluate(&img, &g).unwrap().is_identity());
        }
    }
}

#[test]
fn dm_to_fm_basics() {
    let g = t1();
    let m = dm_to_fm(&[DmLetter::First { letter: 2 }], &g).unwrap();
    assert_eq!(m, Word::base(&[2]).unwrap());
    assert!(dm_to_fm(&[DmLetter::Stable { cusp: 0, power: 1 }], &g).is_err());
    assert!(dm_to_fm(&[DmLetter::First { letter: 7 }], &g).is_err());
}

#[test]
fn enumeration_counts() {
    let g = t1();
    assert_eq!(enumerate_reduced_words(&g, 0, 1, 1).unwrap().count(), 1);
    let l1: Vec<Word> = enumerate_reduced_words(&g, 1, 1, 1).unwrap().collect();
    assert_eq!(l1.len(), 5);
    assert_eq!(l1[1], Word::base(&[1]).unwrap());
    assert_eq!(l1[2], Word::base(&[-1]).unwrap());
    // 1 + 4 + 5*4*5
    assert_eq!(enumerate_reduced_words(&g, 3, 1, 1).unwrap().count(), 105);
    // middle syllables: 5*16 pairs minus 8 same-cusp pairs times 3 members
    assert_eq!(
        enumerate_reduced_words(&g, 5, 1, 1).unwrap().count(),
        105 + 5 * 56 * 5
    );
}

#[test]
fn enumerated_words_are_reduced_and_nontrivial() {
    let g = t1();
    for x in enumerate_reduced_words(&g, 5, 2, 1).unwrap() {
        assert_eq!(britton_reduce(&x, &g).unwrap(), x);
        let v = is_identity(&x, &g).unwrap();
        assert_eq!(v.identity, x.is_empty());
    }
}

#[test]
fn three_cusp_enumeration_is_deterministic() {
    let g = Group::new(toy_config("T1-3").unwrap()).unwrap();
    let a: Vec<Word> = enumerate_reduced_words(&g, 3, 1, 1).unwrap().collect();
    let b: Vec<Word> = enumerate_reduced_words(&g, 3, 1, 1).unwrap().collect();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1 + 6 + 7 * 6 * 7);
}

fn letter_strategy() -> impl Strategy<Value = Letter> {
    prop_oneof![
        prop::sample::select(vec![1, -1, 2, -2]).prop_map(Letter::Base),
        (0usize..2, prop::sample::select(vec![1i64, -1, 2, -2, 3])).prop_map(|(c, k)| t(c, k)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduce_idempotent_and_preserves_value(ls in prop::collection::vec(letter_strategy(), 0..14)) {
        let g = t1();
        let x = w(&ls);
        let r = britton_reduce(&x, &g).unwrap();
        prop_assert_eq!(britton_reduce(&r, &g).unwrap(), r.clone());
        prop_assert_eq!(evaluate(&r, &g).unwrap(), evaluate(&x, &g).unwrap());
        prop_assert!(syllable_length(&r) <= syllable_length(&x));
    }

    #[test]
    fn evaluate_is_multiplicative(
        a in prop::collection::vec(letter_strategy(), 0..8),
        b in prop::collection::vec(letter_strategy(), 0..8),
    ) {
        let g = t1();
        let (x, y) = (w(&a), w(&b));
        let lhs = evaluate(&x.concat(&y), &g).unwrap();
        let rhs: ExactMatrix = &evaluate(&x, &g).unwrap() * &evaluate(&y, &g).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dm_to_fm_multiplicative(
        a in prop::collection::vec(dm_letter(), 0..6),
        b in prop::collection::vec(dm_letter(), 0..6),
    ) {
        let g = Group::new(toy_config("T1-3").unwrap()).unwrap();
        let mut ab = a.clone();
        ab.extend(b.iter().copied());
        let whole = britton_reduce(&dm_to_fm(&ab, &g).unwrap(), &g).unwrap();
        let parts = dm_to_fm(&a, &g).unwrap().concat(&dm_to_fm(&b, &g).unwrap());
        prop_assert_eq!(whole, britton_reduce(&parts, &g).unwrap());
    }
}

fn dm_letter() -> impl Strategy<Value = DmLetter> {
    prop_oneof![
        prop::sample::select(vec![1, -1, 2, -2, 3, -3]).prop_map(|l| DmLetter::First { letter: l }),
        prop::sample::select(vec![1, -1, 2, -2, 3, -3])
            .prop_map(|l| DmLetter::Second { letter: l }),
        (1usize..3, prop::sample::select(vec![1i64, -1, 2]))
            .prop_map(|(c, k)| DmLetter::Stable { cusp: c, power: k }),
    ]
}
