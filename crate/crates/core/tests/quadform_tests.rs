mod common;

use proptest::prelude::*;

use common::{f, L43_SPOT};
use siegel_restrict::exactfield::{int, rat, rational_to_f64};
use siegel_restrict::quadform::{
    determining_bound, enumerate_determining, enumerate_determining_with, enumerate_with, prime_power, IndexForm,
    QuadError, Threshold,
};

/// U M U^t on the doubled matrix [[a, b], [b, c]].
fn transform(t: &IndexForm, u: [i64; 4]) -> IndexForm {
    let [p, q, r, s] = u;
    let (a, b, c) = (t.a, t.b, t.c);
    IndexForm {
        a: p * p * a + 2 * p * q * b + q * q * c,
        b: p * r * a + (p * s + q * r) * b + q * s * c,
        c: r * r * a + 2 * r * s * b + s * s * c,
    }
}

fn positive_form() -> impl Strategy<Value = IndexForm> {
    (1i64..=20, -30i64..=30, 1i64..=20)
        .prop_filter("positive definite", |&(a, b, c)| 4 * a * c > b * b)
        .prop_map(|(a, b, c)| IndexForm::new(2 * a, b, 2 * c).unwrap())
}

fn unimodular() -> impl Strategy<Value = [i64; 4]> {
    prop::collection::vec(0usize..4, 0..8).prop_map(|steps| {
        // Words in the generators of GL2(Z).
        let gens = [[1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 0], [1, 0, 0, -1]];
        steps.iter().fold([1, 0, 0, 1], |m, &g| {
            let [a, b, c, d] = m;
            let [e, f, g2, h] = gens[g];
            [a * e + b * g2, a * f + b * h, c * e + d * g2, c * f + d * h]
        })
    })
}

proptest! {
    #[test]
    fn reduction_is_a_class_invariant(t in positive_form(), u in unimodular()) {
        let v = transform(&t, u);
        prop_assert_eq!(v.det(), t.det());
        let r = t.reduce();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r.det(), t.det());
        prop_assert_eq!(v.reduce(), r);
        prop_assert_eq!(r.reduce(), r);
    }

    #[test]
    fn reduced_forms_are_their_own_reduction(a in 1i64..15, b in 0i64..15, c in 1i64..15) {
        let (a, c) = (2 * a, 2 * c);
        prop_assume!(2 * b <= a && a <= c);
        let t = IndexForm::new(a, b, c).unwrap();
        prop_assert!(t.is_reduced());
        prop_assert_eq!(t.reduce(), t);
    }
}

#[test]
fn dyadic_trace_and_reduction_examples() {
    assert_eq!(f(2, 0, 2).dyadic_trace(), int(2));
    assert_eq!(f(2, 1, 2).dyadic_trace(), rat(3, 2));
    assert_eq!(f(4, 2, 6).dyadic_trace(), int(4));
    assert_eq!(f(2, -1, 6).dyadic_trace(), rat(7, 2));
    assert!(f(2, 1, 6).is_reduced());
    assert!(!f(2, -1, 6).is_reduced());
    assert_eq!(f(6, 3, 2).reduce(), f(2, 1, 2));
    assert_eq!(f(8, 2, 2).reduce(), f(2, 0, 6));
    assert_eq!(f(2, -1, 6).reduce(), f(2, 1, 6));
}

#[test]
fn invalid_forms_are_rejected() {
    assert!(matches!(IndexForm::new(3, 0, 2), Err(QuadError::OddDiagonal(..))));
    assert!(matches!(IndexForm::new(2, 2, 2), Err(QuadError::NotPositive(..))));
    assert!(matches!(IndexForm::new(-2, 0, -2), Err(QuadError::NotPositive(..))));
}

#[test]
fn prime_powers() {
    assert_eq!(prime_power(13), Ok((13, 1)));
    assert_eq!(prime_power(9), Ok((3, 2)));
    assert_eq!(prime_power(128), Ok((2, 7)));
    for bad in [0u64, 1, 6, 12, 26, 45] {
        assert!(prime_power(bad).is_err(), "{bad}");
    }
}

/// Floating-point evaluation of the prime-power bound, used only as a cross-check.
fn bound_f64(p: u64, i: u32, k: u32) -> f64 {
    let pe = (p.pow(i)) as f64;
    let prod: f64 = (1..=i).map(|j| 1.0 + 1.0 / (p.pow(j) as f64)).product();
    1.5 + pe * (k as f64 / (3f64.sqrt() * std::f64::consts::PI) - 1.5 / pe) * prod
}

#[test]
fn certified_bound_encloses_the_float_value() {
    for (p, i, k) in [(3u64, 2u32, 2u32), (2, 3, 2), (5, 2, 2), (3, 3, 4), (2, 5, 3), (7, 2, 2)] {
        let Threshold::Certified { enclosure, .. } = determining_bound(p, i, k).unwrap() else {
            panic!("expected an enclosure for {p}^{i}");
        };
        let x = bound_f64(p, i, k);
        let (lo, hi) = (rational_to_f64(&enclosure.lo), rational_to_f64(&enclosure.hi));
        assert!(lo <= x + 1e-9 && x - 1e-9 <= hi, "{p}^{i} k={k}: {x} not in [{lo}, {hi}]");
        assert!(hi - lo < 0.25);
    }
    let x = bound_f64(3, 2, 2);
    assert!((x - 4.17848).abs() < 1e-5, "{x}");
}

#[test]
fn prime_bound_is_exact_and_strict() {
    let t = determining_bound(13, 1, 2).unwrap();
    assert_eq!(t, Threshold::Exact(rat(14, 3)));
    // (1 + 5) 2 / 6 = 2 exactly; w = 2 is excluded.
    let t5 = determining_bound(5, 1, 2).unwrap();
    assert!(!t5.admits(&int(2)).unwrap());
    assert!(t5.admits(&rat(3, 2)).unwrap());
    let sets = enumerate_with(&t5).unwrap();
    assert_eq!(sets, vec![f(2, 1, 2)]);
}

#[test]
fn bad_bound_arguments() {
    assert!(matches!(determining_bound(13, 1, 0), Err(QuadError::BadWeight)));
    assert!(determining_bound(6, 1, 2).is_err());
    assert!(enumerate_determining(12, 2).is_err());
}

fn strictly_sorted(v: &[IndexForm]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

#[test]
fn determining_sets_are_sorted_reduced_and_below_the_bound() {
    for (level, k) in [(13u64, 2u32), (9, 2), (43, 2), (11, 4), (8, 2), (25, 2)] {
        let det = enumerate_determining(level, k).unwrap();
        assert!(strictly_sorted(&det.forms));
        for t in &det.forms {
            assert!(t.is_reduced());
            assert!(det.threshold.admits(&t.dyadic_trace()).unwrap());
        }
    }
}

#[test]
fn level_43_counts() {
    let strict = enumerate_determining(43, 2).unwrap();
    let program = enumerate_determining_with(43, 2, Threshold::unhalved(int(29))).unwrap();
    assert_eq!(strict.forms.len(), 255);
    assert_eq!(program.forms.len(), 234);
    let extra: Vec<_> = strict.forms.iter().filter(|t| !program.forms.contains(t)).collect();
    assert_eq!(extra.len(), 21);
    assert!(extra.iter().all(|t| t.dyadic_trace() == rat(29, 2)));
    for (a, b, c) in L43_SPOT {
        assert!(program.forms.contains(&f(a, b, c)));
    }
}

#[test]
fn level_9_override_matches_the_default() {
    let default = enumerate_determining(9, 2).unwrap();
    let over = enumerate_determining_with(9, 2, Threshold::unhalved(rat(17, 2))).unwrap();
    assert_eq!(default.forms, over.forms);
    assert_eq!(default.forms.len(), 10);
}

#[test]
fn brute_force_agrees_with_enumeration() {
    let det = enumerate_determining(13, 2).unwrap();
    let mut brute = Vec::new();
    for a in (2..=20).step_by(2) {
        for c in (2..=20).step_by(2) {
            for b in -20..=20 {
                let t = IndexForm { a, b, c };
                if a * c > b * b && t.is_reduced() && t.dyadic_trace() < rat(14, 3) {
                    brute.push(t);
                }
            }
        }
    }
    brute.sort();
    assert_eq!(det.forms, brute);
}

#[test]
fn json_shape() {
    let det = enumerate_determining(13, 2).unwrap();
    let v: serde_json::Value = serde_json::to_value(&det).unwrap();
    assert_eq!(v["level"], 13);
    assert_eq!(v["forms"][0], serde_json::json!([2, 0, 2]));
    let t: IndexForm = serde_json::from_str("[4, 2, 6]").unwrap();
    assert_eq!(t, f(4, 2, 6));
    assert!(serde_json::from_str::<IndexForm>("[3, 0, 2]").is_err());
}
