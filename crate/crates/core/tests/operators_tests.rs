mod common;

use proptest::prelude::*;

use common::{fixture, sm};
use siegel_restrict::charmod::DirichletChar;
use siegel_restrict::exactfield::{int, rat, CycNum};
use siegel_restrict::ingest::load_character;
use siegel_restrict::operators::{
    al_scalar_wl, al_scalar_wlprime, fricke_combined, fricke_factor, mod_inverse, wl_decomposition, ALContext,
    OperatorError, Witness,
};

const PRIMES: [u64; 10] = [5, 7, 11, 13, 17, 19, 29, 31, 37, 43];

fn primitive_root(p: u64) -> u64 {
    (2..p).find(|&g| (1..p - 1).all(|e| pow_mod(g, e, p) != 1)).unwrap()
}

fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % m)
}

/// Character mod p sending a primitive root to zeta_m^e, for m dividing p - 1.
fn character(p: u64, e: i64) -> DirichletChar {
    let m = [6u64, 4, 3, 2].into_iter().find(|m| (p - 1).is_multiple_of(*m)).unwrap();
    DirichletChar::from_generators(p, m, &[(primitive_root(p), CycNum::root(m, e))]).unwrap()
}

fn coprime_sending() -> Vec<(i64, i64, i64)> {
    vec![(1, 0, 1), (1, 0, 2), (2, 1, 2), (2, 1, 3), (1, 0, 3), (1, 0, 7), (3, 1, 4)]
}

proptest! {
    #[test]
    fn decomposition_identity(li in 0usize..PRIMES.len(), lprime in 1u64..60) {
        let l = PRIMES[li];
        prop_assume!(lprime % l != 0);
        let (x, y, z, w) = wl_decomposition(l, lprime).unwrap();
        prop_assert_eq!(y, 1);
        prop_assert_eq!(x * l as i64 * w - y * lprime as i64 * z, 1);
    }

    #[test]
    fn wl_is_the_conjugate_of_chi_at_lprime(li in 0usize..PRIMES.len(), e in 0i64..6, si in 0usize..7, k in 1u32..5) {
        let l = PRIMES[li];
        let (s1, s2, s4) = coprime_sending()[si];
        let s = sm(s1, s2, s4);
        prop_assume!(!(s.det() as u64).is_multiple_of(l));
        let chi = character(l, e);
        let ctx = ALContext::new(l, k, chi.clone(), s).unwrap();
        let wl = al_scalar_wl(&ctx).unwrap().value;
        let lk = num_traits::pow(int(l as i64), k as usize);
        prop_assert_eq!(wl, chi.eval(s.det()).unwrap().conj().scale(&lk));
    }

    #[test]
    fn wl_does_not_depend_on_the_bezout_solution(li in 0usize..PRIMES.len(), lprime in 2u64..40, t in -5i64..5) {
        let l = PRIMES[li];
        prop_assume!(lprime % l != 0);
        let (_, _, z, w) = wl_decomposition(l, lprime).unwrap();
        let (l, lp) = (l as i64, lprime as i64);
        let (z2, w2) = (z + l * t, w + lp * t);
        prop_assert_eq!(l * w2 - lp * z2, 1);
        let chi = character(l as u64, 1);
        prop_assert_eq!(chi.eval(lp * z * z).unwrap(), chi.eval(lp * z2 * z2).unwrap());
    }

    #[test]
    fn inverse_is_least_positive(a in 1i64..500, m in 2i64..200) {
        prop_assume!(num_integer::Integer::gcd(&a, &m) == 1);
        let x = mod_inverse(a, m);
        prop_assert!(x > 0 && x < m);
        prop_assert_eq!((a * x).rem_euclid(m), 1);
    }
}

#[test]
fn level_13_decomposition() {
    assert_eq!(wl_decomposition(13, 2).unwrap(), (1, 1, 6, 1));
    // W_13 = [[13, 1], [156, 13]]
    let (x, y, z, w) = wl_decomposition(13, 2).unwrap();
    assert_eq!([13 * x, y, 13 * 2 * z, 13 * w], [13, 1, 156, 13]);
}

#[test]
fn level_13_scalars_and_witnesses() {
    let chi = load_character(&fixture("chi13.json")).unwrap();
    let ctx = ALContext::new(13, 2, chi.clone(), sm(1, 0, 2)).unwrap();
    let wlp = al_scalar_wlprime(&ctx).unwrap();
    assert_eq!(wlp.value, chi.eval(7).unwrap());
    assert_eq!(wlp.witness, Witness::Inverse { lhat: 1 });
    let wl = al_scalar_wl(&ctx).unwrap();
    assert_eq!(wl.value, chi.eval(7).unwrap().scale(&int(169)));
    assert_eq!(fricke_factor(&ctx).value, CycNum::from_rational(1, rat(1, 169)));
    let comb = fricke_combined(&ctx).unwrap().value;
    assert_eq!(comb, chi.eval_inv(7).unwrap().scale(&rat(1, 28561)));
    let ctx3 = ALContext::new(13, 2, chi.clone(), sm(2, 1, 2)).unwrap();
    assert_eq!(al_scalar_wlprime(&ctx3).unwrap().value, chi.eval(9).unwrap());
}

#[test]
fn trivial_character_gives_pure_powers() {
    let ctx = ALContext::new(2, 1, DirichletChar::trivial(2), sm(1, 0, 3)).unwrap();
    assert_eq!(fricke_factor(&ctx).value, CycNum::from_rational(1, rat(1, 2)));
    assert_eq!(fricke_combined(&ctx).unwrap().value, CycNum::from_rational(1, rat(1, 4)));
    assert!(al_scalar_wlprime(&ctx).unwrap().value.is_one());
    for l in PRIMES {
        let ctx = ALContext::new(l, 2, DirichletChar::trivial(l), sm(1, 0, 2)).unwrap();
        assert_eq!(al_scalar_wl(&ctx).unwrap().value, CycNum::from_int(1, (l * l) as i64));
        assert!(al_scalar_wlprime(&ctx).unwrap().value.is_one());
    }
}

#[test]
fn wlprime_depends_only_on_the_determinant() {
    let chi = load_character(&fixture("chi13.json")).unwrap();
    // [[1,0],[0,2]] and [[1,1],[1,3]] = u^t diag(1,2) u with u = [[1,1],[0,1]].
    let a = ALContext::new(13, 2, chi.clone(), sm(1, 0, 2)).unwrap();
    let b = ALContext::new(13, 2, chi, sm(1, 1, 3)).unwrap();
    assert_eq!(al_scalar_wlprime(&a).unwrap().value, al_scalar_wlprime(&b).unwrap().value);
}

#[test]
fn context_errors() {
    let chi = load_character(&fixture("chi13.json")).unwrap();
    assert!(matches!(ALContext::new(13, 2, chi.clone(), sm(1, 0, 13)), Err(OperatorError::NotCoprime { .. })));
    assert!(matches!(ALContext::new(11, 2, chi, sm(1, 0, 2)), Err(OperatorError::CharacterModulus { .. })));
    let ctx = ALContext::new(9, 2, DirichletChar::trivial(9), sm(1, 0, 2)).unwrap();
    assert!(matches!(al_scalar_wl(&ctx), Err(OperatorError::NotPrime(9))));
    assert!(al_scalar_wlprime(&ctx).unwrap().value.is_one());
    assert!(wl_decomposition(13, 26).is_err());
}

#[test]
fn scalar_json() {
    let chi = load_character(&fixture("chi13.json")).unwrap();
    let ctx = ALContext::new(13, 2, chi, sm(1, 0, 2)).unwrap();
    let v = serde_json::to_value(al_scalar_wl(&ctx).unwrap()).unwrap();
    assert_eq!(v["provenance"], "WL");
    assert_eq!(v["witness"], serde_json::json!({"x": 1, "y": 1, "z": 6, "w": 1}));
    let v = serde_json::to_value(fricke_combined(&ctx).unwrap()).unwrap();
    assert_eq!(v["provenance"], "FRICKE_COMBINED");
}
