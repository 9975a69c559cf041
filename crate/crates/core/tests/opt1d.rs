//! One-dimensional optimizers on real ansatz slices and random landscapes.

mod common;

use adaptforge::opt1d::{gradient_1d, minimize_1d, newton_1d, parabolic_1d, reconstruct_1d, NewtonOptions, TrigLandscape};
use adaptforge::pools::{generate_pool, PoolFamily};
use adaptforge::{Ansatz, Problem};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// LiH ansatz with a mix of singles and doubles at random angles.
fn lih_slice(r: f64, seed: u64) -> (Problem, Ansatz) {
    let p = Problem::load(&common::fixtures(), "lih", r).unwrap();
    let pool = generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap();
    let mut rng = common::rng(seed);
    let mut a = Ansatz::new();
    for _ in 0..6 {
        a.push(*pool.excitations.choose(&mut rng).unwrap(), rng.gen_range(-0.8..0.8));
    }
    (p, a)
}

#[test]
fn reconstruction_reproduces_random_direct_evaluations() {
    for (r, seed) in [(1.5, 1), (2.5, 2)] {
        let (p, a) = lih_slice(r, seed);
        let eval = p.evaluator().unwrap();
        let mut rng = common::rng(seed + 100);
        for k in 0..a.len() {
            let theta0 = a.angle(k);
            let l = reconstruct_1d(|t| eval.energy(&a.with_angle(k, t)), theta0);
            for _ in 0..50 {
                let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let direct = eval.compute(&a.with_angle(k, t));
                assert!((l.value(t) - direct).abs() < 1e-9, "op {k} at {t}");
            }
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let (p, a) = lih_slice(2.0, 5);
    let eval = p.evaluator().unwrap();
    let h = 1e-5;
    let mut checked = 0;
    for k in 0..a.len() {
        let t = a.angle(k);
        let f = |x: f64| eval.compute(&a.with_angle(k, x));
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        let g = gradient_1d(&reconstruct_1d(f, t), t);
        if g.abs() > 1e-4 {
            assert!((g - fd).abs() <= 1e-6 * g.abs(), "op {k}: {g} vs {fd}");
            checked += 1;
        }
    }
    assert!(checked >= 3);
}

#[test]
fn evaluation_budgets() {
    let (p, a) = lih_slice(1.5, 9);
    let eval = p.evaluator().unwrap();
    let f = |t: f64| eval.energy(&a.with_angle(0, t));
    let before = eval.evaluations();
    reconstruct_1d(f, 0.37);
    assert_eq!(eval.evaluations() - before, 5);
    let before = eval.evaluations();
    newton_1d(f, 0.11, NewtonOptions::default());
    assert_eq!(eval.evaluations() - before, 3);
    let before = eval.evaluations();
    parabolic_1d(f, -0.23, 0.05);
    assert_eq!(eval.evaluations() - before, 3);
    // The incumbent sample is shared with an earlier evaluation.
    let before = eval.evaluations();
    reconstruct_1d(f, 0.11);
    assert_eq!(eval.evaluations() - before, 4);
}

#[test]
fn parabolic_step_agrees_with_bracketed_minimum() {
    let mut rng = common::rng(17);
    for _ in 0..40 {
        let theta0 = rng.gen_range(-2.0..2.0);
        let m = theta0 + rng.gen_range(-0.08..0.08);
        let amp = rng.gen_range(0.1..2.0);
        let f = |t: f64| 0.3 - amp * (t - m).cos();
        let got = parabolic_1d(f, theta0, 0.05);
        let (lo, hi) = (theta0 - 0.1, theta0 + 0.1);
        let bracket = (0..=20_000)
            .map(|k| lo + (hi - lo) * k as f64 / 20_000.0)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        assert!((got - bracket).abs() < 1e-3, "{got} vs {bracket}");
    }
}

fn landscape() -> impl Strategy<Value = TrigLandscape> {
    (-2.0..2.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(c0, c1, s1, c2, s2)| TrigLandscape { c0, c1, s1, c2, s2 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimum_beats_a_fine_scan(l in landscape()) {
        let (_, e) = minimize_1d(&l);
        let (_, scanned) = common::scan_min(|t| l.value(t), 100_000);
        prop_assert!(e <= scanned + 1e-10, "{e} > {scanned}");
    }

    #[test]
    fn minimum_never_exceeds_the_incumbent(l in landscape(), theta0 in -3.0..3.0f64) {
        let rebuilt = reconstruct_1d(|t| l.value(t), theta0);
        let (theta, e) = minimize_1d(&rebuilt);
        prop_assert!(e <= l.value(theta0) + 1e-12);
        prop_assert!((e - l.value(theta)).abs() < 1e-12);
        prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&theta));
    }

    #[test]
    fn reconstruction_recovers_coefficients(l in landscape(), theta0 in -3.0..3.0f64) {
        let r = reconstruct_1d(|t| l.value(t), theta0);
        for (a, b) in [(r.c0, l.c0), (r.c1, l.c1), (r.s1, l.s1), (r.c2, l.c2), (r.s2, l.s2)] {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
