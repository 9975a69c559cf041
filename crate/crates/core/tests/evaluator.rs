//! Sector evaluator against the dense statevector path, the cache and
//! counter contract, and pool conservation laws.

mod common;

use std::collections::BTreeSet;

use adaptforge::hamio::hf_energy;
use adaptforge::pools::{generate_pool, Excitation, Pool, PoolFamily};
use adaptforge::statevector::{EnergyEvaluator, State};
use adaptforge::{Ansatz, Problem};
use rand::seq::SliceRandom;
use rand::Rng;

fn problem(molecule: &str, r: f64) -> Problem {
    Problem::load(&common::fixtures(), molecule, r).unwrap()
}

fn random_ansatz(pool: &Pool, len: usize, rng: &mut impl Rng) -> Ansatz {
    let ops: Vec<Excitation> = (0..len).map(|_| *pool.excitations.choose(rng).unwrap()).collect();
    let angles = (0..len).map(|_| rng.gen_range(-1.5..1.5)).collect();
    Ansatz::from_parts(ops, angles)
}

#[test]
fn sector_and_dense_backends_agree() {
    let mut rng = common::rng(3);
    for (molecule, r, cases) in [("h2", 0.7414, 10), ("lih", 1.5, 8), ("lih", 2.5, 4), ("h2o", 1.0, 2)] {
        let p = problem(molecule, r);
        let sector = p.evaluator().unwrap();
        let dense = EnergyEvaluator::dense(p.hamiltonian().clone(), p.reference()).unwrap();
        let pool = generate_pool(PoolFamily::Uccgsd, p.n_qubits(), p.reference()).unwrap();
        for _ in 0..cases {
            let a = random_ansatz(&pool, rng.gen_range(1..8), &mut rng);
            let (es, ed) = (sector.energy(&a), dense.energy(&a));
            assert!((es - ed).abs() < 1e-10, "{molecule} {r}: {es} vs {ed}");
            assert!(es >= p.fci() - 1e-9);
        }
    }
}

#[test]
fn sector_amplitudes_embed_the_dense_state() {
    let p = problem("lih", 2.0);
    let eval = p.evaluator().unwrap();
    let pool = generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap();
    let a = random_ansatz(&pool, 6, &mut common::rng(1));
    let dense = eval.state(&a).unwrap();
    let sector = eval.sector_amplitudes(&a);
    let basis = adaptforge::exact::sector_basis(12, 4, Some(0));
    let mut covered = 0.0;
    for (x, b) in sector.iter().zip(&basis) {
        let d = dense.amplitudes()[*b as usize];
        assert!((d.re - x).abs() < 1e-12 && d.im.abs() < 1e-12);
        covered += x * x;
    }
    assert!((covered - 1.0).abs() < 1e-12);
}

#[test]
fn counter_and_cache_contract() {
    let p = problem("h2", 0.7414);
    let eval = p.evaluator().unwrap();
    let empty = Ansatz::new();
    assert!((eval.energy(&empty) - hf_energy(p.integrals())).abs() < 1e-10);
    assert_eq!(eval.evaluations(), 1);
    eval.energy(&empty);
    assert_eq!(eval.evaluations(), 1);

    let d = Excitation::double([0, 1], [2, 3]).unwrap();
    // An appended operator at zero is the incumbent.
    eval.energy(&empty.with(d, 0.0));
    assert_eq!(eval.evaluations(), 1);
    eval.energy(&empty.with(d, 0.3));
    eval.energy(&empty.with(d, 0.3));
    assert_eq!(eval.evaluations(), 2);
    // Uncounted paths leave the counter alone.
    eval.compute(&empty.with(d, 0.4));
    assert_eq!(eval.evaluations(), 2);
}

#[test]
fn h2_double_at_scanned_optimum_reaches_fci() {
    let p = problem("h2", 0.7414);
    let eval = p.evaluator().unwrap();
    let d = Excitation::double([0, 1], [2, 3]).unwrap();
    let f = |t: f64| eval.compute(&Ansatz::new().with(d, t));
    let (t0, _) = common::scan_min(f, 20_000);
    let step = 2.0 * std::f64::consts::PI / 20_000.0;
    let (t1, _) = common::scan_min(|u| f(t0 + step * u / std::f64::consts::PI), 20_000);
    let best = f(t0 + step * t1 / std::f64::consts::PI);
    assert!((best - p.fci()).abs() < 1e-8, "{} vs {}", best, p.fci());
}

#[test]
fn invalid_excitations_are_rejected_before_evaluation() {
    let p = problem("h2", 0.7414);
    let eval = p.evaluator().unwrap();
    let spin_flip = Excitation::single(0, 1).unwrap();
    assert!(eval.energy_of_ansatz(&Ansatz::new().with(spin_flip, 0.1)).is_err());
    let out_of_range = Excitation::single(0, 6).unwrap();
    assert!(eval.energy_of_ansatz(&Ansatz::new().with(out_of_range, 0.1)).is_err());
    assert_eq!(eval.evaluations(), 0);
}

#[test]
fn every_pool_gate_conserves_number_and_spin() {
    for (molecule, r) in [("h2", 0.7414), ("lih", 1.5), ("h2o", 1.0)] {
        let p = problem(molecule, r);
        let hf = State::init_hf(p.n_qubits(), p.reference()).unwrap();
        let (n0, s0) = (hf.number_expectation(), hf.spin_expectation());
        for family in [PoolFamily::Uccsd, PoolFamily::Uccgsd, PoolFamily::Kupccgsd] {
            let pool = generate_pool(family, p.n_qubits(), p.reference()).unwrap();
            for e in pool.iter() {
                let out = hf.clone().apply_excitation(e, 0.7).unwrap();
                assert!((out.number_expectation() - n0).abs() < 1e-12, "{e}");
                assert!((out.spin_expectation() - s0).abs() < 1e-12, "{e}");
            }
        }
    }
}

#[test]
fn uccsd_is_contained_in_uccgsd_and_generation_is_deterministic() {
    for (molecule, r) in [("h2", 0.7414), ("lih", 2.0), ("f2", 1.5)] {
        let p = problem(molecule, r);
        let sd = generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap();
        let gsd = generate_pool(PoolFamily::Uccgsd, p.n_qubits(), p.reference()).unwrap();
        let general: BTreeSet<Excitation> = gsd.iter().copied().collect();
        assert!(sd.iter().all(|e| general.contains(e)), "{molecule}");
        assert_eq!(sd, generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap());
        assert_eq!(gsd, generate_pool(PoolFamily::Uccgsd, p.n_qubits(), p.reference()).unwrap());
    }
}
