//! Acceptance report: one PASS/FAIL line per criterion, at the stated
//! tolerances. Exits nonzero when a criterion fails that is not listed in
//! `KNOWN_RED`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use adaptforge::baselines::{adapt_vqe, full_reoptimize, qeb_adapt_vqe, AdaptConfig, QebConfig};
use adaptforge::exact::fci_energy;
use adaptforge::fixtures::load_fixture;
use adaptforge::hamio::{hf_energy, jw_transform};
use adaptforge::ladder::{run_ladder, LadderConfig, Preset};
use adaptforge::opt1d::{gradient_1d, reconstruct_1d};
use adaptforge::pools::{generate_pool, Excitation, PoolFamily};
use adaptforge::resources::{CostModel, RunRecord};
use adaptforge::statevector::State;
use adaptforge::{Ansatz, Problem, CHEMICAL_PRECISION};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

/// Criteria that fail for documented reasons; reported, never hidden.
const KNOWN_RED: &[&str] = &["baseline precision"];

struct Report {
    lines: Vec<(&'static str, bool, String)>,
    records: Vec<RunRecord>,
}

impl Report {
    fn check(&mut self, name: &'static str, budget: Duration, f: impl FnOnce(&mut Vec<RunRecord>) -> (bool, String)) {
        let t = Instant::now();
        let (ok, detail) = f(&mut self.records);
        let elapsed = t.elapsed();
        let ok = ok && elapsed <= budget;
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {detail} [{:.1}s of {}s]", elapsed.as_secs_f64(), budget.as_secs());
        self.lines.push((name, ok, detail));
    }
}

fn fixtures() -> PathBuf {
    common::fixtures()
}

fn load(molecule: &str, r: f64) -> Problem {
    Problem::load(&fixtures(), molecule, r).unwrap()
}

fn oracle_equivalence() -> (bool, String) {
    let ints = load_fixture(&fixtures(), "h2", 0.7414).unwrap();
    let h = jw_transform(&ints).unwrap();
    let dense = h.to_dense().map(|z| z.re);
    let jw = common::sorted_eigenvalues(dense.clone());
    let fermionic = common::sorted_eigenvalues(common::fermionic_matrix(&ints));
    let spectrum = jw.iter().zip(&fermionic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let fci = (fci_energy(&h, 2, Some(0)).unwrap() - jw[0]).abs();
    let state = State::init_hf(4, ints.hf_occupation()).unwrap();
    let hf = (state.expectation(&h).unwrap() - hf_energy(&ints)).abs();
    (
        spectrum <= 1e-9 && fci <= 1e-10 && hf <= 1e-10,
        format!("spectrum {spectrum:.1e}, fci {fci:.1e}, hf {hf:.1e}"),
    )
}

fn random_state(n: usize, rng: &mut impl Rng) -> State {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    State::from_amplitudes(n, amps).unwrap()
}

fn random_gate(n: usize, rng: &mut impl Rng) -> Excitation {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    if rng.gen_bool(0.5) {
        Excitation::double([idx[0], idx[1]], [idx[2], idx[3]]).unwrap()
    } else {
        Excitation::single(idx[0], idx[1]).unwrap()
    }
}

fn gap(a: &State, b: &State) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn gate_correctness() -> (bool, String) {
    let mut rng = common::rng(1);
    let n = 6;
    let mut state = random_state(n, &mut rng);
    let n0 = state.number_expectation();
    let (mut norm_err, mut number_err) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let e = random_gate(n, &mut rng);
        state = state.apply_excitation(&e, rng.gen_range(-3.2..3.2)).unwrap();
        norm_err = norm_err.max((state.norm() - 1.0).abs());
        number_err = number_err.max((state.number_expectation() - n0).abs());
    }
    let mut oracle_err = 0.0f64;
    let mut group_err = 0.0f64;
    for _ in 0..20 {
        let s = random_state(n, &mut rng);
        let e = random_gate(n, &mut rng);
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let got = s.clone().apply_excitation(&e, a).unwrap();
        let u: DMatrix<f64> = (common::excitation_generator(n, e.from_indices(), e.to_indices()) * a).exp();
        let re = &u * DVector::from_iterator(1 << n, s.amplitudes().iter().map(|z| z.re));
        let im = &u * DVector::from_iterator(1 << n, s.amplitudes().iter().map(|z| z.im));
        let want = State::from_amplitudes(n, re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect()).unwrap();
        oracle_err = oracle_err.max(gap(&got, &want));
        let two = got.clone().apply_excitation(&e, b).unwrap();
        group_err = group_err.max(gap(&two, &s.clone().apply_excitation(&e, a + b).unwrap()));
        group_err = group_err.max(gap(&got.apply_excitation(&e, -a).unwrap(), &s));
    }
    (
        norm_err <= 1e-10 && number_err <= 1e-10 && oracle_err <= 1e-10 && group_err <= 1e-12,
        format!("norm {norm_err:.1e}, number {number_err:.1e}, oracle {oracle_err:.1e}, group {group_err:.1e}"),
    )
}

fn optimizer_fidelity() -> (bool, String) {
    let p = load("lih", 1.5);
    let eval = p.evaluator().unwrap();
    let pool = generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap();
    let mut rng = common::rng(4);
    let mut a = Ansatz::new();
    for _ in 0..6 {
        a.push(*pool.excitations.choose(&mut rng).unwrap(), rng.gen_range(-0.8..0.8));
    }
    let (mut fit, mut grad_rel) = (0.0f64, 0.0f64);
    for k in 0..a.len() {
        let f = |t: f64| eval.compute(&a.with_angle(k, t));
        let l = reconstruct_1d(f, a.angle(k));
        for _ in 0..50 {
            let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            fit = fit.max((l.value(t) - f(t)).abs());
        }
        let t = a.angle(k);
        let g = gradient_1d(&l, t);
        let fd = (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
        if g.abs() > 1e-4 {
            grad_rel = grad_rel.max((g - fd).abs() / g.abs());
        }
    }
    let h2 = load("h2", 0.7414);
    let h2_eval = h2.evaluator().unwrap();
    let d = Ansatz::new().with(Excitation::double([0, 1], [2, 3]).unwrap(), 0.0);
    let reopt = (full_reoptimize(&h2_eval, &d, &[0.0]).energy - h2.fci()).abs();
    (
        fit <= 1e-9 && grad_rel <= 1e-6 && reopt <= 1e-8,
        format!("fit {fit:.1e}, gradient rel {grad_rel:.1e}, H2 reoptimize {reopt:.1e}"),
    )
}

fn baselines(records: &mut Vec<RunRecord>) -> (bool, String) {
    let cost = CostModel::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [1.5, 2.0] {
        let p = load("lih", r);
        let pool = generate_pool(PoolFamily::Uccsd, p.n_qubits(), p.reference()).unwrap();
        let adapt = adapt_vqe(&p, &pool, &AdaptConfig::default(), &cost).unwrap();
        let qeb = qeb_adapt_vqe(&p, &pool, &QebConfig::for_molecule("lih"), &cost).unwrap();
        let ladder = run_ladder(&p, &LadderConfig::preset(Preset::Lih).unwrap(), &cost).unwrap();
        let precise = adapt.error <= CHEMICAL_PRECISION && qeb.error <= CHEMICAL_PRECISION;
        let ordered = qeb.evaluations >= adapt.evaluations;
        let above_ladder = adapt.evaluations > ladder.evaluations && qeb.evaluations > ladder.evaluations;
        ok &= precise && ordered && above_ladder;
        parts.push(format!(
            "R={r}: adapt {:.3} mHa/{} evals, qeb {:.3} mHa/{} evals, ladder {} evals{}",
            adapt.error_mha(),
            adapt.evaluations,
            qeb.error_mha(),
            qeb.evaluations,
            ladder.evaluations,
            if ordered { "" } else { " (qeb < adapt)" }
        ));
        records.extend([adapt, qeb, ladder]);
    }
    (ok, parts.join("; "))
}

fn ladder_precision(records: &mut Vec<RunRecord>) -> (bool, String) {
    let cfg = LadderConfig::preset(Preset::Lih).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [1.5, 2.0, 2.5] {
        let rec = run_ladder(&load("lih", r), &cfg, &CostModel::default()).unwrap();
        ok &= rec.error <= CHEMICAL_PRECISION && rec.evaluations <= 2000 && rec.n_operators <= 12;
        parts.push(format!("R={r}: {:.3} mHa, {} evals, {} ops", rec.error_mha(), rec.evaluations, rec.n_operators));
        records.push(rec);
    }
    (ok, parts.join("; "))
}

fn ablation_shape(records: &mut Vec<RunRecord>) -> (bool, String) {
    let base = LadderConfig::preset(Preset::Lih).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let p = load("lih", r);
        let recs: Vec<RunRecord> = (0..=5u8)
            .map(|l| run_ladder(&p, &base.clone().with_level(l), &CostModel::default()).unwrap())
            .collect();
        let (l4, l5) = (&recs[4], &recs[5]);
        ok &= l5.two_qubit_gates <= l4.two_qubit_gates && l5.error <= CHEMICAL_PRECISION;
        if r == 2.5 {
            ok &= recs[..4].iter().all(|x| x.error > CHEMICAL_PRECISION) && l4.error <= CHEMICAL_PRECISION;
            let errs: Vec<String> = recs.iter().map(|x| format!("{:.2}", x.error_mha())).collect();
            parts.push(format!("R=2.5 errors L0..L5 [{}] mHa", errs.join(", ")));
        }
        parts.push(format!("R={r}: gates L4 {} -> L5 {}", l4.two_qubit_gates, l5.two_qubit_gates));
        records.extend(recs);
    }
    (ok, parts.join("; "))
}

fn determinism() -> (bool, String) {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_adaptforge"))
            .args(["ablate", "--molecule", "lih", "--bonds", "1.5,2.0,2.5", "--fixtures-dir"])
            .arg(fixtures())
            .env_remove("ADAPTFORGE_FIXTURES")
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let (a, b) = (run(), run());
    (a == b, format!("{} bytes, {} rows, identical: {}", a.len(), a.iter().filter(|&&c| c == b'\n').count() - 1, a == b))
}

fn scale_check(records: &mut Vec<RunRecord>) -> (bool, String) {
    let cfg = LadderConfig::preset(Preset::F2).unwrap();
    let near = run_ladder(&load("f2", 1.5), &cfg, &CostModel::default()).unwrap();
    let far = run_ladder(&load("f2", 2.6), &cfg, &CostModel::default()).unwrap();
    let ok = near.error <= CHEMICAL_PRECISION && far.error <= CHEMICAL_PRECISION && far.n_operators < near.n_operators;
    let detail = format!(
        "R=1.5: {:.3} mHa, {} ops; R=2.6: {:.3} mHa, {} ops; {} qubits",
        near.error_mha(),
        near.n_operators,
        far.error_mha(),
        far.n_operators,
        load("f2", 1.5).n_qubits()
    );
    records.extend([near, far]);
    (ok, detail)
}

fn remaining_matrix(records: &mut Vec<RunRecord>) {
    for (molecule, bonds) in [("h2o", &[1.0, 1.5, 2.0][..]), ("f2", &[1.5, 2.0, 2.6])] {
        let base = LadderConfig::preset(molecule.parse().unwrap()).unwrap();
        for &r in bonds {
            let p = load(molecule, r);
            for l in 0..=5u8 {
                records.push(run_ladder(&p, &base.clone().with_level(l), &CostModel::default()).unwrap());
            }
        }
    }
    let h2 = load("h2", 0.7414);
    let pool = generate_pool(PoolFamily::Uccsd, 4, h2.reference()).unwrap();
    records.push(adapt_vqe(&h2, &pool, &AdaptConfig::default(), &CostModel::default()).unwrap());
    records.push(qeb_adapt_vqe(&h2, &pool, &QebConfig::for_molecule("h2"), &CostModel::default()).unwrap());
}

fn main() {
    // Accept and ignore libtest-style arguments.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut report = Report {
        lines: Vec::new(),
        records: Vec::new(),
    };
    let min = |m: u64| Duration::from_secs(60 * m);
    report.check("oracle equivalence", min(1), |_| oracle_equivalence());
    report.check("gate correctness", min(1), |_| gate_correctness());
    report.check("optimizer fidelity", min(1), |_| optimizer_fidelity());
    report.check("baseline precision", min(10), baselines);
    report.check("ladder precision", min(15), ladder_precision);
    report.check("ablation shape", min(30), ablation_shape);
    report.check("variational bound", min(30), |records| {
        remaining_matrix(records);
        let worst = records
            .iter()
            .map(|r| r.final_energy - r.fci_energy)
            .fold(f64::INFINITY, f64::min);
        (worst >= -1e-9, format!("{} runs, min E - E_FCI = {worst:.2e}", records.len()))
    });
    report.check("determinism", min(30), |_| determinism());
    report.check("scale check", min(60), scale_check);

    let failed: Vec<&str> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    let unexpected: Vec<&&str> = failed.iter().filter(|n| !KNOWN_RED.contains(n)).collect();
    println!(
        "acceptance: {} of {} criteria pass; failing: {:?}",
        report.lines.len() - failed.len(),
        report.lines.len(),
        failed
    );
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
