//! Growth state and the per-step primitives shared by the preset loops.

use std::collections::BTreeSet;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::hamio::fermionic_sign;
use crate::opt1d::{golden_section_1d, minimize_1d, newton_1d, parabolic_1d, reconstruct_1d};
use crate::pools::Excitation;
use crate::problem::Problem;
use crate::resources::{CostModel, TraceEntry};
use crate::statevector::EnergyEvaluator;

use super::config::{LadderConfig, Mechanism, Preset};
use super::scoring::double_amplitude;

/// Energy rise treated as "no change" when judging repairs and sweeps.
pub const IMPROVEMENT_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// Below threshold but admitted by the minimum-length rule.
    Forced,
    Reject,
}

impl Verdict {
    pub fn admitted(self) -> bool {
        self != Verdict::Reject
    }
}

/// Everything `acceptance_test` looks at besides `delta_e`.
#[derive(Clone, Copy, Debug)]
pub struct AcceptanceContext {
    pub ansatz_len: usize,
    pub iteration: usize,
    pub bond: f64,
    pub is_double: bool,
    pub gate_cost: u32,
}

/// Threshold in effect at growth iteration `t`.
pub fn threshold(cfg: &LadderConfig, ctx: &AcceptanceContext) -> f64 {
    if !cfg.enabled(Mechanism::GrowthControl) {
        return cfg.tau_base;
    }
    let mut tau = cfg.tau_base * cfg.tau_decay.powi(ctx.iteration as i32) * cfg.tau_geometry.eval(ctx.bond);
    if cfg.preset == Preset::H2o && cfg.enabled(Mechanism::Compression) {
        tau *= if ctx.is_double { cfg.tau_double_factor } else { cfg.tau_single_factor };
    }
    tau
}

pub fn acceptance_test(cfg: &LadderConfig, delta_e: f64, ctx: &AcceptanceContext) -> Verdict {
    let tau = threshold(cfg, ctx);
    let mut pass = delta_e > tau;
    if cfg.preset == Preset::F2 && cfg.enabled(Mechanism::GrowthControl) {
        let efficient = ctx.ansatz_len == 0 || delta_e / ctx.gate_cost.max(1) as f64 >= cfg.efficiency_floor;
        let early = ctx.ansatz_len < cfg.early_growth && delta_e > 0.0;
        pass = (pass && efficient) || early;
    }
    if pass {
        Verdict::Accept
    } else if ctx.ansatz_len < cfg.l_min {
        Verdict::Forced
    } else {
        Verdict::Reject
    }
}

/// Qubit-excitation angle matching the sign of the first-order amplitude
/// of a double on the reference; zero for singles.
pub fn mp2_angle(problem: &Problem, o: &Excitation) -> f64 {
    if !o.is_double() {
        return 0.0;
    }
    let t = double_amplitude(problem.integrals(), o);
    let occ = problem.reference().mask();
    let (from, to) = (o.from_indices(), o.to_indices());
    let sign = fermionic_sign(occ, from, to)
        .or_else(|| fermionic_sign(occ, to, from).map(|s| -s))
        .unwrap_or(1.0);
    sign * t
}

/// Mutable state of one ladder run.
pub struct Growth<'a> {
    pub problem: &'a Problem,
    pub cfg: &'a LadderConfig,
    pub cost: CostModel,
    pub eval: EnergyEvaluator,
    pub bond: f64,
    pub ansatz: Ansatz,
    pub energy: f64,
    pub best_energy: f64,
    pub trace: Vec<TraceEntry>,
    pub iteration: usize,
    pub branches: BTreeSet<Mechanism>,
    pub log: Vec<String>,
}

impl<'a> Growth<'a> {
    pub fn new(problem: &'a Problem, cfg: &'a LadderConfig, cost: CostModel) -> Result<Self> {
        let eval = problem.evaluator()?;
        let ansatz = Ansatz::new();
        let energy = eval.energy(&ansatz);
        Ok(Growth {
            problem,
            cfg,
            cost,
            eval,
            bond: problem.bond_length(),
            ansatz,
            energy,
            best_energy: energy,
            trace: Vec::new(),
            iteration: 0,
            branches: BTreeSet::new(),
            log: Vec::new(),
        })
    }

    pub fn mark(&mut self, m: Mechanism) {
        self.branches.insert(m);
    }

    pub fn level(&self) -> u8 {
        self.cfg.level
    }

    fn trial(&self, o: Excitation) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.eval.energy(&self.ansatz.with(o, t))
    }

    fn coordinate(&self, k: usize) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.eval.energy(&self.ansatz.with_angle(k, t))
    }

    /// Angle and trial energy for appending `o`, by the preset's local
    /// update at the current level.
    pub fn local_update(&mut self, o: Excitation) -> (f64, f64) {
        let optimise = self.cfg.enabled(Mechanism::Optimisation);
        if optimise {
            self.mark(Mechanism::Optimisation);
        }
        match (self.cfg.preset, optimise) {
            (Preset::Lih | Preset::Custom, false) => golden_section_1d(self.trial(o), 0.0, 0.1, 1e-5),
            (Preset::Lih | Preset::Custom, true) => {
                let warm = mp2_angle(self.problem, &o);
                let l = reconstruct_1d(self.trial(o), warm);
                let (theta, _) = minimize_1d(&l);
                (theta, self.eval.energy(&self.ansatz.with(o, theta)))
            }
            (Preset::H2o, false) => {
                let theta = if o.is_double() {
                    mp2_angle(self.problem, &o)
                } else {
                    self.cfg.single_trial_angle.eval_or(self.bond, 0.05)
                };
                (theta, self.eval.energy(&self.ansatz.with(o, theta)))
            }
            (Preset::H2o, true) => self.scan_update(o),
            (Preset::F2, _) => {
                let theta = newton_1d(self.trial(o), 0.0, self.cfg.newton);
                (theta, self.eval.energy(&self.ansatz.with(o, theta)))
            }
        }
    }

    /// Best of the test-angle set (plus the MP2 angle for doubles), then the
    /// best point of a denser grid around it.
    fn scan_update(&self, o: Excitation) -> (f64, f64) {
        let f = self.trial(o);
        let scale = self.cfg.theta_test_scale.eval(self.bond);
        let mut angles: Vec<f64> = self.cfg.theta_test.iter().map(|t| t * scale).collect();
        if o.is_double() {
            angles.push(mp2_angle(self.problem, &o));
        }
        let mut best = (0.0, self.energy);
        for &t in &angles {
            let e = f(t);
            if e < best.1 {
                best = (t, e);
            }
        }
        let centre = best.0;
        for &d in &self.cfg.local_grid {
            let e = f(centre + d);
            if e < best.1 {
                best = (centre + d, e);
            }
        }
        best
    }

    pub fn verdict(&self, o: &Excitation, delta_e: f64) -> Verdict {
        acceptance_test(
            self.cfg,
            delta_e,
            &AcceptanceContext {
                ansatz_len: self.ansatz.len(),
                iteration: self.iteration,
                bond: self.bond,
                is_double: o.is_double(),
                gate_cost: self.cost.cost(o),
            },
        )
    }

    pub fn append(&mut self, o: Excitation, theta: f64, energy: f64, verdict: Verdict) {
        self.trace.push(TraceEntry {
            op: o,
            theta,
            delta_e: self.energy - energy,
            forced: verdict == Verdict::Forced,
        });
        self.ansatz.push(o, theta);
        self.set_energy(energy);
    }

    pub fn insert(&mut self, k: usize, o: Excitation, theta: f64, energy: f64) {
        self.trace.push(TraceEntry {
            op: o,
            theta,
            delta_e: self.energy - energy,
            forced: false,
        });
        self.ansatz.insert(k, o, theta);
        self.set_energy(energy);
    }

    fn set_energy(&mut self, e: f64) {
        self.energy = e;
        self.best_energy = self.best_energy.min(e);
    }

    /// Proposes `o`, runs the local update and the acceptance test, and
    /// appends on success. Returns the verdict and the realized improvement.
    pub fn propose(&mut self, o: Excitation) -> (Verdict, f64) {
        let (theta, e) = self.local_update(o);
        let delta = self.energy - e;
        let v = self.verdict(&o, delta);
        if v.admitted() {
            self.append(o, theta, e, v);
        }
        self.iteration += 1;
        (v, delta)
    }

    /// Sets angle `k` to `theta` if that lowers the energy.
    fn try_angle(&mut self, k: usize, theta: f64) -> bool {
        let candidate = self.ansatz.with_angle(k, theta);
        let e = self.eval.energy(&candidate);
        if e < self.energy {
            self.ansatz = candidate;
            self.set_energy(e);
            true
        } else {
            false
        }
    }

    /// Exact one-dimensional minimization of coordinate `k`.
    pub fn trig_coordinate(&mut self, k: usize) {
        let l = reconstruct_1d(self.coordinate(k), self.ansatz.angle(k));
        let (theta, _) = minimize_1d(&l);
        self.try_angle(k, theta);
    }

    /// Up to `iterations` clipped Newton steps on coordinate `k`.
    pub fn newton_coordinate(&mut self, k: usize, iterations: usize) {
        for _ in 0..iterations {
            let theta0 = self.ansatz.angle(k);
            let theta = newton_1d(self.coordinate(k), theta0, self.cfg.newton);
            if (theta - theta0).abs() < 1e-9 || !self.try_angle(k, theta) {
                break;
            }
        }
    }

    pub fn parabolic_coordinate(&mut self, k: usize) {
        let theta = parabolic_1d(self.coordinate(k), self.ansatz.angle(k), self.cfg.refine_spread);
        self.try_angle(k, theta);
    }

    /// Newton repair of the most recent angles, or of all of them for the
    /// broad scope. Returns true when the energy dropped.
    pub fn stall_repair(&mut self, scope: RepairScope) -> bool {
        if self.ansatz.is_empty() {
            return false;
        }
        let before = self.energy;
        let n = self.ansatz.len();
        let start = match scope {
            RepairScope::Recent => n - n.min(4),
            RepairScope::Broad => 0,
        };
        for k in start..n {
            self.newton_coordinate(k, 4);
        }
        before - self.energy > IMPROVEMENT_FLOOR
    }

    /// Removes operator `k` if the energy then stays within `limit`.
    pub fn try_remove(&mut self, k: usize, limit: f64) -> bool {
        let mut candidate = self.ansatz.clone();
        candidate.remove(k);
        let e = self.eval.energy(&candidate);
        if e <= limit {
            self.ansatz = candidate;
            self.energy = e;
            true
        } else {
            false
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairScope {
    Recent,
    Broad,
}

/// Probes the first `batch` queue entries once each at `theta` on top of
/// the incumbent and returns the queue index with the lowest energy; ties
/// keep queue order.
pub fn lookahead_seed(eval: &EnergyEvaluator, ansatz: &Ansatz, queue: &[Excitation], batch: usize, theta: f64) -> Result<usize> {
    if queue.is_empty() {
        return Err(Error::EmptyQueue);
    }
    if batch <= 1 {
        return Ok(0);
    }
    let mut best = (0, f64::INFINITY);
    for (i, o) in queue.iter().take(batch).enumerate() {
        let e = eval.energy(&ansatz.with(*o, theta));
        if e < best.1 {
            best = (i, e);
        }
    }
    Ok(best.0)
}
