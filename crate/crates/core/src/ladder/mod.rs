//! The staged growth ladder: score, grow, locally optimize, refine and
//! compress, with levels L0 to L5 switching mechanisms on cumulatively.
//!
//! Each preset has its own growth loop; refinement and compression are
//! shared entry points dispatching on the preset.

mod config;
mod growth;
mod scoring;

use std::collections::{BTreeSet, VecDeque};

pub use config::{LadderConfig, Lookahead, Mechanism, Piecewise, PoolStage, Preset};
pub use growth::{
    acceptance_test, lookahead_seed, mp2_angle, threshold, AcceptanceContext, Growth, RepairScope, Verdict,
    IMPROVEMENT_FLOOR,
};
pub use scoring::{build_queue, double_amplitude, score_excitation, NEGLIGIBLE_COUPLING};

use crate::error::{Error, Result};
use crate::pools::{frozen_core_filter, generate_pool, symmetry_filter, Excitation, Pool, ProductTable};
use crate::problem::Problem;
use crate::resources::{CostModel, Method, RunRecord};

/// Pool for `cycle` at the problem's bond length, with the stage's filters
/// applied at the levels that enable them.
pub fn stage_pool(problem: &Problem, cfg: &LadderConfig, cycle: usize) -> Result<Pool> {
    let bond = problem.bond_length();
    let stage = cfg
        .pool_stage(cycle, bond)
        .ok_or_else(|| Error::Config(format!("no pool stage for cycle {cycle} at {bond} A")))?;
    let mut pool = generate_pool(stage.family, problem.n_qubits(), problem.reference())?;
    if stage.symmetry && cfg.enabled(Mechanism::Scoring) {
        if let Some(irreps) = problem.integrals().irreps() {
            let table = ProductTable::for_labels(irreps)?;
            pool = symmetry_filter(pool, irreps, &table)?;
        }
    }
    if !stage.frozen_core.is_empty() && cfg.enabled(Mechanism::GrowthControl) {
        let core: BTreeSet<usize> = stage.frozen_core.iter().copied().collect();
        pool = frozen_core_filter(pool, &core, stage.relaxed_core);
    }
    Ok(pool)
}

pub fn score_pool(problem: &Problem, cfg: &LadderConfig, pool: &Pool, cost: &CostModel) -> Vec<(Excitation, f64)> {
    pool.iter()
        .map(|o| (*o, score_excitation(cfg, o, problem.integrals(), problem.bond_length(), cost)))
        .collect()
}

fn truncation(cfg: &LadderConfig, bond: f64) -> Option<usize> {
    let k = cfg.queue_truncation.eval_or(bond, 0.0);
    (k >= 1.0).then_some(k.round() as usize)
}

/// Raw pool order below the scoring level, score order from it on.
fn initial_queue(g: &mut Growth, pool: &Pool) -> VecDeque<Excitation> {
    if !g.cfg.enabled(Mechanism::Scoring) {
        return pool.iter().copied().collect();
    }
    g.mark(Mechanism::Scoring);
    let scored = score_pool(g.problem, g.cfg, pool, &g.cost);
    build_queue(&scored, g.cfg.score_eps, truncation(g.cfg, g.bond))
        .into_iter()
        .map(|(o, _)| o)
        .collect()
}

fn near_duplicate(g: &Growth, o: &Excitation) -> bool {
    let key = o.spatial_multiset();
    g.trace
        .iter()
        .rev()
        .take(g.cfg.near_duplicate_window)
        .any(|t| t.op.spatial_multiset() == key)
}

/// LiH loop: one pass over the queue, proposing each candidate once.
fn grow_lih(g: &mut Growth) -> Result<()> {
    let pool = stage_pool(g.problem, g.cfg, 0)?;
    let mut queue = initial_queue(g, &pool);
    let control = g.cfg.enabled(Mechanism::GrowthControl);
    let mut deferred = BTreeSet::new();
    while g.iteration < g.cfg.max_iterations && g.ansatz.len() < g.cfg.max_operators {
        let Some(o) = queue.pop_front() else { break };
        if control {
            g.mark(Mechanism::GrowthControl);
            if near_duplicate(g, &o) && deferred.insert(o) {
                queue.insert(queue.len() / 2, o);
                continue;
            }
        }
        g.propose(o);
    }
    Ok(())
}

fn spatial_pair_singles(o: &Excitation) -> Option<[Excitation; 2]> {
    if !o.is_paired() {
        return None;
    }
    let (i, a) = (o.from_indices()[0] / 2, o.to_indices()[0] / 2);
    Some([
        Excitation::single(2 * i, 2 * a).ok()?,
        Excitation::single(2 * i + 1, 2 * a + 1).ok()?,
    ])
}

/// H2O loop: outer pool cycles, head-slice selection with singles-first
/// warm-up and a paired-double phase at stretch.
fn grow_h2o(g: &mut Growth) -> Result<()> {
    let control = g.cfg.enabled(Mechanism::GrowthControl);
    let cycles = if control { g.cfg.cycles } else { 1 };
    let patience = g.cfg.patience.eval_or(g.bond, 0.0).round() as usize;
    for cycle in 0..cycles {
        let pool = stage_pool(g.problem, g.cfg, cycle)?;
        let mut queue: VecDeque<Excitation> = initial_queue(g, &pool)
            .into_iter()
            .filter(|o| !g.ansatz.contains(o))
            .collect();
        let head = g.cfg.head_slice.eval_or(g.bond, 0.0).round() as usize;
        let paired_phase = control && g.cfg.paired_phase_bond.is_some_and(|b| g.bond >= b);
        let mut idle = 0;
        let mut t = 0;
        let accepted_before = g.ansatz.len();
        while t < g.cfg.max_iterations && g.ansatz.len() < g.cfg.max_operators && !queue.is_empty() {
            let pick = if control {
                g.mark(Mechanism::GrowthControl);
                let slice = if head == 0 { queue.len() } else { head.min(queue.len()) };
                let paired_count = g.ansatz.ops().iter().filter(|o| o.is_paired()).count();
                let want_paired = paired_phase && paired_count < g.cfg.paired_phase_length;
                let want_single = g.ansatz.len() < g.cfg.l_s;
                let find = |pred: &dyn Fn(&Excitation) -> bool| queue.iter().take(slice).position(pred);
                let chosen = if want_paired {
                    find(&|o: &Excitation| o.is_paired())
                } else if want_single {
                    find(&|o: &Excitation| o.is_single())
                } else {
                    None
                };
                chosen.unwrap_or(0)
            } else {
                0
            };
            let o = queue.remove(pick).expect("pick lies in the queue");
            t += 1;
            let (verdict, _) = g.propose(o);
            if verdict.admitted() {
                idle = 0;
                if g.cfg.enabled(Mechanism::Optimisation) {
                    insert_matching_singles(g, &o, &mut queue);
                }
            } else {
                idle += 1;
                if control && patience > 0 && idle >= patience {
                    break;
                }
            }
        }
        if cycle > 0 && g.ansatz.len() == accepted_before {
            break;
        }
    }
    Ok(())
}

/// After a paired double `i i -> a a`, tries the spin-matched singles
/// `i -> a` right behind it.
fn insert_matching_singles(g: &mut Growth, o: &Excitation, queue: &mut VecDeque<Excitation>) {
    let Some(singles) = spatial_pair_singles(o) else { return };
    for s in singles {
        if g.ansatz.contains(&s) {
            continue;
        }
        let k = g.ansatz.len();
        let (theta, e) = g.local_update(s);
        let delta = g.energy - e;
        if g.verdict(&s, delta) == Verdict::Accept {
            g.insert(k, s, theta, e);
            queue.retain(|q| *q != s);
        }
    }
}

/// Top-ranked pool entries not already in `queue`, for supplementing or
/// injection.
fn ranked_rest(scored: &[(Excitation, f64)], queue: &VecDeque<Excitation>) -> Vec<Excitation> {
    build_queue(scored, 0.0, None)
        .into_iter()
        .map(|(o, _)| o)
        .filter(|o| !queue.contains(o))
        .collect()
}

/// F2 loop: Newton append step, look-ahead seeding, multi-pass growth with
/// recent-operator deferral, injection and stall repair.
fn grow_f2(g: &mut Growth) -> Result<()> {
    let pool = stage_pool(g.problem, g.cfg, 0)?;
    let scored = score_pool(g.problem, g.cfg, &pool, &g.cost);
    let control = g.cfg.enabled(Mechanism::GrowthControl);
    let repair = g.cfg.enabled(Mechanism::Optimisation) && g.cfg.stall_threshold > 0;
    let periodic_prune = g.cfg.enabled(Mechanism::Compression) && g.cfg.prune_period > 0;
    let passes = if control { g.cfg.max_passes } else { 1 };

    let mut queue = initial_queue(g, &pool);
    if g.cfg.enabled(Mechanism::Scoring) && queue.len() < g.cfg.min_queue {
        let extra: Vec<Excitation> = ranked_rest(&scored, &queue);
        let need = g.cfg.min_queue - queue.len();
        queue.extend(extra.into_iter().take(need));
    }

    if control {
        if let Some(la) = g.cfg.lookahead {
            g.mark(Mechanism::GrowthControl);
            let q: Vec<Excitation> = queue.iter().copied().collect();
            let idx = lookahead_seed(&g.eval, &g.ansatz, &q, la.batch, la.theta)?;
            let o = queue.remove(idx).expect("seed lies in the queue");
            g.log.push(format!("look-ahead seed {o}"));
            g.propose(o);
        }
    }

    let mut stalled = 0usize;
    let mut consecutive_rejections = 0usize;
    for pass in 0..passes {
        let mut accepted_in_pass = 0;
        if pass > 0 {
            // re-score and truncate what is left, recent operators last
            let recent: Vec<Excitation> = g
                .trace
                .iter()
                .rev()
                .take(g.cfg.recent_memory)
                .map(|t| t.op)
                .collect();
            let limit = truncation(g.cfg, g.bond);
            let mut fresh: Vec<Excitation> = build_queue(&scored, g.cfg.score_eps, limit)
                .into_iter()
                .map(|(o, _)| o)
                .collect();
            let (late, early): (Vec<Excitation>, Vec<Excitation>) = fresh.drain(..).partition(|o| recent.contains(o));
            queue = early.into_iter().chain(late).collect();
        }
        while let Some(o) = queue.pop_front() {
            if g.ansatz.len() >= g.cfg.max_operators || g.iteration >= g.cfg.max_iterations {
                break;
            }
            let (verdict, _) = g.propose(o);
            if verdict.admitted() {
                accepted_in_pass += 1;
                consecutive_rejections = 0;
                stalled = 0;
                if periodic_prune && g.ansatz.len() % g.cfg.prune_period == 0 {
                    g.mark(Mechanism::Compression);
                    prune_small(g, g.cfg.prune_tol, g.cfg.prune_budget * 0.25);
                }
                continue;
            }
            consecutive_rejections += 1;
            stalled += 1;
            if control
                && g.cfg.injection_bond.is_some_and(|b| g.bond >= b)
                && g.cfg.injection_period > 0
                && consecutive_rejections % g.cfg.injection_period == 0
            {
                if let Some(deep) = ranked_rest(&scored, &queue).into_iter().find(|d| !g.ansatz.contains(d)) {
                    g.log.push(format!("injected {deep} after {consecutive_rejections} rejections"));
                    queue.push_front(deep);
                }
            }
            if repair && stalled >= g.cfg.stall_threshold {
                stalled = 0;
                let fixed = g.stall_repair(RepairScope::Recent) || g.stall_repair(RepairScope::Broad);
                if fixed {
                    consecutive_rejections = 0;
                    g.log.push(format!("stall repair at iteration {}", g.iteration));
                }
            }
        }
        if accepted_in_pass == 0 {
            break;
        }
    }
    Ok(())
}

/// Re-optimizes all angles at fixed structure, per preset recipe.
pub fn refine_global(g: &mut Growth) {
    if g.ansatz.is_empty() {
        return;
    }
    g.mark(Mechanism::Refinement);
    match g.cfg.preset {
        Preset::Lih | Preset::Custom => {
            for _ in 0..g.cfg.refine_sweeps {
                let before = g.energy;
                for k in 0..g.ansatz.len() {
                    g.trig_coordinate(k);
                }
                if before - g.energy < g.cfg.refine_tol {
                    break;
                }
            }
        }
        Preset::H2o => {
            let mut sweeps = g.cfg.refine_sweeps;
            if g.cfg.in_critical_window(g.bond) || g.cfg.beyond_critical_window(g.bond) {
                sweeps += g.cfg.critical_extra_sweeps;
            }
            let singles: Vec<usize> = (0..g.ansatz.len()).filter(|&k| g.ansatz.ops()[k].is_single()).collect();
            let doubles: Vec<usize> = (0..g.ansatz.len()).filter(|&k| g.ansatz.ops()[k].is_double()).collect();
            for _ in 0..sweeps {
                let before = g.energy;
                for &k in singles.iter().chain(&doubles) {
                    g.parabolic_coordinate(k);
                }
                if before - g.energy < g.cfg.refine_tol {
                    break;
                }
            }
        }
        Preset::F2 => {
            for _ in 0..g.cfg.refine_sweeps {
                let before = g.energy;
                for k in 0..g.ansatz.len() {
                    g.newton_coordinate(k, 1);
                }
                if before - g.energy < g.cfg.refine_tol {
                    break;
                }
            }
            if g.cfg.aggressive_bond.is_some_and(|b| g.bond >= b) || g.energy > g.best_energy + IMPROVEMENT_FLOOR {
                for k in 0..g.ansatz.len() {
                    g.trig_coordinate(k);
                }
            }
            let n = g.ansatz.len();
            for k in n - n.min(g.cfg.suffix_length)..n {
                g.newton_coordinate(k, 4);
            }
        }
    }
}

/// Removes operators with `|theta| < tol` in ascending `|theta| * cost`
/// order while the energy stays within `budget` of its value on entry.
fn prune_small(g: &mut Growth, tol: f64, budget: f64) -> usize {
    let limit = g.energy + budget;
    let mut removed = 0;
    loop {
        let cost = g.cost;
        let mut order: Vec<(usize, f64)> = g
            .ansatz
            .iter()
            .enumerate()
            .filter(|(_, (_, t))| t.abs() < tol)
            .map(|(k, (o, t))| (k, t.abs() * cost.cost(o) as f64))
            .collect();
        order.sort_by(|a, b| a.1.total_cmp(&b.1));
        if !order.into_iter().any(|(k, _)| g.try_remove(k, limit)) {
            break;
        }
        removed += 1;
    }
    removed
}

fn nearest_snap(set: &[f64], theta: f64) -> f64 {
    set.iter()
        .copied()
        .min_by(|a, b| (a - theta).abs().total_cmp(&(b - theta).abs()).then(a.abs().total_cmp(&b.abs())))
        .unwrap_or(theta)
}

/// Snapping (LiH) or pruning (H2O, F2), then a re-evaluation of the
/// compressed ansatz.
pub fn compress(g: &mut Growth) {
    g.mark(Mechanism::Compression);
    match g.cfg.preset {
        Preset::Lih | Preset::Custom => {
            let limit = g.energy + g.cfg.snap_budget;
            let mut order: Vec<(usize, f64)> = g
                .ansatz
                .angles()
                .iter()
                .enumerate()
                .map(|(k, &t)| (k, (nearest_snap(&g.cfg.snap_set, t) - t).abs()))
                .collect();
            order.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut snapped = vec![false; g.ansatz.len()];
            for (k, _) in order {
                let target = nearest_snap(&g.cfg.snap_set, g.ansatz.angle(k));
                let candidate = g.ansatz.with_angle(k, target);
                let e = g.eval.energy(&candidate);
                if e <= limit {
                    g.ansatz = candidate;
                    g.energy = e;
                    snapped[k] = true;
                }
            }
            let keep: Vec<bool> = g.ansatz.angles().iter().map(|t| *t != 0.0).collect();
            let mut k = 0;
            let mut free = Vec::new();
            for (j, keep) in keep.into_iter().enumerate() {
                if keep {
                    if !snapped[j] {
                        free.push(k);
                    }
                    k += 1;
                } else {
                    g.ansatz.remove(k);
                }
            }
            for _ in 0..g.cfg.final_sweeps {
                for &k in &free {
                    g.trig_coordinate(k);
                }
            }
        }
        Preset::H2o => {
            let limit = g.energy + g.cfg.prune_budget;
            loop {
                let mut order: Vec<(usize, f64)> = g
                    .ansatz
                    .iter()
                    .enumerate()
                    .filter(|(_, (o, t))| o.is_double() && t.abs() < g.cfg.prune_tol)
                    .map(|(k, (_, t))| (k, t.abs()))
                    .collect();
                order.sort_by(|a, b| a.1.total_cmp(&b.1));
                if !order.into_iter().any(|(k, _)| g.try_remove(k, limit)) {
                    break;
                }
            }
        }
        Preset::F2 => {
            let tol = if g.cfg.in_critical_window(g.bond) {
                g.cfg.prune_tol_critical
            } else {
                g.cfg.prune_tol
            };
            prune_small(g, tol, g.cfg.prune_budget);
            // small-angle cleanup
            prune_small(g, 1e-6, 1e-9);
            let n = g.ansatz.len();
            for k in n - n.min(g.cfg.suffix_length)..n {
                g.newton_coordinate(k, 2);
            }
        }
    }
    g.energy = g.eval.energy(&g.ansatz);
}

/// Runs the configured preset at its level on one geometry.
pub fn run_ladder(problem: &Problem, cfg: &LadderConfig, cost: &CostModel) -> Result<RunRecord> {
    cfg.validate()?;
    let mut g = Growth::new(problem, cfg, *cost)?;
    g.mark(Mechanism::Grow);
    if cfg.max_iterations > 0 {
        match cfg.preset {
            Preset::Lih | Preset::Custom => grow_lih(&mut g)?,
            Preset::H2o => grow_h2o(&mut g)?,
            Preset::F2 => grow_f2(&mut g)?,
        }
    }
    if cfg.enabled(Mechanism::Refinement) {
        refine_global(&mut g);
    }
    if cfg.enabled(Mechanism::Compression) {
        compress(&mut g);
    }
    let energy = g.eval.energy(&g.ansatz);
    let evaluations = g.eval.evaluations();
    let branches = g.branches.iter().map(|m| m.name().to_string()).collect();
    let config = serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let mut record = RunRecord::new(
        problem.molecule(),
        problem.bond_length(),
        Method::Ladder,
        Some(cfg.level),
        g.ansatz,
        energy,
        problem.fci(),
        evaluations,
        *cost,
        g.trace,
        config,
    );
    record.branches = branches;
    record.events = g.log;
    record.stop_reason = "growth complete".into();
    Ok(record)
}
