use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opt1d::NewtonOptions;
use crate::pools::PoolFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Lih,
    H2o,
    F2,
    /// Runs the LiH growth loop with user-supplied constants.
    Custom,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lih" => Ok(Preset::Lih),
            "h2o" => Ok(Preset::H2o),
            "f2" => Ok(Preset::F2),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Lih => "lih",
            Preset::H2o => "h2o",
            Preset::F2 => "f2",
            Preset::Custom => "custom",
        })
    }
}

/// Ladder mechanisms in level order; level `L` enables the first `L + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Grow,
    Scoring,
    GrowthControl,
    Optimisation,
    Refinement,
    Compression,
}

impl Mechanism {
    pub const ALL: [Mechanism; 6] = [
        Mechanism::Grow,
        Mechanism::Scoring,
        Mechanism::GrowthControl,
        Mechanism::Optimisation,
        Mechanism::Refinement,
        Mechanism::Compression,
    ];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Grow => "grow",
            Mechanism::Scoring => "scoring",
            Mechanism::GrowthControl => "growth_control",
            Mechanism::Optimisation => "optimisation",
            Mechanism::Refinement => "refinement",
            Mechanism::Compression => "compression",
        }
    }
}

/// Piecewise-linear function of bond length, constant beyond the end
/// points. An empty table evaluates to `default`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Piecewise(pub Vec<(f64, f64)>);

impl Piecewise {
    pub fn constant(v: f64) -> Self {
        Piecewise(vec![(0.0, v)])
    }

    pub fn eval_or(&self, x: f64, default: f64) -> f64 {
        let pts = &self.0;
        match pts.len() {
            0 => default,
            1 => pts[0].1,
            _ => {
                if x <= pts[0].0 {
                    return pts[0].1;
                }
                for w in pts.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if x <= x1 {
                        return if x1 == x0 { y1 } else { y0 + (y1 - y0) * (x - x0) / (x1 - x0) };
                    }
                }
                pts[pts.len() - 1].1
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_or(x, 1.0)
    }

    fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0].0 <= w[1].0)
    }
}

/// Pool for a range of outer cycles and bond lengths. The stage used is
/// the last one whose cycle and bond range both match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolStage {
    pub family: PoolFamily,
    #[serde(default)]
    pub from_cycle: usize,
    #[serde(default)]
    pub bond_range: Option<(f64, f64)>,
    /// Frozen-core spatial orbitals; applied from the growth-control level.
    #[serde(default)]
    pub frozen_core: Vec<usize>,
    #[serde(default)]
    pub relaxed_core: bool,
    /// Point-group filter; applied from the scoring level.
    #[serde(default)]
    pub symmetry: bool,
}

impl PoolStage {
    fn matches(&self, cycle: usize, bond: f64) -> bool {
        cycle >= self.from_cycle && self.bond_range.map_or(true, |(lo, hi)| bond >= lo && bond < hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lookahead {
    /// `B`, the number of top-scored candidates probed.
    pub batch: usize,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub preset: Preset,
    pub level: u8,
    pub pool_schedule: Vec<PoolStage>,
    /// Outer cycles `K` once growth control is on; one cycle below.
    pub cycles: usize,
    /// `T`, candidate proposals per cycle.
    pub max_iterations: usize,
    /// `T_ops`, accepted-operator budget.
    pub max_operators: usize,
    /// `P_max`, passes over the queue once growth control is on.
    pub max_passes: usize,
    pub l_min: usize,
    pub l_s: usize,

    pub tau_base: f64,
    pub tau_decay: f64,
    pub tau_geometry: Piecewise,
    /// Threshold multipliers by operator type (H2O compression level).
    pub tau_single_factor: f64,
    pub tau_double_factor: f64,

    pub locality_lambda: f64,
    pub gap_delta: f64,
    pub single_weight: f64,
    pub cost_gamma: f64,
    pub paired_boost: Piecewise,
    pub weak_double_cutoff: f64,

    pub score_eps: f64,
    pub queue_truncation: Piecewise,
    pub head_slice: Piecewise,
    pub min_queue: usize,
    pub near_duplicate_window: usize,

    pub theta_test: Vec<f64>,
    /// Bond-dependent multiplier on `theta_test`.
    pub theta_test_scale: Piecewise,
    pub local_grid: Vec<f64>,
    pub single_trial_angle: Piecewise,
    /// Bond length from which growth starts with paired doubles; off when unset.
    pub paired_phase_bond: Option<f64>,
    pub paired_phase_length: usize,
    pub patience: Piecewise,

    pub lookahead: Option<Lookahead>,
    pub newton: NewtonOptions,
    pub efficiency_floor: f64,
    pub early_growth: usize,
    pub recent_memory: usize,
    pub stall_threshold: usize,
    pub injection_period: usize,
    pub injection_bond: Option<f64>,

    pub refine_sweeps: usize,
    pub refine_tol: f64,
    pub refine_spread: f64,
    pub critical_window: Option<(f64, f64)>,
    pub critical_extra_sweeps: usize,
    pub aggressive_bond: Option<f64>,
    pub suffix_length: usize,

    pub snap_set: Vec<f64>,
    pub snap_budget: f64,
    pub prune_tol: f64,
    pub prune_tol_critical: f64,
    pub prune_budget: f64,
    pub prune_period: usize,
    pub final_sweeps: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        LadderConfig {
            preset: Preset::Custom,
            level: 5,
            pool_schedule: vec![PoolStage {
                family: PoolFamily::Uccsd,
                from_cycle: 0,
                bond_range: None,
                frozen_core: vec![],
                relaxed_core: false,
                symmetry: false,
            }],
            cycles: 1,
            max_iterations: 200,
            max_operators: 40,
            max_passes: 1,
            l_min: 0,
            l_s: 0,
            tau_base: 1e-5,
            tau_decay: 1.0,
            tau_geometry: Piecewise::default(),
            tau_single_factor: 1.0,
            tau_double_factor: 1.0,
            locality_lambda: 8.0,
            gap_delta: 0.5,
            single_weight: 0.01,
            cost_gamma: 0.0,
            paired_boost: Piecewise::default(),
            weak_double_cutoff: 0.0,
            score_eps: 0.0,
            queue_truncation: Piecewise::default(),
            head_slice: Piecewise::default(),
            min_queue: 0,
            near_duplicate_window: 3,
            theta_test: vec![-0.2, -0.1, -0.05, 0.05, 0.1, 0.2],
            theta_test_scale: Piecewise::default(),
            local_grid: vec![-0.04, -0.02, -0.01, -0.005, 0.005, 0.01, 0.02, 0.04],
            single_trial_angle: Piecewise::constant(0.05),
            paired_phase_bond: None,
            paired_phase_length: 0,
            patience: Piecewise::default(),
            lookahead: None,
            newton: NewtonOptions::default(),
            efficiency_floor: 0.0,
            early_growth: 0,
            recent_memory: 0,
            stall_threshold: 0,
            injection_period: 7,
            injection_bond: None,
            refine_sweeps: 2,
            refine_tol: 1e-9,
            refine_spread: 0.05,
            critical_window: None,
            critical_extra_sweeps: 0,
            aggressive_bond: None,
            suffix_length: 0,
            snap_set: vec![0.0, PI / 8.0, -PI / 8.0, PI / 4.0, -PI / 4.0, PI / 2.0, -PI / 2.0, PI, -PI],
            snap_budget: 1e-4,
            prune_tol: 1e-3,
            prune_tol_critical: 1e-3,
            prune_budget: 1e-4,
            prune_period: 0,
            final_sweeps: 1,
        }
    }
}

impl LadderConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid ladder config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Shipped preset for `molecule` (`lih`, `h2o`, `f2`).
    pub fn preset(preset: Preset) -> Result<Self> {
        let text = match preset {
            Preset::Lih => include_str!("../../../../presets/lih.json"),
            Preset::H2o => include_str!("../../../../presets/h2o.json"),
            Preset::F2 => include_str!("../../../../presets/f2.json"),
            Preset::Custom => return Ok(LadderConfig::default()),
        };
        Self::from_json(text)
    }

    pub fn with_level(mut self, level: u8) -> Self {
        self.level = level;
        self
    }

    pub fn enabled(&self, m: Mechanism) -> bool {
        m.level() <= self.level
    }

    pub fn mechanisms(&self) -> Vec<Mechanism> {
        Mechanism::ALL.into_iter().filter(|m| self.enabled(*m)).collect()
    }

    /// Past the upper end of the critical window.
    pub fn beyond_critical_window(&self, bond: f64) -> bool {
        self.critical_window.is_some_and(|(_, hi)| bond > hi)
    }

    pub fn in_critical_window(&self, bond: f64) -> bool {
        self.critical_window.is_some_and(|(lo, hi)| bond >= lo && bond <= hi)
    }

    pub fn pool_stage(&self, cycle: usize, bond: f64) -> Option<&PoolStage> {
        self.pool_schedule.iter().rev().find(|s| s.matches(cycle, bond))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.level > 5 {
            return fail("level must be in 0..=5");
        }
        if self.pool_schedule.is_empty() {
            return fail("pool_schedule is empty");
        }
        if self.cycles == 0 || self.max_passes == 0 {
            return fail("cycles and max_passes must be at least 1");
        }
        if self.tau_base < 0.0 || !(self.tau_decay > 0.0 && self.tau_decay <= 1.0) {
            return fail("tau_base must be >= 0 and tau_decay in (0, 1]");
        }
        for (name, f) in [
            ("tau_geometry", &self.tau_geometry),
            ("queue_truncation", &self.queue_truncation),
            ("head_slice", &self.head_slice),
            ("patience", &self.patience),
            ("paired_boost", &self.paired_boost),
            ("single_trial_angle", &self.single_trial_angle),
            ("theta_test_scale", &self.theta_test_scale),
        ] {
            if !f.is_sorted() {
                return Err(Error::Config(format!("{name} breakpoints must be ascending")));
            }
        }
        if self.lookahead.is_some() && self.preset != Preset::F2 {
            return fail("look-ahead seeding is only defined for the f2 preset");
        }
        if self.stall_threshold > 0 && self.preset != Preset::F2 {
            return fail("stall repair is only defined for the f2 preset");
        }
        if self.cycles > 1 && self.preset != Preset::H2o {
            return fail("outer cycles are only defined for the h2o preset");
        }
        if let Some(la) = self.lookahead {
            if la.batch == 0 {
                return fail("look-ahead batch must be at least 1");
            }
        }
        if self.newton.delta <= 0.0 || self.newton.max_step <= 0.0 {
            return fail("newton delta and max_step must be positive");
        }
        Ok(())
    }
}
