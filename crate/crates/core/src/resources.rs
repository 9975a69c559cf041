//! Two-qubit gate cost model and per-run result records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pools::Excitation;
use crate::CHEMICAL_PRECISION;

/// Two-qubit gates per compiled excitation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub two_qubit_per_single: u32,
    pub two_qubit_per_double: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            two_qubit_per_single: 2,
            two_qubit_per_double: 13,
        }
    }
}

impl CostModel {
    pub fn new(two_qubit_per_single: u32, two_qubit_per_double: u32) -> Result<Self> {
        if two_qubit_per_single == 0 || two_qubit_per_double == 0 {
            return Err(Error::Config("gate costs must be at least 1".into()));
        }
        Ok(CostModel {
            two_qubit_per_single,
            two_qubit_per_double,
        })
    }

    pub fn cost(&self, e: &Excitation) -> u32 {
        if e.is_single() {
            self.two_qubit_per_single
        } else {
            self.two_qubit_per_double
        }
    }
}

/// Parses `"single,double"`, e.g. `2,13`.
impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::Config(format!("cost model must be `single,double`, got `{s}`")));
        };
        let parse = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::Config(format!("invalid gate count `{t}` in cost model")))
        };
        CostModel::new(parse(a)?, parse(b)?)
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.two_qubit_per_single, self.two_qubit_per_double)
    }
}

pub fn gate_cost(ansatz: &Ansatz, model: &CostModel) -> u64 {
    ansatz.ops().iter().map(|e| model.cost(e) as u64).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Adapt,
    Qeb,
    Ladder,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adapt" => Ok(Method::Adapt),
            "qeb" => Ok(Method::Qeb),
            "ladder" => Ok(Method::Ladder),
            other => Err(Error::Config(format!("unknown method `{other}` (expected adapt, qeb or ladder)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Adapt => "adapt",
            Method::Qeb => "qeb",
            Method::Ladder => "ladder",
        })
    }
}

/// One accepted growth step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub op: Excitation,
    pub theta: f64,
    pub delta_e: f64,
    /// Accepted through the minimum-length override rather than the threshold.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub molecule: String,
    pub bond_length: f64,
    pub method: Method,
    pub level: Option<u8>,
    pub final_energy: f64,
    pub fci_energy: f64,
    pub error: f64,
    pub n_operators: usize,
    pub evaluations: u64,
    pub two_qubit_gates: u64,
    pub cost_model: CostModel,
    pub accepted_trace: Vec<TraceEntry>,
    pub ansatz: Ansatz,
    /// Mechanism branches that executed, in ladder order.
    #[serde(default)]
    pub branches: Vec<String>,
    /// False when an inner optimizer hit its iteration cap.
    pub converged: bool,
    #[serde(default)]
    pub stop_reason: String,
    /// Notable solver events (seeding, injections, repairs).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<String>,
    pub config: serde_json::Value,
}

pub const CSV_HEADER: &str = "molecule,bond_length,method,level,energy,fci,error_mha,n_ops,evals,two_qubit_gates";

impl RunRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        molecule: &str,
        bond_length: f64,
        method: Method,
        level: Option<u8>,
        ansatz: Ansatz,
        final_energy: f64,
        fci_energy: f64,
        evaluations: u64,
        cost_model: CostModel,
        accepted_trace: Vec<TraceEntry>,
        config: serde_json::Value,
    ) -> Self {
        RunRecord {
            molecule: molecule.to_string(),
            bond_length,
            method,
            level,
            final_energy,
            fci_energy,
            error: final_energy - fci_energy,
            n_operators: ansatz.len(),
            evaluations,
            two_qubit_gates: gate_cost(&ansatz, &cost_model),
            cost_model,
            accepted_trace,
            ansatz,
            branches: Vec::new(),
            converged: true,
            stop_reason: String::new(),
            events: Vec::new(),
            config,
        }
    }

    pub fn error_mha(&self) -> f64 {
        self.error * 1e3
    }

    pub fn within_precision(&self) -> bool {
        self.error <= CHEMICAL_PRECISION
    }

    /// CSV row matching [`CSV_HEADER`]. With `precision_only`, the resource
    /// columns are left blank when the run misses chemical precision.
    pub fn csv_row(&self, precision_only: bool) -> String {
        let level = self.level.map(|l| l.to_string()).unwrap_or_default();
        let head = format!(
            "{},{},{},{},{:.10},{:.10},{:.4}",
            self.molecule,
            crate::hamio::bond_label(self.bond_length),
            self.method,
            level,
            self.final_energy,
            self.fci_energy,
            self.error_mha()
        );
        if precision_only && !self.within_precision() {
            format!("{head},,,")
        } else {
            format!("{head},{},{},{}", self.n_operators, self.evaluations, self.two_qubit_gates)
        }
    }
}
