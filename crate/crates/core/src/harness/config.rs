use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::advice::ErrorPolicy;
use crate::bounds::QueryBudget;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Ts,
    TsRobust,
    Bidding,
    BiddingRobust,
    Knapsack,
    Fpb,
}

impl Problem {
    pub const ALL: [Problem; 6] =
        [Problem::Ts, Problem::TsRobust, Problem::Bidding, Problem::BiddingRobust, Problem::Knapsack, Problem::Fpb];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Ts => "ts",
            Problem::TsRobust => "ts_robust",
            Problem::Bidding => "bidding",
            Problem::BiddingRobust => "bidding_robust",
            Problem::Knapsack => "knapsack",
            Problem::Fpb => "fpb",
        }
    }

    /// Robust problems keep a guarantee even when `eta > H`.
    pub fn is_robust(self) -> bool {
        matches!(self, Problem::TsRobust | Problem::BiddingRobust)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown problem {s:?}; expected one of ts, ts_robust, bidding, bidding_robust, knapsack, fpb")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFamily {
    /// The lower-bound families (or the threshold grid for bidding).
    #[default]
    Adversarial,
    /// Seeded random instances.
    Random,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub jsonl: Option<PathBuf>,
}

fn default_policies() -> Vec<ErrorPolicy> {
    vec![ErrorPolicy::None]
}

/// One experiment sweep over the cartesian product of `k` and `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub k: Vec<u32>,
    #[serde(rename = "H")]
    pub h: Vec<u32>,
    #[serde(default = "default_policies")]
    pub policies: Vec<ErrorPolicy>,
    /// Cap on adaptive lies; defaults to `H`.
    #[serde(default)]
    pub lie_cap: Option<u32>,
    #[serde(default)]
    pub family: InstanceFamily,
    /// Number of random instances.
    #[serde(default = "defaults::instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    /// Time-series price range.
    #[serde(default = "defaults::m")]
    pub m: f64,
    #[serde(rename = "M", default = "defaults::big_m")]
    pub big_m: f64,
    /// Knapsack density range.
    #[serde(rename = "L", default = "defaults::l")]
    pub l: f64,
    #[serde(rename = "U", default = "defaults::u")]
    pub u: f64,
    #[serde(default = "defaults::rho")]
    pub rho: f64,
    /// Robust bidding target ratio.
    #[serde(default = "defaults::r")]
    pub r: f64,
    /// Bidding base; defaults to the optimal one (or 2 for fpb).
    #[serde(default)]
    pub b: Option<f64>,
    /// Fault-tolerant bidding: numbers of sequences and of faults.
    #[serde(default = "defaults::p")]
    pub p: Vec<u32>,
    #[serde(default = "defaults::phi")]
    pub phi: Vec<u32>,
    /// Threshold grid size for bidding.
    #[serde(default = "defaults::grid")]
    pub grid: usize,
    /// Knapsack item granularity (`1/granularity` per item).
    #[serde(default = "defaults::granularity")]
    pub granularity: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

mod defaults {
    pub fn instances() -> usize {
        20
    }
    pub fn m() -> f64 {
        1.0
    }
    pub fn big_m() -> f64 {
        100.0
    }
    pub fn l() -> f64 {
        1.0
    }
    pub fn u() -> f64 {
        16.0
    }
    pub fn rho() -> f64 {
        0.75
    }
    pub fn r() -> f64 {
        6.0
    }
    pub fn p() -> Vec<u32> {
        vec![2, 3]
    }
    pub fn phi() -> Vec<u32> {
        vec![1]
    }
    pub fn grid() -> usize {
        10_000
    }
    pub fn granularity() -> u64 {
        1000
    }
}

impl ExperimentConfig {
    /// Defaults for everything except the problem and the `(k, H)` sweep.
    pub fn new(problem: Problem, k: Vec<u32>, h: Vec<u32>) -> Self {
        ExperimentConfig {
            problem,
            k,
            h,
            policies: default_policies(),
            lie_cap: None,
            family: InstanceFamily::default(),
            instances: defaults::instances(),
            seed: 0,
            m: defaults::m(),
            big_m: defaults::big_m(),
            l: defaults::l(),
            u: defaults::u(),
            rho: defaults::rho(),
            r: defaults::r(),
            b: None,
            p: defaults::p(),
            phi: defaults::phi(),
            grid: defaults::grid(),
            granularity: defaults::granularity(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Every `(k, H)` pair of the sweep, in order, each with `2H <= k`.
    pub fn budgets(&self) -> Result<Vec<QueryBudget>> {
        let mut out = Vec::new();
        for &k in &self.k {
            for &h in &self.h {
                out.push(QueryBudget::new(k, h).map_err(|_| Error::Config(format!("(k={k}, H={h}) violates 2H <= k")))?);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.k.is_empty() || self.h.is_empty() {
            return bad("k and H ranges must be nonempty".into());
        }
        self.budgets()?;
        if self.policies.is_empty() {
            return bad("at least one error policy is required".into());
        }
        if !(self.m > 0.0 && self.big_m > self.m && self.big_m.is_finite()) {
            return bad(format!("need 0 < m < M, got m={}, M={}", self.m, self.big_m));
        }
        if !(self.l > 0.0 && self.u > self.l && self.u.is_finite()) {
            return bad(format!("need 0 < L < U, got L={}, U={}", self.l, self.u));
        }
        if !(self.rho > 0.5 && self.rho <= 1.0) {
            return bad(format!("rho must lie in (1/2, 1], got {}", self.rho));
        }
        if !(self.r >= 4.0 && self.r.is_finite()) {
            return bad(format!("r must be finite and >= 4, got {}", self.r));
        }
        if let Some(b) = self.b {
            if !(b > 1.0 && b.is_finite()) {
                return bad(format!("base b must exceed 1, got {b}"));
            }
        }
        if self.grid == 0 || self.granularity == 0 {
            return bad("grid and granularity must be positive".into());
        }
        if self.problem == Problem::Fpb {
            for &p in &self.p {
                for &phi in &self.phi {
                    if p == 0 || phi >= p {
                        return bad(format!("fpb needs 0 <= phi < p, got p={p}, phi={phi}"));
                    }
                }
            }
        }
        Ok(())
    }
}
