//! Truth sources for the hidden problem parameter, wrapped with pluggable
//! error-injection policies.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::QueryBudget;
use crate::error::{Error, Result};
use crate::games::{play, Outlook, Query, Questioner, Responder};

/// The hidden value a truthful responder answers about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truth {
    Index(u64),
    Real(BigRational),
}

impl Truth {
    pub fn answer(&self, query: &Query) -> bool {
        match self {
            Truth::Index(x) => query.holds_for(*x),
            Truth::Real(x) => query.holds_for_real(x),
        }
    }
}

/// How responses deviate from the truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ErrorPolicy {
    None,
    /// Lie exactly at these query indices.
    Fixed(Vec<usize>),
    /// Lie at `eta` distinct indices drawn with a seeded generator.
    Random { eta: usize, seed: u64 },
    /// Lie whenever the lie leaves the questioner more weight, within the cap.
    Greedy,
    /// Choose the lie pattern (within the cap) that maximises damage.
    Minimax,
}

impl fmt::Display for ErrorPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorPolicy::None => write!(f, "none"),
            ErrorPolicy::Fixed(p) => write!(f, "fixed:[{}]", p.iter().join(",")),
            ErrorPolicy::Random { eta, seed } => write!(f, "random:eta={eta},seed={seed}"),
            ErrorPolicy::Greedy => write!(f, "greedy"),
            ErrorPolicy::Minimax => write!(f, "minimax"),
        }
    }
}

impl FromStr for ErrorPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!(
            "unknown error policy {s:?}; expected none, fixed:[i,...], random:eta=E,seed=S, greedy or minimax"
        ));
        let s = s.trim();
        match s {
            "none" => return Ok(ErrorPolicy::None),
            "greedy" => return Ok(ErrorPolicy::Greedy),
            "minimax" => return Ok(ErrorPolicy::Minimax),
            _ => {}
        }
        if let Some(list) = s.strip_prefix("fixed:") {
            let inner = list.trim().strip_prefix('[').and_then(|l| l.strip_suffix(']')).ok_or_else(bad)?;
            let positions = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(ErrorPolicy::Fixed(positions));
        }
        if let Some(args) = s.strip_prefix("random:") {
            let (mut eta, mut seed) = (None, None);
            for part in args.split(',') {
                match part.trim().split_once('=') {
                    Some(("eta", v)) => eta = Some(v.trim().parse().map_err(|_| bad())?),
                    Some(("seed", v)) => seed = Some(v.trim().parse().map_err(|_| bad())?),
                    _ => return Err(bad()),
                }
            }
            return match (eta, seed) {
                (Some(eta), Some(seed)) => Ok(ErrorPolicy::Random { eta, seed }),
                _ => Err(bad()),
            };
        }
        Err(bad())
    }
}

impl TryFrom<String> for ErrorPolicy {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ErrorPolicy> for String {
    fn from(p: ErrorPolicy) -> String {
        p.to_string()
    }
}

/// What the oracle actually did in a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub eta: usize,
    pub positions: Vec<usize>,
    pub exceeded_tolerance: bool,
    pub seed: Option<u64>,
}

/// Upper limit on lie patterns a minimax plan may enumerate.
pub const MINIMAX_PATTERN_LIMIT: u64 = 1 << 17;

/// A response source: truth plus error policy.
#[derive(Debug, Clone)]
pub struct AdviceOracle {
    truth: Truth,
    policy: ErrorPolicy,
    budget: QueryBudget,
    lie_cap: u32,
    planned: Option<BTreeSet<usize>>,
    lies: Vec<usize>,
}

/// A truthful oracle (`eta = 0`) about `truth`.
pub fn make_truth_oracle(truth: Truth, budget: QueryBudget) -> AdviceOracle {
    AdviceOracle {
        truth,
        policy: ErrorPolicy::None,
        budget,
        lie_cap: budget.h,
        planned: Some(BTreeSet::new()),
        lies: Vec::new(),
    }
}

/// Wraps `oracle` with `policy`. Fixed positions must be below `k`, and a
/// random policy cannot lie more than `k` times.
pub fn inject_errors(oracle: AdviceOracle, policy: ErrorPolicy) -> Result<AdviceOracle> {
    let k = oracle.budget.k as usize;
    let planned = match &policy {
        ErrorPolicy::None => Some(BTreeSet::new()),
        ErrorPolicy::Fixed(p) => {
            if let Some(bad) = p.iter().find(|&&i| i >= k) {
                return Err(Error::domain(format!("fixed lie position {bad} is not below k={k}")));
            }
            Some(p.iter().copied().collect())
        }
        ErrorPolicy::Random { eta, seed } => {
            if *eta > k {
                return Err(Error::domain(format!("cannot place eta={eta} lies among k={k} queries")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Some(rand::seq::index::sample(&mut rng, k, *eta).into_iter().collect())
        }
        ErrorPolicy::Greedy | ErrorPolicy::Minimax => None,
    };
    Ok(AdviceOracle { policy, planned, lies: Vec::new(), ..oracle })
}

impl AdviceOracle {
    pub fn new(truth: Truth, budget: QueryBudget, policy: ErrorPolicy) -> Result<Self> {
        inject_errors(make_truth_oracle(truth, budget), policy)
    }

    /// Caps adaptive (greedy/minimax) lies; defaults to `H`.
    pub fn with_lie_cap(mut self, cap: u32) -> Self {
        self.lie_cap = cap;
        self
    }

    /// Removes the tolerance cap: adaptive policies may lie on every query.
    pub fn full_strength(self) -> Self {
        let k = self.budget.k;
        self.with_lie_cap(k)
    }

    pub fn budget(&self) -> QueryBudget {
        self.budget
    }

    pub fn truth(&self) -> &Truth {
        &self.truth
    }

    pub fn policy(&self) -> &ErrorPolicy {
        &self.policy
    }

    pub fn lies(&self) -> &[usize] {
        &self.lies
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            eta: self.lies.len(),
            positions: self.lies.clone(),
            exceeded_tolerance: self.lies.len() > self.budget.h as usize,
            seed: match self.policy {
                ErrorPolicy::Random { seed, .. } => Some(seed),
                _ => None,
            },
        }
    }

    /// Resets per-session state and, for minimax, fixes the lie pattern
    /// that maximises `damage` against this (deterministic) questioner.
    pub fn plan<Q: Questioner>(&mut self, questioner: &Q, damage: &dyn Fn(&Q::Output) -> f64) -> Result<()> {
        self.lies.clear();
        if self.policy != ErrorPolicy::Minimax {
            return Ok(());
        }
        let k = self.budget.k as usize;
        let cap = (self.lie_cap as usize).min(k);
        let patterns: u64 = (0..=cap).map(|j| binomial(k as u64, j as u64)).sum();
        if patterns > MINIMAX_PATTERN_LIMIT {
            return Err(Error::NodeCap { cap: MINIMAX_PATTERN_LIMIT });
        }
        let mut best: Option<(f64, BTreeSet<usize>)> = None;
        for size in 0..=cap {
            for combo in (0..k).combinations(size) {
                let mut fixed = FixedLies { truth: &self.truth, lies: combo.iter().copied().collect() };
                let (out, _) = play(questioner.clone(), &mut fixed, self.budget);
                let d = damage(&out);
                if best.as_ref().is_none_or(|(b, _)| d > *b) {
                    best = Some((d, fixed.lies));
                }
            }
        }
        self.planned = best.map(|(_, set)| set);
        Ok(())
    }
}

struct FixedLies<'a> {
    truth: &'a Truth,
    lies: BTreeSet<usize>,
}

impl Responder for FixedLies<'_> {
    fn respond(&mut self, step: usize, query: &Query, _: &Outlook) -> bool {
        self.truth.answer(query) ^ self.lies.contains(&step)
    }
}

impl Responder for AdviceOracle {
    fn respond(&mut self, step: usize, query: &Query, outlook: &Outlook) -> bool {
        let truth = self.truth.answer(query);
        let lie = match &self.planned {
            Some(set) => set.contains(&step),
            None => {
                let (w_truth, w_lie) = if truth {
                    (&outlook.yes, &outlook.no)
                } else {
                    (&outlook.no, &outlook.yes)
                };
                (self.lies.len() as u32) < self.lie_cap && w_lie > w_truth
            }
        };
        if lie {
            self.lies.push(step);
        }
        truth ^ lie
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
