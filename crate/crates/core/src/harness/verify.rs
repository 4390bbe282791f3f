//! Exhaustive checks of the questioners over every answer sequence, with
//! leaf predicates computed independently of the questioners' own state.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bounds::{ceil_div, mu_bounds, partial_binomial_sum, pow2, QueryBudget};
use crate::error::{Error, Result};
use crate::games::{
    comparison_lie_runs, continuous_target, cyclic_rank, lies_against, min_cyclic_guarantee,
    min_cyclic_questioner, play_search, real_lies, search_floor, weighting_questioner,
    ContinuousQuestioner, Entry, Query, Questioner, SearchStrategy, ThresholdRule, MAX_DISCRETE_K,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyScope {
    Identify,
    Continuous,
    MinCyclic,
    SearchAdversary,
}

impl VerifyScope {
    pub fn name(self) -> &'static str {
        match self {
            VerifyScope::Identify => "identify",
            VerifyScope::Continuous => "continuous",
            VerifyScope::MinCyclic => "min_cyclic",
            VerifyScope::SearchAdversary => "search_adversary",
        }
    }
}

impl fmt::Display for VerifyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyScope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [VerifyScope::Identify, VerifyScope::Continuous, VerifyScope::MinCyclic, VerifyScope::SearchAdversary]
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown scope {s:?}; expected identify, continuous, min_cyclic or search_adversary")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyLimits {
    pub max_k: u32,
    pub max_h: u32,
    /// Largest search-space size (`m` for identify, `n` otherwise).
    pub max_n: u64,
    /// Total tree nodes visited before giving up.
    pub node_cap: u64,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        VerifyLimits { max_k: 8, max_h: 2, max_n: 64, node_cap: 20_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub case: String,
    pub answers: Vec<Entry>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scope: VerifyScope,
    pub cases: u64,
    pub nodes: u64,
    pub leaves: u64,
    /// False when the node cap cut the search short.
    pub complete: bool,
    pub counterexamples: Vec<Counterexample>,
    pub notes: Vec<String>,
    /// Continuous scope only: widest output interval per budget.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hulls: Vec<HullCheck>,
}

/// Widest interval output against `<<k-H,H>>/2^(k-H)`, the width an interval
/// answer would need. Informational: the measure bound is what is guaranteed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullCheck {
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u32,
    pub widest: String,
    pub interval_bound: String,
    pub within: bool,
}

impl VerifyReport {
    fn new(scope: VerifyScope) -> Self {
        VerifyReport { scope, cases: 0, nodes: 0, leaves: 0, complete: true, counterexamples: Vec::new(), notes: Vec::new(), hulls: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.complete && self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TreeStats {
    pub nodes: u64,
    pub leaves: u64,
    pub complete: bool,
}

/// Leaf callback: the questioner's output and the answers leading to it.
pub type LeafFn<'a, O> = dyn FnMut(&O, &[(Query, bool)]) + 'a;

/// Walks every answer sequence of `root`, calling `leaf` with the output
/// and the answers. Stops once `node_cap` nodes have been visited.
pub fn explore<Q: Questioner>(root: &Q, node_cap: u64, leaf: &mut LeafFn<'_, Q::Output>) -> TreeStats {
    fn walk<Q: Questioner>(
        q: Q,
        path: &mut Vec<(Query, bool)>,
        stats: &mut TreeStats,
        cap: u64,
        leaf: &mut LeafFn<'_, Q::Output>,
    ) {
        if stats.nodes >= cap {
            stats.complete = false;
            return;
        }
        stats.nodes += 1;
        let Some(query) = q.next_query() else {
            stats.leaves += 1;
            leaf(&q.finish(), path);
            return;
        };
        for answer in [true, false] {
            let mut child = q.clone();
            child.absorb(&query, answer);
            path.push((query.clone(), answer));
            walk(child, path, stats, cap, leaf);
            path.pop();
        }
    }
    let mut stats = TreeStats { complete: true, ..TreeStats::default() };
    walk(root.clone(), &mut Vec::new(), &mut stats, node_cap, leaf);
    stats
}

fn entries(answers: &[(Query, bool)]) -> Vec<Entry> {
    answers.iter().map(|(query, response)| Entry { query: query.clone(), response: *response }).collect()
}

fn absorb_stats(report: &mut VerifyReport, stats: TreeStats) {
    report.cases += 1;
    report.nodes += stats.nodes;
    report.leaves += stats.leaves;
    report.complete &= stats.complete;
}

fn budgets(limits: &VerifyLimits) -> Vec<QueryBudget> {
    let mut out = Vec::new();
    for k in 0..=limits.max_k.min(MAX_DISCRETE_K) {
        for h in 0..=limits.max_h.min(k / 2) {
            out.push(QueryBudget::new(k, h).expect("2H <= k"));
        }
    }
    out
}

/// Checks an identification questioner over `1..=m`: at every leaf the
/// candidates with at most `H` lies (counted independently) must be empty
/// or exactly the output.
pub fn verify_identify_questioner<Q>(q: &Q, m: u64, budget: QueryBudget, node_cap: u64, report: &mut VerifyReport)
where
    Q: Questioner<Output = Option<u64>>,
{
    let case = format!("m={m} k={} H={}", budget.k, budget.h);
    let mut found = Vec::new();
    let stats = explore(q, node_cap, &mut |out, answers| {
        let consistent: Vec<(u64, u64)> = comparison_lie_runs(1, m, answers)
            .into_iter()
            .filter(|r| r.2 <= budget.h)
            .map(|r| (r.0, r.1))
            .collect();
        let count: u64 = consistent.iter().map(|(lo, hi)| hi - lo + 1).sum();
        let ok = match (count, out) {
            (0, _) => true,
            (1, Some(x)) => consistent[0].0 == *x,
            _ => false,
        };
        if !ok && found.len() < 4 {
            found.push(Counterexample {
                case: case.clone(),
                answers: entries(answers),
                detail: format!("output {out:?} but {count} consistent candidates in {consistent:?}"),
            });
        }
    });
    absorb_stats(report, stats);
    report.counterexamples.extend(found);
}

fn verify_identify(limits: &VerifyLimits) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyScope::Identify);
    for budget in budgets(limits) {
        let mu = mu_bounds(budget).lower;
        let top = u64::try_from(&mu).unwrap_or(u64::MAX).min(limits.max_n);
        for m in 1..=top {
            let left = limits.node_cap.saturating_sub(report.nodes);
            let q = weighting_questioner(m, budget).expect("k within discrete range");
            verify_identify_questioner(&q, m, budget, left, &mut report);
            if !report.complete {
                return report;
            }
        }
    }
    report
}

/// Measure of `{x in (0,1] : lies(x) <= H}` computed from the breakpoints
/// of the answered thresholds.
pub fn consistent_measure(answers: &[(Query, bool)], h: u32) -> BigRational {
    let mut cuts: Vec<BigRational> = answers
        .iter()
        .filter_map(|(q, _)| match q {
            Query::LeReal(a) if *a > BigRational::zero() && *a < BigRational::one() => Some(a.clone()),
            _ => None,
        })
        .collect();
    cuts.push(BigRational::zero());
    cuts.push(BigRational::one());
    cuts.sort();
    cuts.dedup();
    let two = BigRational::from_integer(BigInt::from(2));
    cuts.windows(2)
        .filter(|w| real_lies(&((&w[0] + &w[1]) / &two), answers) <= h)
        .map(|w| &w[1] - &w[0])
        .sum()
}

fn verify_continuous(limits: &VerifyLimits) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyScope::Continuous);
    for budget in budgets(limits) {
        let target = continuous_target(budget);
        let q = ContinuousQuestioner::new(budget, ThresholdRule::Balanced).expect("valid budget");
        let case = format!("k={} H={}", budget.k, budget.h);
        let mut found = Vec::new();
        let mut widest = BigRational::zero();
        let left = limits.node_cap.saturating_sub(report.nodes);
        let stats = explore(&q, left, &mut |out, answers| {
            let measure = consistent_measure(answers, budget.h);
            if let Some((lo, hi)) = &out.interval {
                widest = widest.clone().max(hi - lo);
            }
            if (measure != target || out.consistent_measure != measure) && found.len() < 4 {
                found.push(Counterexample {
                    case: case.clone(),
                    answers: entries(answers),
                    detail: format!("measure {measure} (reported {}) but target {target}", out.consistent_measure),
                });
            }
        });
        absorb_stats(&mut report, stats);
        report.counterexamples.extend(found);
        report.notes.push(format!("{case}: consistent measure {target} at every leaf; widest hull {widest}"));
        let free = budget.k - budget.h;
        let sum = partial_binomial_sum(u64::from(free), u64::from(budget.h)).expect("H <= k-H");
        let bound = BigRational::new(sum.into(), pow2(free).into());
        report.hulls.push(HullCheck {
            k: budget.k,
            h: budget.h,
            within: widest <= bound,
            widest: widest.to_string(),
            interval_bound: bound.to_string(),
        });
        if !report.complete {
            break;
        }
    }
    report
}

fn verify_min_cyclic(limits: &VerifyLimits) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyScope::MinCyclic);
    'outer: for budget in budgets(limits) {
        for n in 1..=limits.max_n {
            let guarantee = min_cyclic_guarantee(n, budget);
            let q = match min_cyclic_questioner(n, budget) {
                Ok(q) => q,
                Err(e) => {
                    report.notes.push(format!("n={n} k={} H={}: skipped ({e})", budget.k, budget.h));
                    continue;
                }
            };
            let case = format!("n={n} k={} H={}", budget.k, budget.h);
            let mut found = Vec::new();
            let left = limits.node_cap.saturating_sub(report.nodes);
            let stats = explore(&q, left, &mut |out, answers| {
                let worst = (0..n)
                    .filter(|&x| lies_against(x, answers) <= budget.h)
                    .map(|x| cyclic_rank(*out, x, n))
                    .max();
                if let Some(rank) = worst.filter(|&r| r > guarantee) {
                    if found.len() < 4 {
                        found.push(Counterexample {
                            case: case.clone(),
                            answers: entries(answers),
                            detail: format!("output {out} has rank {rank} > {guarantee}"),
                        });
                    }
                }
            });
            absorb_stats(&mut report, stats);
            report.counterexamples.extend(found);
            if !report.complete {
                break 'outer;
            }
        }
    }
    report
}

/// `ceil(n <<k,H>> / 2^k) - 1`, the rank the adversary provably forces.
pub fn search_provable_floor(n: u64, budget: QueryBudget) -> u64 {
    let c = ceil_div(&(num_bigint::BigUint::from(n) * budget.full_sum()), &pow2(budget.k));
    u64::try_from(&c).unwrap_or(u64::MAX).saturating_sub(1)
}

fn verify_search(limits: &VerifyLimits) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyScope::SearchAdversary);
    for budget in budgets(limits) {
        for n in 1..=limits.max_n {
            let floor = search_floor(n, budget);
            let provable = search_provable_floor(n, budget);
            let mut min_rank = u64::MAX;
            for strategy in SearchStrategy::family() {
                let out = match play_search(n, budget, strategy.clone()) {
                    Ok(out) => out,
                    Err(e) => {
                        report.notes.push(format!("n={n} k={} H={} {strategy:?}: skipped ({e})", budget.k, budget.h));
                        continue;
                    }
                };
                report.cases += 1;
                report.nodes += out.transcript.entries.len() as u64;
                let answers = out.transcript.answers();
                let case = format!("n={n} k={} H={} {strategy:?}", budget.k, budget.h);
                let Some(w) = &out.witness else {
                    report.counterexamples.push(Counterexample { case, answers: entries(&answers), detail: "adversary has no witness".into() });
                    continue;
                };
                let lies = lies_against(w.rotation, &answers);
                min_rank = min_rank.min(w.rank);
                if lies > budget.h || w.rank < provable {
                    report.counterexamples.push(Counterexample {
                        case,
                        answers: entries(&answers),
                        detail: format!("witness rank {} with {lies} lies; adversary guarantees rank >= {provable}", w.rank),
                    });
                }
            }
            if min_rank < floor && min_rank != u64::MAX {
                report.notes.push(format!(
                    "n={n} k={} H={}: lowest forced rank {min_rank} is below floor(n<<k,H>>/2^k) = {floor}",
                    budget.k, budget.h
                ));
            }
            if report.nodes >= limits.node_cap {
                report.complete = false;
                return report;
            }
        }
    }
    report
}

pub fn verify_exhaustive(scope: VerifyScope, limits: &VerifyLimits) -> VerifyReport {
    match scope {
        VerifyScope::Identify => verify_identify(limits),
        VerifyScope::Continuous => verify_continuous(limits),
        VerifyScope::MinCyclic => verify_min_cyclic(limits),
        VerifyScope::SearchAdversary => verify_search(limits),
    }
}
