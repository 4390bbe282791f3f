use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, InstanceFamily, Problem};
use crate::advice::{AdviceOracle, ErrorPolicy, Truth};
use crate::bounds::{
    bid_objective_ln, bidding_lower_bound, bidding_u, bidding_upper_bound, big_to_f64,
    fpb_lower_bound, knapsack_bounds, pow2, robust_bidding_bounds, robust_ts_bounds, ser_extended,
    ts_bounds, QueryBudget,
};
use crate::error::Result;
use crate::problems::{
    bidding_family, bidding_robust_family, bidding_truth, bidding_robust_with_advice,
    bidding_with_advice, fpb_family_bound, fpb_family_ratio, knapsack_adversarial_instances,
    knapsack_random_instance, knapsack_run, knapsack_truth, ts_adversarial_instances, ts_grid,
    ts_robust_grid, ts_robust_run, ts_run, ts_truth, CyclicFamily, KnapsackInstance,
    KnapsackPartition, PriceInstance,
};

/// Relative slack allowed when comparing an empirical ratio to its bound.
pub const TOLERANCE: f64 = 1e-9;

/// Prices per random time-series instance.
const RANDOM_TS_LEN: usize = 16;
/// Items per random knapsack instance.
const RANDOM_KNAPSACK_ITEMS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub problem: String,
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u32,
    pub eta_realized: usize,
    #[serde(serialize_with = "ser_extended")]
    pub empirical_cr: f64,
    #[serde(serialize_with = "ser_extended")]
    pub bound_upper: f64,
    pub bound_lower: Option<f64>,
    pub within_bound: bool,
    pub instance_id: String,
    pub seed: u64,
}

impl ResultRow {
    /// A row breaks a guarantee when it misses its bound although the bound
    /// applies: the advice stayed within tolerance, or the problem is robust
    /// or advice-free.
    pub fn is_violation(&self) -> bool {
        let applies = self.eta_realized <= self.h as usize
            || self.problem.parse::<Problem>().is_ok_and(|p| p.is_robust() || p == Problem::Fpb);
        applies && !self.within_bound
    }
}

pub fn within(cr: f64, bound: f64) -> bool {
    cr <= bound * (1.0 + TOLERANCE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub violations: usize,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    budget: QueryBudget,
    policy: &'a ErrorPolicy,
}

impl Ctx<'_> {
    fn oracle(&self, truth: Truth) -> Result<AdviceOracle> {
        let o = AdviceOracle::new(truth, self.budget, self.policy.clone())?;
        Ok(match self.cfg.lie_cap {
            Some(cap) => o.with_lie_cap(cap),
            None => o,
        })
    }

    fn row(&self, id: String, eta: usize, cr: f64, upper: f64, lower: Option<f64>) -> ResultRow {
        ResultRow {
            problem: self.cfg.problem.name().to_string(),
            k: self.budget.k,
            h: self.budget.h,
            eta_realized: eta,
            empirical_cr: cr,
            bound_upper: upper,
            bound_lower: lower,
            within_bound: within(cr, upper),
            instance_id: format!("{id}/{}", self.policy),
            seed: self.cfg.seed,
        }
    }
}

fn price_instances(cfg: &ExperimentConfig, budget: QueryBudget) -> Result<Vec<(String, PriceInstance)>> {
    match cfg.family {
        InstanceFamily::Adversarial => Ok(ts_adversarial_instances(budget, cfg.m, cfg.big_m)?
            .into_iter()
            .enumerate()
            .map(|(i, inst)| (format!("sigma_{}", i + 1), inst))
            .collect()),
        InstanceFamily::Random => (0..cfg.instances)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
                let ln_r = (cfg.big_m / cfg.m).ln();
                let prices = (0..RANDOM_TS_LEN)
                    .map(|_| (cfg.m * (ln_r * rng.gen::<f64>()).exp()).clamp(cfg.m, cfg.big_m))
                    .collect();
                Ok((format!("random_{i}"), PriceInstance::new(prices, cfg.m, cfg.big_m)?))
            })
            .collect(),
    }
}

fn knapsack_instances(cfg: &ExperimentConfig, part: &KnapsackPartition) -> Result<Vec<(String, KnapsackInstance)>> {
    match cfg.family {
        InstanceFamily::Adversarial => Ok(knapsack_adversarial_instances(part, cfg.granularity)?
            .into_iter()
            .map(|((x, y), inst)| (format!("x{x}_y{y}"), inst))
            .collect()),
        InstanceFamily::Random => (0..cfg.instances)
            .map(|i| {
                let units = (cfg.granularity / 5).max(1);
                let inst = knapsack_random_instance(cfg.l, cfg.u, RANDOM_KNAPSACK_ITEMS, cfg.granularity, units, cfg.seed.wrapping_add(i as u64))?;
                Ok((format!("random_{i}"), inst))
            })
            .collect(),
    }
}

fn ts_rows(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let cfg = ctx.cfg;
    let robust = cfg.problem == Problem::TsRobust;
    let ratio = cfg.big_m / cfg.m;
    let (upper, lower, robustness) = if robust {
        let b = robust_ts_bounds(ctx.budget, ratio, cfg.rho)?;
        (b.upper_cr, b.lower_cr, b.robustness)
    } else {
        let b = ts_bounds(ctx.budget, ratio)?;
        (b.upper_cr, b.lower_cr, b.upper_cr)
    };
    let grid = if robust {
        ts_robust_grid(ctx.budget, cfg.m, cfg.big_m, cfg.rho)?
    } else {
        ts_grid(ctx.budget, cfg.m, cfg.big_m)?
    };
    price_instances(cfg, ctx.budget)?
        .into_par_iter()
        .map(|(id, inst)| {
            let mut oracle = ctx.oracle(ts_truth(&inst, &grid))?;
            let out = if robust {
                ts_robust_run(&inst, ctx.budget, &mut oracle, cfg.rho)?
            } else {
                ts_run(&inst, ctx.budget, &mut oracle)?
            };
            let eta = out.session.report.eta;
            let bound = if eta <= ctx.budget.h as usize { upper } else { robustness };
            Ok(ctx.row(id, eta, out.ratio, bound, Some(lower)))
        })
        .collect()
}

fn bidding_rows(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let cfg = ctx.cfg;
    let budget = ctx.budget;
    let robust = cfg.problem == Problem::BiddingRobust;
    let (family, upper, lower, robustness): (CyclicFamily, f64, Option<f64>, f64) = if robust {
        let b = robust_bidding_bounds(budget, cfg.r)?;
        (bidding_robust_family(budget, cfg.r)?, b.upper_cr, b.lower_cr, cfg.r)
    } else {
        let family = bidding_family(budget, cfg.b)?;
        let upper = match cfg.b {
            Some(b) => bid_objective_ln(b.ln(), big_to_f64(&pow2(budget.k)), big_to_f64(&bidding_u(budget))).exp(),
            None => bidding_upper_bound(budget),
        };
        (family, upper, Some(bidding_lower_bound(budget)), f64::INFINITY)
    };
    let grid = family.u_grid(cfg.grid);
    let runs = grid
        .par_iter()
        .map(|&u| {
            let mut oracle = ctx.oracle(bidding_truth(&family, u))?;
            let out = if robust {
                bidding_robust_with_advice(budget, cfg.r, u, &mut oracle)?
            } else {
                bidding_with_advice(budget, Some(family.b), u, &mut oracle)?
            };
            Ok((out.session.report.eta, out.ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let id = format!("ugrid_{}", grid.len());
    let mut rows = Vec::new();
    let (inside, outside): (Vec<_>, Vec<_>) = runs.into_iter().partition(|(eta, _)| *eta <= budget.h as usize);
    if !inside.is_empty() {
        let eta = inside.iter().map(|r| r.0).max().unwrap_or(0);
        let sup = inside.iter().map(|r| r.1).fold(0.0, f64::max);
        rows.push(ctx.row(id.clone(), eta, sup, upper, lower));
    }
    if !outside.is_empty() {
        let eta = outside.iter().map(|r| r.0).max().unwrap_or(0);
        let sup = outside.iter().map(|r| r.1).fold(0.0, f64::max);
        let bound = if robust { robustness } else { upper };
        rows.push(ctx.row(format!("{id}_over"), eta, sup, bound, lower));
    }
    Ok(rows)
}

fn knapsack_rows(ctx: &Ctx) -> Result<Vec<ResultRow>> {
    let cfg = ctx.cfg;
    let bounds = knapsack_bounds(ctx.budget, cfg.u / cfg.l)?;
    let part = KnapsackPartition::for_budget(ctx.budget, cfg.l, cfg.u)?;
    knapsack_instances(cfg, &part)?
        .into_par_iter()
        .map(|(id, inst)| {
            let mut oracle = ctx.oracle(knapsack_truth(&inst, &part)?)?;
            let out = knapsack_run(&inst, &part, ctx.budget, &mut oracle)?;
            Ok(ctx.row(id, out.session.report.eta, out.ratio, bounds.upper_cr, Some(bounds.lower_cr)))
        })
        .collect()
}

fn fpb_rows(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let b = cfg.b.unwrap_or(2.0);
    let mut cases = Vec::new();
    for &p in &cfg.p {
        for &phi in &cfg.phi {
            cases.push((p, phi));
        }
    }
    cases
        .into_par_iter()
        .map(|(p, phi)| {
            let grid = CyclicFamily::new(b, u64::from(p))?.u_grid(cfg.grid);
            let cr = fpb_family_ratio(b, u64::from(p), phi as usize, &grid)?;
            let upper = fpb_family_bound(b, phi);
            Ok(ResultRow {
                problem: Problem::Fpb.name().to_string(),
                k: 0,
                h: 0,
                eta_realized: phi as usize,
                empirical_cr: cr,
                bound_upper: upper,
                bound_lower: Some(fpb_lower_bound(p, phi, b)?),
                within_bound: within(cr, upper),
                instance_id: format!("p{p}_phi{phi}"),
                seed: cfg.seed,
            })
        })
        .collect()
}

/// Runs the sweep. Rows come out in sweep order (`k`, then `H`, then
/// policy, then instance) regardless of thread scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let rows = if cfg.problem == Problem::Fpb {
        fpb_rows(cfg)?
    } else {
        let mut jobs = Vec::new();
        for budget in cfg.budgets()? {
            for policy in &cfg.policies {
                jobs.push(Ctx { cfg, budget, policy });
            }
        }
        let per_job = jobs
            .par_iter()
            .map(|ctx| match cfg.problem {
                Problem::Ts | Problem::TsRobust => ts_rows(ctx),
                Problem::Bidding | Problem::BiddingRobust => bidding_rows(ctx),
                Problem::Knapsack => knapsack_rows(ctx),
                Problem::Fpb => unreachable!("handled above"),
            })
            .collect::<Result<Vec<_>>>()?;
        per_job.into_iter().flatten().collect()
    };
    let violations = rows.iter().filter(|r| r.is_violation()).count();
    if let Some(path) = &cfg.output.csv {
        write_csv(&rows, path)?;
    }
    if let Some(path) = &cfg.output.jsonl {
        write_jsonl(&rows, path)?;
    }
    Ok(ExperimentResult { rows, violations })
}

/// Creates missing parent directories of an output path.
fn prepare(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => Ok(std::fs::create_dir_all(dir)?),
        _ => Ok(()),
    }
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    prepare(path)?;
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl(rows: &[ResultRow], path: &Path) -> Result<()> {
    prepare(path)?;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
