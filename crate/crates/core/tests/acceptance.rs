//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line; exits non-zero if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use ulam_core::advice::{AdviceOracle, ErrorPolicy};
use ulam_core::bounds::{
    big_to_f64, bidding_f, bidding_lower_bound, bidding_u, bidding_upper_bound, find_capacity,
    knapsack_bounds, partial_binomial_sum, partial_sum_entropy_bracket, pow2,
    resource_augmentation_size, robust_bidding_bounds, robust_ts_bounds, ts_bounds, QueryBudget,
};
use ulam_core::games::{play_search, search_floor, SearchStrategy};
use ulam_core::harness::{
    run_experiment, search_provable_floor, verify_exhaustive, ExperimentConfig, InstanceFamily,
    OutputPaths, Problem, VerifyLimits, VerifyScope,
};
use ulam_core::problems::{
    bidding_cost, bidding_family, bidding_truth, bidding_with_advice, knapsack_adversarial_instances,
    knapsack_run, knapsack_truth, ts_adversarial_instances, ts_grid, ts_run, ts_truth, BidSequence,
    CyclicFamily, KnapsackPartition,
};

/// Slack on floating-point ratio comparisons against closed forms.
const RATIO_TOL: f64 = 1e-9;
/// Knapsack ratios go through a `2^-32` reserve quantisation.
const KNAPSACK_TOL: f64 = 1e-6;
const PASCAL_LIMIT: Duration = Duration::from_secs(10);
const TREE_LIMIT: Duration = Duration::from_secs(300);
/// Node cap large enough that the criterion ranges are explored completely.
const NODE_CAP: u64 = 4_000_000_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn budget(k: u32, h: u32) -> QueryBudget {
    QueryBudget::new(k, h).expect("valid budget")
}

fn oracle(truth: ulam_core::Truth, b: QueryBudget, policy: ErrorPolicy) -> AdviceOracle {
    AdviceOracle::new(truth, b, policy).expect("valid oracle")
}

/// Every lie pattern of at most `max_lies` positions among `k` queries.
fn fixed_patterns(k: u32, max_lies: u32) -> Vec<ErrorPolicy> {
    (0u32..1 << k)
        .filter(|mask| mask.count_ones() <= max_lies)
        .map(|mask| ErrorPolicy::Fixed((0..k as usize).filter(|i| mask >> i & 1 == 1).collect()))
        .collect()
}

fn c01_combinatorics() -> Verdict {
    let start = Instant::now();
    let mut pascal_bad = 0;
    let mut bracket_bad = 0;
    let mut checked = 0;
    for n in 0..=64u64 {
        for m in 0..=n {
            let v = partial_binomial_sum(n, m).expect("m <= N");
            checked += 1;
            if n >= 1 && m >= 1 {
                let prev = partial_binomial_sum(n - 1, m.min(n - 1)).expect("in range")
                    + partial_binomial_sum(n - 1, m - 1).expect("in range");
                if v != prev {
                    pascal_bad += 1;
                }
            } else if v != BigUint::one() {
                pascal_bad += 1;
            }
            if m > 0 && 2 * m < n {
                let (lo, hi) = partial_sum_entropy_bracket(n, m).expect("0 < m < N/2");
                let x = big_to_f64(&v);
                if !(lo <= x && x <= hi) {
                    bracket_bad += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        pascal_bad == 0 && bracket_bad == 0 && elapsed < PASCAL_LIMIT,
        format!("{checked} sums, {pascal_bad} recurrence and {bracket_bad} bracket failures in {elapsed:.2?}"),
    )
}

fn tree_verdict(scope: VerifyScope, limits: VerifyLimits) -> (Verdict, ulam_core::harness::VerifyReport) {
    let start = Instant::now();
    let report = verify_exhaustive(scope, &limits);
    let elapsed = start.elapsed();
    let v = verdict(
        report.passed() && elapsed < TREE_LIMIT,
        format!(
            "{} cases, {} leaves, complete={}, {} counterexamples in {elapsed:.2?}",
            report.cases,
            report.leaves,
            report.complete,
            report.counterexamples.len()
        ),
    );
    (v, report)
}

fn c02_identify() -> Verdict {
    let limits = VerifyLimits { max_k: 10, max_h: 2, max_n: u64::MAX, node_cap: NODE_CAP };
    tree_verdict(VerifyScope::Identify, limits).0
}

fn c03_continuous() -> Verdict {
    let limits = VerifyLimits { max_k: 12, max_h: 2, max_n: 0, node_cap: NODE_CAP };
    let (mut v, report) = tree_verdict(VerifyScope::Continuous, limits);
    let within = report.hulls.iter().filter(|h| h.within).count();
    let outside: Vec<String> = report
        .hulls
        .iter()
        .filter(|h| !h.within)
        .take(3)
        .map(|h| format!("k={} H={} hull {} > {}", h.k, h.h, h.widest, h.interval_bound))
        .collect();
    v.detail += &format!(
        "; info: hull within interval bound for {within}/{} budgets{}",
        report.hulls.len(),
        if outside.is_empty() { String::new() } else { format!(" (e.g. {})", outside.join(", ")) }
    );
    v
}

fn c04_min_cyclic() -> Verdict {
    let limits = VerifyLimits { max_k: 8, max_h: 2, max_n: 32, node_cap: NODE_CAP };
    tree_verdict(VerifyScope::MinCyclic, limits).0
}

fn c05_search_adversary() -> Verdict {
    let mut games = 0;
    let mut below_floor = Vec::new();
    let mut below_provable = 0;
    let mut inconsistent = 0;
    for k in 0..=6u32 {
        for h in 0..=1u32.min(k / 2) {
            let b = budget(k, h);
            for n in 1..=16u64 {
                let floor = search_floor(n, b);
                let provable = search_provable_floor(n, b);
                for strategy in SearchStrategy::family() {
                    let out = play_search(n, b, strategy.clone()).expect("valid game");
                    games += 1;
                    let (rank, lies) = match (&out.witness, out.witness_lies) {
                        (Some(w), Some(l)) => (w.rank, l),
                        _ => {
                            inconsistent += 1;
                            continue;
                        }
                    };
                    if lies > h {
                        inconsistent += 1;
                    }
                    if rank < provable {
                        below_provable += 1;
                    }
                    if rank < floor {
                        below_floor.push(format!("n={n} k={k} H={h} {strategy:?}: rank {rank} < {floor}"));
                    }
                }
            }
        }
    }
    verdict(
        below_floor.is_empty() && inconsistent == 0,
        format!(
            "{games} games; {} below floor(n<<k,H>>/2^k){}; {below_provable} below ceil(n<<k,H>>/2^k)-1; {inconsistent} inconsistent witnesses",
            below_floor.len(),
            below_floor.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

fn c06_timeseries() -> Verdict {
    let ratio = 100.0;
    let b = budget(4, 1);
    let bounds = ts_bounds(b, ratio).expect("valid");
    let target = ratio.powf(1.0 / 3.0);
    let grid = ts_grid(b, 1.0, ratio).expect("valid");
    let mut policies = fixed_patterns(4, 1);
    policies.extend([ErrorPolicy::Greedy, ErrorPolicy::Minimax]);
    let mut sup: f64 = 0.0;
    let instances = ts_adversarial_instances(b, 1.0, ratio).expect("valid");
    for inst in &instances {
        for p in &policies {
            let mut o = oracle(ts_truth(inst, &grid), b, p.clone());
            let out = ts_run(inst, b, &mut o).expect("run");
            assert!(out.session.report.eta <= 1);
            sup = sup.max(out.ratio);
        }
    }
    let b0 = budget(0, 0);
    let grid0 = ts_grid(b0, 1.0, ratio).expect("valid");
    let mut base: f64 = 0.0;
    for inst in ts_adversarial_instances(b0, 1.0, ratio).expect("valid") {
        let mut o = oracle(ts_truth(&inst, &grid0), b0, ErrorPolicy::None);
        base = base.max(ts_run(&inst, b0, &mut o).expect("run").ratio);
    }
    verdict(
        bounds.u == BigUint::from(2u32) && sup <= target + RATIO_TOL && (base - 10.0).abs() <= RATIO_TOL,
        format!("U={}, sup {sup:.12} <= {target:.12} over {} instances; baseline sup {base:.12}", bounds.u, instances.len()),
    )
}

fn c07_doubling() -> Verdict {
    let grid = CyclicFamily::new(2.0, 1).expect("valid").u_grid(10_000);
    let seq = BidSequence::doubling();
    let sup = grid.iter().map(|&u| bidding_cost(&seq, u) / u).fold(0.0, f64::max);
    verdict((3.99..=4.0).contains(&sup), format!("sup {sup:.9} over {} targets", grid.len()))
}

/// Sup ratio of the advised bidding strategy under greedy errors (cap `H`).
fn bidding_sup(k: u32, h: u32) -> (f64, usize) {
    let b = budget(k, h);
    let family = bidding_family(b, None).expect("valid");
    let mut sup: f64 = 0.0;
    let mut eta = 0;
    for u in family.u_grid(10_000) {
        let mut o = oracle(bidding_truth(&family, u), b, ErrorPolicy::Greedy);
        let out = bidding_with_advice(b, Some(family.b), u, &mut o).expect("run");
        eta = eta.max(out.session.report.eta);
        sup = sup.max(out.ratio);
    }
    (sup, eta)
}

fn bidding_sweep() -> Vec<(u32, u32, f64, usize)> {
    let mut rows = Vec::new();
    for k in [2, 4, 6] {
        for h in [0, 1] {
            let (sup, eta) = bidding_sup(k, h);
            rows.push((k, h, sup, eta));
        }
    }
    rows
}

fn c08_bidding_upper(sweep: &[(u32, u32, f64, usize)]) -> Verdict {
    let mut worst_slack = f64::INFINITY;
    let mut pass = true;
    for &(k, h, sup, eta) in sweep {
        let upper = bidding_upper_bound(budget(k, h));
        pass &= eta <= h as usize && sup <= upper + RATIO_TOL;
        worst_slack = worst_slack.min(upper - sup);
    }
    verdict(pass, format!("{} budgets, min(upper - sup) = {worst_slack:.3e}", sweep.len()))
}

fn c09_bidding_sandwich(sweep: &[(u32, u32, f64, usize)]) -> Verdict {
    let mut pass = bidding_f(1.0) == 4.0;
    let mut cells = Vec::new();
    for &(k, h, sup, _) in sweep {
        let b = budget(k, h);
        let (lower, upper) = (bidding_lower_bound(b), bidding_upper_bound(b));
        pass &= lower <= sup && sup <= upper + RATIO_TOL;
        cells.push(format!("k{k}H{h}: {lower:.4}<={sup:.4}<={upper:.4}"));
    }
    verdict(pass, format!("f(1)={}; {}", bidding_f(1.0), cells.join(" ")))
}

fn c10_knapsack() -> Verdict {
    let mut runs = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for ratio in [16.0, 1024.0] {
        for h in [0, 1] {
            let b = budget(8, h);
            let bounds = knapsack_bounds(b, ratio).expect("valid");
            let part = KnapsackPartition::for_budget(b, 1.0, ratio).expect("fits");
            assert_eq!(Some((part.s, part.m)), bounds.upper_sm);
            let instances = knapsack_adversarial_instances(&part, 1000).expect("valid");
            for (xy, inst) in &instances {
                for policy in [ErrorPolicy::None, ErrorPolicy::Greedy, ErrorPolicy::Minimax] {
                    let truth = knapsack_truth(inst, &part).expect("valid");
                    let mut o = oracle(truth, b, policy.clone());
                    let out = knapsack_run(inst, &part, b, &mut o).expect("run");
                    runs += 1;
                    if out.session.report.eta > h as usize {
                        continue;
                    }
                    let used: BigRational = out.fractions.iter().zip(&inst.items).map(|(f, it)| f * &it.s).sum();
                    let fractions_ok = out.fractions.iter().all(|f| *f >= BigRational::zero() && *f <= BigRational::one());
                    worst = worst.max(out.ratio - bounds.upper_cr);
                    if out.ratio > bounds.upper_cr + KNAPSACK_TOL || used > BigRational::one() || !fractions_ok {
                        bad.push(format!("U/L={ratio} H={h} sigma{xy:?} {policy}: ratio {} vs {}", out.ratio, bounds.upper_cr));
                    }
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{runs} runs, max(ratio - f_m) = {worst:.3e}, {} failures{}", bad.len(),
            bad.first().map(|e| format!(" (first: {e})")).unwrap_or_default()),
    )
}

fn robust_config(problem: Problem, ks: Vec<u32>, family: InstanceFamily) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(problem, ks.clone(), vec![0, 1]);
    let k_max = ks.iter().copied().max().unwrap_or(0);
    cfg.family = family;
    cfg.lie_cap = Some(k_max);
    cfg.instances = 200;
    cfg.seed = 11;
    cfg.grid = 2000;
    cfg.policies = vec![ErrorPolicy::None, ErrorPolicy::Greedy, ErrorPolicy::Minimax];
    cfg.policies.extend(fixed_patterns(k_max, k_max));
    cfg
}

fn c11_robust() -> Verdict {
    let mut robust_bad = 0;
    let mut consistency_bad = Vec::new();
    let mut rows = 0;
    for rho in [0.75, 1.0] {
        for family in [InstanceFamily::Adversarial, InstanceFamily::Random] {
            let mut cfg = robust_config(Problem::TsRobust, vec![4], family);
            cfg.rho = rho;
            let result = run_experiment(&cfg).expect("experiment");
            let bounds = robust_ts_bounds(budget(4, 1), cfg.big_m / cfg.m, rho).expect("valid");
            for row in &result.rows {
                rows += 1;
                if row.empirical_cr > bounds.robustness * (1.0 + RATIO_TOL) {
                    robust_bad += 1;
                }
                if row.is_violation() {
                    consistency_bad.push((format!("ts_robust rho={rho}"), format!("{}: {:.4} > {:.4}", row.instance_id, row.empirical_cr, row.bound_upper)));
                }
            }
        }
    }
    for (r, k) in [5.0, 6.0].into_iter().flat_map(|r| [(r, 2), (r, 3)]) {
        let mut cfg = robust_config(Problem::BiddingRobust, vec![k], InstanceFamily::Adversarial);
        cfg.r = r;
        let result = run_experiment(&cfg).expect("experiment");
        for row in &result.rows {
            rows += 1;
            let upper = robust_bidding_bounds(budget(row.k, row.h), r).expect("valid").upper_cr;
            if row.empirical_cr > r + RATIO_TOL {
                robust_bad += 1;
            }
            if row.eta_realized <= row.h as usize && row.empirical_cr > upper + RATIO_TOL {
                consistency_bad.push((format!("bidding_robust r={r}"), format!("k={} H={} {}: {:.4} > {upper:.4}", row.k, row.h, row.instance_id, row.empirical_cr)));
            }
        }
    }
    let by_variant = consistency_bad.iter().counts_by(|(variant, _)| variant.clone());
    let mut summary: Vec<String> = by_variant.iter().map(|(v, n)| format!("{v}: {n}")).collect();
    summary.sort();
    verdict(
        robust_bad == 0 && consistency_bad.is_empty(),
        format!(
            "{rows} rows; {robust_bad} above the robustness target; {} above the eta<=H bound [{}]{}",
            consistency_bad.len(),
            summary.join(", "),
            consistency_bad.first().map(|(v, e)| format!(" (first: {v} {e})")).unwrap_or_default()
        ),
    )
}

fn c12_resource_augmentation() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for c in [0.05, 0.1, 0.2] {
        for k in 1..=64u32 {
            let l = resource_augmentation_size(k, c).expect("valid").ceil() as u32;
            let h = ((1.0 / 3.0 - c) * f64::from(l)).floor() as u32;
            let (aug, perfect) = (budget(l, h), budget(k, 0));
            // Time series: U(l, H) >= U(k, 0) = 2^k.
            let ts_exact = find_capacity(aug) >= find_capacity(perfect);
            let ts_float = ts_bounds(aug, 100.0).expect("valid").upper_cr <= ts_bounds(perfect, 100.0).expect("valid").upper_cr;
            // Bidding: 2^l/(U_b(l,H)+1) >= 2^k/(U_b(k,0)+1) = 2^(k-1).
            let bid_exact = pow2(l) * 2u32 >= pow2(k) * (bidding_u(aug) + 1u32);
            let bid_float = bidding_upper_bound(aug) <= bidding_upper_bound(perfect) + RATIO_TOL;
            checked += 1;
            if !(ts_exact && ts_float && bid_exact && bid_float) {
                bad.push(format!("c={c} k={k} l={l} H={h}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{checked} (k, c) pairs, {} failures{}", bad.len(), bad.first().map(|e| format!(" (first: {e})")).unwrap_or_default()),
    )
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn c13_determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(config_dir())
        .expect("configs directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut differing = Vec::new();
    for path in &paths {
        let name = path.file_stem().expect("file name").to_string_lossy().to_string();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let mut cfg = ExperimentConfig::load(path).expect("valid config");
            let csv = dir.path().join(format!("{name}_{run}.csv"));
            cfg.output = OutputPaths { csv: Some(csv.clone()), jsonl: None };
            run_experiment(&cfg).expect("experiment");
            outputs.push(std::fs::read(&csv).expect("csv written"));
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            differing.push(name);
        }
    }
    verdict(
        !paths.is_empty() && differing.is_empty(),
        format!("{} configs, non-identical: {differing:?}", paths.len()),
    )
}

/// Optional arguments select criteria by number, e.g. `-- 3 11`.
fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| selected.is_empty() || selected.contains(&id);
    let sweep = if wanted(8) || wanted(9) { bidding_sweep() } else { Vec::new() };
    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "exact partial sums", Box::new(c01_combinatorics)),
        (2, "identify vs minimax adversary", Box::new(c02_identify)),
        (3, "continuous consistent measure", Box::new(c03_continuous)),
        (4, "min-cyclic rank guarantee", Box::new(c04_min_cyclic)),
        (5, "search adversary witness", Box::new(c05_search_adversary)),
        (6, "time-series at M/m=100", Box::new(c06_timeseries)),
        (7, "doubling baseline", Box::new(c07_doubling)),
        (8, "bidding upper bound", Box::new(|| c08_bidding_upper(&sweep))),
        (9, "bidding bound sandwich", Box::new(|| c09_bidding_sandwich(&sweep))),
        (10, "knapsack adversarial families", Box::new(c10_knapsack)),
        (11, "robust variants", Box::new(c11_robust)),
        (12, "resource augmentation", Box::new(c12_resource_augmentation)),
        (13, "config determinism", Box::new(c13_determinism)),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria.iter().filter(|c| wanted(c.0)) {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name} [{:.2?}]: {}", start.elapsed(), v.detail);
        if !v.pass {
            failed.push(*id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
