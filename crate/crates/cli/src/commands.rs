use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use ulam_core::advice::{AdviceOracle, ErrorPolicy, Truth};
use ulam_core::bounds::{
    big_to_f64, bidding_default_base, bidding_lower_bound, bidding_u, bidding_upper_bound,
    fpb_lower_bound, knapsack_bounds, resource_augmentation_size, robust_bidding_bounds,
    robust_ts_bounds, ts_bounds, BoundReport, QueryBudget,
};
use ulam_core::games::{
    continuous_search, cyclic_rank, identify, min_cyclic, min_cyclic_guarantee, parse_rational,
    play_search, rational_string, search_floor, SearchStrategy, Session,
};
use ulam_core::harness::{
    gap_table, run_experiment, search_provable_floor, verify_exhaustive, ExperimentConfig, Problem,
    ResultRow, VerifyLimits, VerifyScope,
};
use ulam_core::problems::fpb_family_bound;
use ulam_core::{Error, Result};

use crate::output::Output;
use crate::{BoundsArgs, GapsArgs, PlayArgs, SimulateArgs, VerifyArgs};

/// What a command hands back to `main`.
pub struct Outcome {
    pub output: Output,
    pub warnings: Vec<String>,
    pub code: u8,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Outcome { output, warnings: Vec::new(), code: 0 }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => Map::from_iter([("value".to_string(), other)]),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("command output serialises")
}

fn report_row(r: &BoundReport) -> Map<String, Value> {
    let inputs: Vec<String> = r.formula_inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    object(json!({ "name": r.name, "value": to_value(r)["value"], "inputs": inputs.join(";") }))
}

fn big(n: &BigUint) -> f64 {
    big_to_f64(n)
}

pub fn bounds(a: &BoundsArgs) -> Result<Outcome> {
    let budget = || QueryBudget::new(a.k, a.h);
    let kh = |r: BoundReport| r.input("k", a.k).input("H", a.h);
    let reports: Vec<BoundReport> = match a.problem.as_str() {
        "ts" => {
            let ratio = a.ratio.unwrap_or(100.0);
            let b = ts_bounds(budget()?, ratio)?;
            vec![
                kh(BoundReport::new("U", big(&b.u))).input("exact", &b.u),
                kh(BoundReport::new("L", big(&b.l))).input("exact", &b.l),
                kh(BoundReport::new("upper_cr", b.upper_cr)).input("ratio", ratio),
                kh(BoundReport::new("lower_cr", b.lower_cr)).input("ratio", ratio),
            ]
        }
        "ts_robust" => {
            let ratio = a.ratio.unwrap_or(100.0);
            let b = robust_ts_bounds(budget()?, ratio, a.rho)?;
            let with = |r: BoundReport| kh(r).input("ratio", ratio).input("rho", a.rho);
            vec![
                kh(BoundReport::new("U", big(&b.u))).input("exact", &b.u),
                kh(BoundReport::new("L", big(&b.l))).input("exact", &b.l),
                with(BoundReport::new("upper_cr", b.upper_cr)),
                with(BoundReport::new("lower_cr", b.lower_cr)),
                with(BoundReport::new("robustness", b.robustness)),
            ]
        }
        "bidding" => {
            let b = budget()?;
            let u = bidding_u(b);
            vec![
                kh(BoundReport::new("U", big(&u))).input("exact", &u),
                kh(BoundReport::new("upper_cr", bidding_upper_bound(b))),
                kh(BoundReport::new("lower_cr", bidding_lower_bound(b))),
                kh(BoundReport::new("base", bidding_default_base(b))),
            ]
        }
        "bidding_robust" => {
            let b = robust_bidding_bounds(budget()?, a.r)?;
            let mut out = vec![
                kh(BoundReport::new("upper_cr", b.upper_cr)).input("r", a.r),
                kh(BoundReport::new("base", b.base)).input("r", a.r),
            ];
            if let Some(lower) = b.lower_cr {
                out.push(kh(BoundReport::new("lower_cr", lower)).input("r", a.r));
            }
            out
        }
        "knapsack" => {
            let ratio = a.ratio.unwrap_or(16.0);
            let b = knapsack_bounds(budget()?, ratio)?;
            let mut upper = kh(BoundReport::new("upper_cr", b.upper_cr)).input("ratio", ratio);
            if let Some((s, m)) = b.upper_sm {
                upper = upper.input("s", s).input("m", m);
            }
            vec![
                upper,
                kh(BoundReport::new("lower_cr", b.lower_cr))
                    .input("ratio", ratio)
                    .input("s", b.lower_sm.0)
                    .input("m", b.lower_sm.1),
            ]
        }
        "fpb" => {
            let with = |r: BoundReport| r.input("p", a.p).input("phi", a.phi).input("alpha", a.alpha);
            vec![
                with(BoundReport::new("lower_cr", fpb_lower_bound(a.p, a.phi, a.alpha)?)),
                with(BoundReport::new("family_upper", fpb_family_bound(a.alpha, a.phi))),
            ]
        }
        "augment" => {
            let l = resource_augmentation_size(a.k, a.c)?;
            let size = l.ceil();
            let tolerance = ((1.0 / 3.0 - a.c) * size).floor();
            vec![
                BoundReport::new("l", l).input("k", a.k).input("c", a.c),
                BoundReport::new("advice_bits", size).input("k", a.k).input("c", a.c),
                BoundReport::new("tolerance", tolerance).input("k", a.k).input("c", a.c),
            ]
        }
        other => {
            return Err(usage(format!(
                "unknown problem {other:?}; expected ts, ts_robust, bidding, bidding_robust, knapsack, fpb or augment"
            )))
        }
    };
    Ok(Outcome::ok(Output::rows(reports.iter().map(report_row).collect())))
}

/// `random:eta=E` may omit the seed; `--seed` fills it in or overrides it.
fn policy(text: &str, seed: Option<u64>) -> Result<ErrorPolicy> {
    let text = text.trim();
    let filled = if text.starts_with("random:") && !text.contains("seed=") {
        format!("{text},seed={}", seed.unwrap_or(0))
    } else {
        text.to_string()
    };
    Ok(match (filled.parse::<ErrorPolicy>()?, seed) {
        (ErrorPolicy::Random { eta, .. }, Some(seed)) => ErrorPolicy::Random { eta, seed },
        (p, _) => p,
    })
}

fn strategy(name: &str, seed: Option<u64>) -> Result<SearchStrategy> {
    Ok(match name {
        "comparison_weighting" => SearchStrategy::ComparisonWeighting,
        "balanced_subset" => SearchStrategy::BalancedSubset,
        "bits" => SearchStrategy::Bits,
        "naive_halving" => SearchStrategy::NaiveHalving,
        "random" => SearchStrategy::Random(seed.unwrap_or(0)),
        other => {
            return Err(usage(format!(
                "unknown strategy {other:?}; expected comparison_weighting, balanced_subset, bits, naive_halving or random"
            )))
        }
    })
}

fn strategy_name(s: &SearchStrategy) -> String {
    match s {
        SearchStrategy::ComparisonWeighting => "comparison_weighting".into(),
        SearchStrategy::BalancedSubset => "balanced_subset".into(),
        SearchStrategy::Bits => "bits".into(),
        SearchStrategy::NaiveHalving => "naive_halving".into(),
        SearchStrategy::Random(seed) => format!("random:{seed}"),
    }
}

fn required<T: Copy>(v: Option<T>, flag: &str, game: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("{game} needs --{flag}")))
}

fn parse_index(x: &Option<String>, default: u64) -> Result<u64> {
    match x {
        None => Ok(default),
        Some(s) => s.parse().map_err(|_| usage(format!("--x must be an integer, got {s:?}"))),
    }
}

fn session_doc<O>(game: &str, session: &Session<O>, output: Value, extra: Value) -> Value {
    let mut doc = json!({
        "game": game,
        "output": output,
        "eta": session.report.eta,
        "exceeded_tolerance": session.report.exceeded_tolerance,
        "report": to_value(&session.report),
        "transcript": to_value(&session.transcript),
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    doc
}

/// Scalar fields of a document, for the tabular formats.
fn summary_row(doc: &Value) -> Map<String, Value> {
    object(doc.clone())
        .into_iter()
        .filter(|(_, v)| !v.is_object() && !v.is_array())
        .collect()
}

pub fn play(a: &PlayArgs) -> Result<Outcome> {
    let budget = QueryBudget::new(a.k, a.h)?;
    let policy = policy(&a.oracle, a.seed)?;
    let oracle = |truth: Truth| -> Result<AdviceOracle> {
        let o = AdviceOracle::new(truth, budget, policy.clone())?;
        Ok(match a.lie_cap {
            Some(cap) => o.with_lie_cap(cap),
            None => o,
        })
    };
    let doc = match a.game.as_str() {
        "identify" | "find" => {
            let m = required(a.m, "m", &a.game)?;
            let x = parse_index(&a.x, 1)?;
            if !(1..=m).contains(&x) {
                return Err(usage(format!("--x must lie in 1..={m}")));
            }
            let mut o = oracle(Truth::Index(x))?;
            let s = identify(m, budget, &mut o)?;
            session_doc(&a.game, &s, to_value(&s.output), json!({ "m": m, "x": x, "correct": s.output == Some(x) }))
        }
        "continuous" => {
            let text = a.x.clone().unwrap_or_else(|| "1/2".into());
            let x = parse_rational(&text).ok_or_else(|| usage(format!("--x must be a rational p/q, got {text:?}")))?;
            let mut o = oracle(Truth::Real(x))?;
            let s = continuous_search(budget, &mut o)?;
            let interval = s.output.interval.as_ref().map(|(lo, hi)| [rational_string(lo), rational_string(hi)]);
            session_doc(
                "continuous",
                &s,
                to_value(&interval),
                json!({ "x": text, "consistent_measure": rational_string(&s.output.consistent_measure) }),
            )
        }
        "min_cyclic" => {
            let n = required(a.n, "n", "min_cyclic")?;
            let x = parse_index(&a.x, 0)?;
            if x >= n {
                return Err(usage(format!("--x (the rotation) must lie in 0..{n}")));
            }
            let mut o = oracle(Truth::Index(x))?;
            let s = min_cyclic(n, budget, &mut o)?;
            let rank = cyclic_rank(s.output, x, n);
            session_doc(
                "min_cyclic",
                &s,
                json!(s.output),
                json!({ "n": n, "rotation": x, "rank": rank, "guarantee": min_cyclic_guarantee(n, budget) }),
            )
        }
        "search" => {
            let n = required(a.n, "n", "search")?;
            let out = play_search(n, budget, strategy(&a.strategy, a.seed)?)?;
            json!({
                "game": "search",
                "output": out.output,
                "strategy": a.strategy,
                "n": n,
                "witness_rank": out.witness.as_ref().map(|w| w.rank),
                "witness_lies": out.witness_lies,
                "floor": search_floor(n, budget),
                "provable_floor": search_provable_floor(n, budget),
                "witness": to_value(&out.witness),
                "transcript": to_value(&out.transcript),
            })
        }
        other => {
            return Err(usage(format!(
                "unknown game {other:?}; expected identify, find, continuous, min_cyclic or search"
            )))
        }
    };
    let rows = vec![summary_row(&doc)];
    Ok(Outcome::ok(Output { document: doc, rows }))
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", a.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(n) = a.instances {
        cfg.instances = n;
    }
    if a.csv.is_some() {
        cfg.output.csv = a.csv.clone();
    }
    if a.jsonl.is_some() {
        cfg.output.jsonl = a.jsonl.clone();
    }
    let result = run_experiment(&cfg)?;
    let rows = if a.rows {
        result.rows.iter().map(|r| object(to_value(r))).collect()
    } else {
        summarise(&cfg, &result.rows)
    };
    let mut outcome = Outcome::ok(Output::rows(rows));
    if result.violations > 0 {
        outcome
            .warnings
            .push(format!("{} of {} rows miss a bound that applies to them", result.violations, result.rows.len()));
    }
    Ok(outcome)
}

/// Per-budget summary: counts, sup ratios inside and beyond the tolerance,
/// and violations.
fn summarise(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Vec<Map<String, Value>> {
    let mut keys: Vec<(u32, u32)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.k, r.h)) {
            keys.push((r.k, r.h));
        }
    }
    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    let extended = |v: Option<f64>| match v {
        Some(x) if x.is_finite() => json!(x),
        Some(x) => json!(if x > 0.0 { "inf" } else { "-inf" }),
        None => Value::Null,
    };
    keys.into_iter()
        .map(|(k, h)| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.k == k && r.h == h).collect();
            let inside = |r: &&&ResultRow| r.eta_realized <= h as usize;
            object(json!({
                "problem": cfg.problem.name(),
                "k": k,
                "H": h,
                "rows": group.len(),
                "max_eta": group.iter().map(|r| r.eta_realized).max(),
                "sup_cr": extended(sup(&mut group.iter().filter(inside).map(|r| r.empirical_cr))),
                "bound_upper": extended(sup(&mut group.iter().filter(inside).map(|r| r.bound_upper))),
                "sup_cr_over_tolerance": extended(sup(&mut group.iter().filter(|r| !inside(r)).map(|r| r.empirical_cr))),
                "violations": group.iter().filter(|r| r.is_violation()).count(),
            }))
        })
        .collect()
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let scope: VerifyScope = a.scope.parse()?;
    if a.node_cap <= 0 {
        return Err(usage(format!("--node-cap must be positive, got {}", a.node_cap)));
    }
    if let (VerifyScope::SearchAdversary, Some(n), Some(k)) = (scope, a.n, a.k) {
        return verify_search_case(n, QueryBudget::new(k, a.h.unwrap_or(0))?);
    }
    if a.n.is_some() || a.k.is_some() || a.h.is_some() {
        return Err(usage("--n/--k/--H select a single search_adversary case (with both --n and --k); use --max-k/--max-H/--max-n otherwise"));
    }
    let limits = VerifyLimits { max_k: a.max_k, max_h: a.max_h, max_n: a.max_n, node_cap: a.node_cap as u64 };
    let report = verify_exhaustive(scope, &limits);
    let summary = object(json!({
        "scope": scope.name(),
        "cases": report.cases,
        "nodes": report.nodes,
        "leaves": report.leaves,
        "complete": report.complete,
        "counterexamples": report.counterexamples.len(),
        "passed": report.passed(),
    }));
    let mut outcome = Outcome::ok(Output { document: to_value(&report), rows: vec![summary] });
    if !report.complete {
        outcome.warnings.push(format!("node cap {} reached; the check is incomplete", a.node_cap));
    }
    if !report.counterexamples.is_empty() {
        outcome.code = 1;
    }
    Ok(outcome)
}

/// Every questioner of the family against the search adversary at one `(n, k, H)`.
fn verify_search_case(n: u64, budget: QueryBudget) -> Result<Outcome> {
    let floor = search_floor(n, budget);
    let provable = search_provable_floor(n, budget);
    let mut rows = Vec::new();
    for s in SearchStrategy::family() {
        let out = play_search(n, budget, s.clone())?;
        rows.push(object(json!({
            "strategy": strategy_name(&s),
            "output": out.output,
            "witness_rank": out.witness.as_ref().map(|w| w.rank),
            "witness_lies": out.witness_lies,
        })));
    }
    let ranks: Vec<u64> = rows.iter().filter_map(|r| r["witness_rank"].as_u64()).collect();
    let min_rank = ranks.iter().copied().min();
    let consistent = rows.iter().all(|r| r["witness_lies"].as_u64().is_some_and(|l| l <= u64::from(budget.h)));
    let doc = json!({
        "scope": "search_adversary",
        "n": n,
        "k": budget.k,
        "H": budget.h,
        "min_witnessed_rank": min_rank,
        "floor": floor,
        "provable_floor": provable,
        "witnesses_consistent": consistent,
        "games": rows,
    });
    let mut outcome = Outcome::ok(Output { document: doc, rows });
    if min_rank.is_some_and(|r| r < floor) {
        outcome.warnings.push(format!(
            "min witnessed rank {} is below floor(n<<k,H>>/2^k) = {floor}; ranks are 0-based, so ceil(n<<k,H>>/2^k) - 1 = {provable} is the forced rank",
            min_rank.unwrap_or(0)
        ));
    }
    if !consistent || min_rank.is_none_or(|r| r < provable) {
        outcome.code = 1;
    }
    Ok(outcome)
}

pub fn gaps(a: &GapsArgs) -> Result<Outcome> {
    let problem: Problem = a.problem.parse()?;
    let rows = gap_table(problem, &a.k, &a.tau, a.ratio)?;
    Ok(Outcome::ok(Output::rows(rows.iter().map(|r| object(to_value(r))).collect())))
}
