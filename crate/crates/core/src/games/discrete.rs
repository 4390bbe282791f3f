//! Berlekamp weighting over integer candidates with comparison queries.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;

use super::query::Query;
use super::session::{run_session, Outlook, Questioner, Session};
use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{berlekamp_weight, pow2, QueryBudget};
use crate::error::{Error, Result};

/// Largest `k` the integer engine accepts; keeps `len * weight` in `u128`.
pub const MAX_DISCRETE_K: u32 = 62;

/// `<<q, H - lies>>` as `u128`, zero for dead candidates.
#[derive(Debug, Clone)]
pub(crate) struct Weights {
    h: u32,
    table: Arc<Vec<u128>>,
}

impl Weights {
    pub(crate) fn new(budget: QueryBudget) -> Result<Self> {
        if budget.k > MAX_DISCRETE_K {
            return Err(Error::Overflow(format!(
                "k={} exceeds the discrete engine limit {MAX_DISCRETE_K}",
                budget.k
            )));
        }
        let h = budget.h;
        let mut table = Vec::with_capacity(((budget.k + 1) * (h + 1)) as usize);
        for q in 0..=budget.k {
            for slack in 0..=h {
                let w: u128 = berlekamp_weight(q, i64::from(slack)).try_into().expect("fits u128");
                table.push(w);
            }
        }
        Ok(Weights { h, table: Arc::new(table) })
    }

    pub(crate) fn w(&self, q: u32, lies: u32) -> u128 {
        if lies > self.h {
            return 0;
        }
        self.table[(q * (self.h + 1) + (self.h - lies)) as usize]
    }

    /// Weight a candidate loses when charged one more lie with `q` queries left.
    pub(crate) fn slope(&self, q: u32, lies: u32) -> u128 {
        self.w(q, lies) - self.w(q, lies + 1)
    }

    pub(crate) fn tolerance(&self) -> u32 {
        self.h
    }
}

/// Maximal run of consecutive candidates sharing a lie count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub lo: u64,
    pub hi: u64,
    pub lies: u32,
}

impl Run {
    fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }
}

/// Run-length encoded candidate set. Dead candidates are dropped.
#[derive(Debug, Clone)]
pub struct DiscreteState {
    runs: Vec<Run>,
    remaining: u32,
    weights: Weights,
}

impl DiscreteState {
    /// Candidates `lo..=hi`, `remaining` queries left.
    pub fn new(lo: u64, hi: u64, remaining: u32, budget: QueryBudget) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty candidate range {lo}..={hi}")));
        }
        Ok(DiscreteState {
            runs: vec![Run { lo, hi, lies: 0 }],
            remaining,
            weights: Weights::new(budget)?,
        })
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn remaining(&self) -> u32 {
        self.remaining
    }

    pub fn live_count(&self) -> u64 {
        self.runs.iter().map(Run::len).sum()
    }

    pub fn total_weight(&self) -> u128 {
        self.runs.iter().map(|r| u128::from(r.len()) * self.weights.w(self.remaining, r.lies)).sum()
    }

    /// Threshold `a` for "x <= a?" minimising `|yes - no|`, ties to the
    /// smaller threshold. `None` once no queries remain.
    pub fn threshold(&self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        let live = self.live_count();
        if live <= 1 {
            return Some(self.runs.first().map_or(0, |r| r.lo));
        }
        let q = self.remaining - 1;
        let slopes: Vec<u128> = self.runs.iter().map(|r| self.weights.slope(q, r.lies)).collect();
        let total: u128 = self.runs.iter().zip(&slopes).map(|(r, s)| u128::from(r.len()) * s).sum();

        // Smallest t with 2 P(t) >= total, where P(t) sums slopes of the
        // first t+1 live candidates.
        let (mut t, mut p_t, mut s_t) = (0u64, slopes[0], slopes[0]);
        if total > 0 {
            let (mut before, mut idx) = (0u128, 0u64);
            for (r, &s) in self.runs.iter().zip(&slopes) {
                let len = u128::from(r.len());
                if s > 0 && 2 * (before + len * s) >= total {
                    let need = total.saturating_sub(2 * before);
                    let j = if need == 0 { 0 } else { need.div_ceil(2 * s) - 1 };
                    t = idx + j as u64;
                    p_t = before + (j + 1) * s;
                    s_t = s;
                    break;
                }
                before += len * s;
                idx += r.len();
            }
            if t >= 1 && total - 2 * (p_t - s_t) <= 2 * p_t - total {
                t -= 1;
            }
        }
        Some(self.nth_live(t.min(live - 2)))
    }

    fn nth_live(&self, mut t: u64) -> u64 {
        for r in &self.runs {
            if t < r.len() {
                return r.lo + t;
            }
            t -= r.len();
        }
        unreachable!("index within live count")
    }

    /// Weights after "yes" and "no" to "x <= a?".
    pub fn split_weights(&self, a: u64) -> (u128, u128) {
        let q = self.remaining.saturating_sub(1);
        let (mut yes, mut no) = (0u128, 0u128);
        for r in &self.runs {
            let left = u128::from(r.hi.min(a).saturating_sub(r.lo) + 1) * u128::from(r.lo <= a);
            let right = u128::from(r.len()) - left;
            yes += left * self.weights.w(q, r.lies) + right * self.weights.w(q, r.lies + 1);
            no += left * self.weights.w(q, r.lies + 1) + right * self.weights.w(q, r.lies);
        }
        (yes, no)
    }

    pub fn absorb(&mut self, a: u64, yes: bool) {
        let h = self.weights.tolerance();
        let mut next: Vec<Run> = Vec::with_capacity(self.runs.len() + 1);
        let mut push = |run: Run| {
            if run.lies > h {
                return;
            }
            match next.last_mut() {
                Some(last) if last.lies == run.lies && last.hi + 1 == run.lo => last.hi = run.hi,
                _ => next.push(run),
            }
        };
        for r in &self.runs {
            if r.lo <= a {
                push(Run { lo: r.lo, hi: r.hi.min(a), lies: r.lies + u32::from(!yes) });
            }
            if r.hi > a {
                push(Run { lo: r.lo.max(a + 1), hi: r.hi, lies: r.lies + u32::from(yes) });
            }
        }
        self.runs = next;
        self.remaining = self.remaining.saturating_sub(1);
    }

    /// The only live candidate, if exactly one remains.
    pub fn resolved(&self) -> Option<u64> {
        match self.runs.as_slice() {
            [r] if r.lo == r.hi => Some(r.lo),
            _ => None,
        }
    }

    /// Smallest candidate among those with the fewest lies.
    pub fn best_guess(&self) -> Option<u64> {
        self.runs.iter().min_by_key(|r| (r.lies, r.lo)).map(|r| r.lo)
    }
}

/// Weighting questioner for `x in 1..=m` with comparison queries.
#[derive(Debug, Clone)]
pub struct IdentifyQuestioner {
    state: DiscreteState,
}

impl IdentifyQuestioner {
    pub fn state(&self) -> &DiscreteState {
        &self.state
    }
}

fn to_rational(x: u128) -> BigRational {
    BigRational::from_integer(x.into())
}

impl Questioner for IdentifyQuestioner {
    type Output = Option<u64>;

    fn next_query(&self) -> Option<Query> {
        self.state.threshold().map(Query::Le)
    }

    fn outlook(&self, query: &Query) -> Outlook {
        let (yes, no) = match query {
            Query::Le(a) => self.state.split_weights(*a),
            _ => (0, 0),
        };
        Outlook { yes: to_rational(yes), no: to_rational(no) }
    }

    fn absorb(&mut self, query: &Query, answer: bool) {
        if let Query::Le(a) = query {
            self.state.absorb(*a, answer);
        }
    }

    fn finish(&self) -> Option<u64> {
        self.state.resolved().or_else(|| self.state.best_guess())
    }
}

/// Weighting questioner without the sufficiency check. Asks exactly `k`
/// queries unless `m = 1`.
pub fn weighting_questioner(m: u64, budget: QueryBudget) -> Result<IdentifyQuestioner> {
    if m == 0 {
        return Err(Error::domain("identify needs m >= 1"));
    }
    let remaining = if m == 1 { 0 } else { budget.k };
    Ok(IdentifyQuestioner { state: DiscreteState::new(1, m, remaining, budget)? })
}

/// True when `2^{k-H} >= m <<k-H,H>>`.
pub fn identify_feasible(m: u64, budget: QueryBudget) -> bool {
    BigUint::from(m) * budget.reduced_sum() <= pow2(budget.k - budget.h)
}

/// Weighting questioner for `x in 1..=m`, refusing budgets that do not
/// guarantee identification.
pub fn identify_questioner(m: u64, budget: QueryBudget) -> Result<IdentifyQuestioner> {
    if m == 0 {
        return Err(Error::domain("identify needs m >= 1"));
    }
    if !identify_feasible(m, budget) {
        return Err(Error::BudgetInsufficient { m, k: budget.k, h: budget.h });
    }
    weighting_questioner(m, budget)
}

fn identify_damage(oracle: &AdviceOracle) -> impl Fn(&Option<u64>) -> f64 {
    let truth = match oracle.truth() {
        Truth::Index(x) => Some(*x),
        Truth::Real(_) => None,
    };
    move |out: &Option<u64>| f64::from(*out != truth)
}

/// Identifies `x in 1..=m` from `k` comparison queries; correct whenever the
/// oracle lies at most `H` times.
pub fn identify(m: u64, budget: QueryBudget, oracle: &mut AdviceOracle) -> Result<Session<Option<u64>>> {
    let q = identify_questioner(m, budget)?;
    let damage = identify_damage(oracle);
    run_session(q, oracle, &damage)
}

/// Finds `x in 1..=m` for `m <= floor(2^{k-H}/<<k-H,H>>)`; same strategy
/// as [`identify`].
pub fn find(m: u64, budget: QueryBudget, oracle: &mut AdviceOracle) -> Result<Session<Option<u64>>> {
    identify(m, budget, oracle)
}
