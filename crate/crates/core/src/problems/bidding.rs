//! Online bidding against an unknown threshold `u >= 1`, with advice
//! selecting one sequence from a cyclic family.

use serde::{Deserialize, Serialize};

use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{bidding_default_base, robust_bidding_bounds, QueryBudget};
use crate::error::{Error, Result};
use crate::games::{min_cyclic, Session};

/// Bids beyond this many terms are treated as never reaching `u`.
const MAX_TERMS: u64 = 1 << 20;

/// `base^{offset + j*stride}` for `j = 0, 1, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidSequence {
    pub base: f64,
    pub offset: u64,
    pub stride: u64,
}

/// `b^e`; every bid and threshold comparison goes through this.
pub fn bid_value(b: f64, e: u64) -> f64 {
    b.powf(e as f64)
}

impl BidSequence {
    /// Bids 1, 2, 4, ...
    pub fn doubling() -> Self {
        BidSequence { base: 2.0, offset: 0, stride: 1 }
    }

    pub fn bid(&self, j: u64) -> f64 {
        bid_value(self.base, self.offset + j * self.stride)
    }

    /// Index of the first bid `>= u`, or `None` if the bids stay below `u`.
    pub fn discovering_index(&self, u: f64) -> Option<u64> {
        if self.bid(0) >= u {
            return Some(0);
        }
        if self.base <= 1.0 || self.stride == 0 {
            return None;
        }
        let exact = (u.ln() / self.base.ln() - self.offset as f64) / self.stride as f64;
        let mut j = exact.ceil().max(0.0) as u64;
        if j > MAX_TERMS {
            return None;
        }
        while j > 0 && self.bid(j - 1) >= u {
            j -= 1;
        }
        while self.bid(j) < u {
            j += 1;
        }
        Some(j)
    }
}

/// Total of all bids up to and including the first bid `>= u`; infinite
/// when the sequence never reaches `u`.
pub fn bidding_cost(seq: &BidSequence, u: f64) -> f64 {
    match seq.discovering_index(u) {
        Some(j) => (0..=j).map(|i| seq.bid(i)).sum(),
        None => f64::INFINITY,
    }
}

/// `X_i = (b^{i + j l})_j`, `i = 0..l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicFamily {
    pub b: f64,
    pub l: u64,
}

impl CyclicFamily {
    pub fn new(b: f64, l: u64) -> Result<Self> {
        if !(b > 1.0 && b.is_finite()) || l == 0 {
            return Err(Error::domain(format!("cyclic family needs b > 1 and l >= 1, got b={b}, l={l}")));
        }
        Ok(CyclicFamily { b, l })
    }

    pub fn member(&self, i: u64) -> BidSequence {
        BidSequence { base: self.b, offset: i, stride: self.l }
    }

    pub fn members(&self) -> Vec<BidSequence> {
        (0..self.l).map(|i| self.member(i)).collect()
    }

    /// Smallest `e >= 0` with `b^e >= u`.
    pub fn first_exponent(&self, u: f64) -> u64 {
        BidSequence { base: self.b, offset: 0, stride: 1 }.discovering_index(u).expect("b > 1")
    }

    /// Index of the cheapest member for `u`; member `i` then has cyclic
    /// rank `(i - truth) mod l`.
    pub fn truth(&self, u: f64) -> u64 {
        self.first_exponent(u) % self.l
    }

    /// Thresholds just above each bid value `b^e`, `e < exponents`, topped
    /// up with log-spaced points in `[1, b^exponents]` to `points` total.
    pub fn u_grid(&self, points: usize) -> Vec<f64> {
        let exponents = (6 * self.l + 16).min(points as u64 / 2).max(1);
        let mut grid: Vec<f64> = (0..exponents).map(|e| bid_value(self.b, e) * (1.0 + 1e-9)).collect();
        grid.push(1.0);
        let ln_top = self.b.ln() * exponents as f64;
        let fill = points.saturating_sub(grid.len());
        grid.extend((0..fill).map(|i| (ln_top * i as f64 / fill.max(1) as f64).exp()));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

fn check_threshold(u: f64) -> Result<()> {
    if !(u >= 1.0 && u.is_finite()) {
        return Err(Error::domain(format!("threshold u must be finite and >= 1, got {u}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BiddingOutcome {
    pub family: CyclicFamily,
    pub chosen: u64,
    pub cost: f64,
    /// `cost / u`.
    pub ratio: f64,
    pub session: Session<u64>,
}

/// Family `X_{b, 2^k}` with the member picked by min-cyclic search on the
/// advice; `b` defaults to the base minimising the worst-case ratio.
pub fn bidding_family(budget: QueryBudget, b: Option<f64>) -> Result<CyclicFamily> {
    if budget.k >= 63 {
        return Err(Error::Overflow(format!("family of 2^{} sequences", budget.k)));
    }
    CyclicFamily::new(b.unwrap_or_else(|| bidding_default_base(budget)), 1 << budget.k)
}

fn run_family(family: CyclicFamily, budget: QueryBudget, u: f64, oracle: &mut AdviceOracle) -> Result<BiddingOutcome> {
    check_threshold(u)?;
    let session = min_cyclic(family.l, budget, oracle)?;
    let chosen = session.output;
    let cost = bidding_cost(&family.member(chosen), u);
    Ok(BiddingOutcome { family, chosen, cost, ratio: cost / u, session })
}

/// Truth for the advice oracle at threshold `u`.
pub fn bidding_truth(family: &CyclicFamily, u: f64) -> Truth {
    Truth::Index(family.truth(u))
}

pub fn bidding_with_advice(budget: QueryBudget, b: Option<f64>, u: f64, oracle: &mut AdviceOracle) -> Result<BiddingOutcome> {
    run_family(bidding_family(budget, b)?, budget, u, oracle)
}

/// Family whose base keeps every member within ratio `r`.
pub fn bidding_robust_family(budget: QueryBudget, r: f64) -> Result<CyclicFamily> {
    let base = robust_bidding_bounds(budget, r)?.base;
    bidding_family(budget, Some(base))
}

pub fn bidding_robust_with_advice(budget: QueryBudget, r: f64, u: f64, oracle: &mut AdviceOracle) -> Result<BiddingOutcome> {
    run_family(bidding_robust_family(budget, r)?, budget, u, oracle)
}
