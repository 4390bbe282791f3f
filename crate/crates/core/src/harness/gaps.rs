use serde::Serialize;

use super::config::Problem;
use crate::bounds::{
    big_to_f64, bidding_gap_estimate, bidding_lower_bound, bidding_upper_bound, knapsack_bounds,
    ser_extended, ts_bounds, QueryBudget,
};
use crate::error::{Error, Result};

/// Upper and lower bound at `H = floor(tau k)` and their log ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub problem: String,
    pub k: u32,
    pub tau: f64,
    #[serde(rename = "H")]
    pub h: u32,
    #[serde(serialize_with = "ser_extended")]
    pub upper: f64,
    pub lower: f64,
    /// `ln(upper/lower)`.
    #[serde(serialize_with = "ser_extended")]
    pub log_gap: f64,
    /// Closed-form estimate of `log_gap` where one is known.
    pub analytic: Option<f64>,
}

/// `ratio` is `M/m` for time series and `U/L` for knapsack.
pub fn gap_table(problem: Problem, ks: &[u32], taus: &[f64], ratio: f64) -> Result<Vec<GapRow>> {
    let mut rows = Vec::new();
    for &tau in taus {
        if !(0.0..=0.5).contains(&tau) {
            return Err(Error::domain(format!("tau must lie in [0, 1/2], got {tau}")));
        }
        for &k in ks {
            let h = (tau * f64::from(k)).floor() as u32;
            let budget = QueryBudget::new(k, h)?;
            let (upper, lower, log_gap, analytic) = match problem {
                Problem::Ts => {
                    let b = ts_bounds(budget, ratio)?;
                    // Directly in log space: the roots are within 1 ulp of 1 for large k.
                    let inv = |n: &num_bigint::BigUint| 1.0 / (big_to_f64(n) + 1.0);
                    (b.upper_cr, b.lower_cr, ratio.ln() * (inv(&b.u) - inv(&b.l)), None)
                }
                Problem::Bidding => {
                    let (u, l) = (bidding_upper_bound(budget), bidding_lower_bound(budget));
                    let analytic = (k > 0 && h > 0).then(|| bidding_gap_estimate(k, tau));
                    (u, l, u.ln() - l.ln(), analytic)
                }
                Problem::Knapsack => {
                    let b = knapsack_bounds(budget, ratio)?;
                    (b.upper_cr, b.lower_cr, b.upper_cr.ln() - b.lower_cr.ln(), None)
                }
                other => return Err(Error::domain(format!("no gap table for {other}"))),
            };
            rows.push(GapRow { problem: problem.name().into(), k, tau, h, upper, lower, log_gap, analytic });
        }
    }
    Ok(rows)
}
