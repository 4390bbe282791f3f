//! Fault-tolerant parallel bidding: `p` sequences run side by side and up
//! to `phi` of them are faulty (their bids never discover `u`).

use std::cmp::Ordering;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::bidding::{BidSequence, CyclicFamily};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelBidStrategy {
    pub sequences: Vec<BidSequence>,
    pub faulty: Vec<usize>,
}

/// Bids are issued in order of value, ties broken by sequence index.
fn issued_before(a: (f64, usize), b: (f64, usize)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Less) => true,
        Some(Ordering::Equal) => a.1 <= b.1,
        _ => false,
    }
}

/// Cost of the whole schedule until a non-faulty sequence first bids at
/// least `u`: every bid issued up to that point counts, faulty or not.
pub fn fpb_simulate(strategy: &ParallelBidStrategy, u: f64) -> f64 {
    let winner = strategy
        .sequences
        .iter()
        .enumerate()
        .filter(|(i, _)| !strategy.faulty.contains(i))
        .filter_map(|(i, s)| s.discovering_index(u).map(|j| (s.bid(j), i)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let Some(stop) = winner else { return f64::INFINITY };
    strategy
        .sequences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            (0..)
                .map(|j| s.bid(j))
                .take_while(|&v| issued_before((v, i), stop))
                .take(1 << 20)
                .sum::<f64>()
        })
        .sum()
}

/// Worst cost over every choice of `phi` faulty sequences.
pub fn fpb_worst_cost(sequences: &[BidSequence], phi: usize, u: f64) -> Result<f64> {
    if phi >= sequences.len() {
        return Err(Error::domain(format!("need phi < p, got phi={phi}, p={}", sequences.len())));
    }
    Ok((0..sequences.len())
        .combinations(phi)
        .map(|faulty| fpb_simulate(&ParallelBidStrategy { sequences: sequences.to_vec(), faulty }, u))
        .fold(0.0, f64::max))
}

/// Supremum of `worst_cost / u` over `grid` for the cyclic family `X_{b,p}`.
pub fn fpb_family_ratio(b: f64, p: u64, phi: usize, grid: &[f64]) -> Result<f64> {
    let family = CyclicFamily::new(b, p)?;
    let seqs = family.members();
    grid.iter().try_fold(0.0f64, |acc, &u| Ok(acc.max(fpb_worst_cost(&seqs, phi, u)? / u)))
}

/// `b^{phi+2}/(b-1)`, the limiting worst case of `X_{b,p}` with `phi` faults.
pub fn fpb_family_bound(b: f64, phi: u32) -> f64 {
    b.powi(phi as i32 + 2) / (b - 1.0)
}
