//! Time-series search: accept one price from a sequence in `[m, M]`.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::serde_util::{decimal, decimal_vec};
use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{check_rho, find_capacity, find_ceiling_ceil, QueryBudget};
use crate::error::{Error, Result};
use crate::games::{identify_questioner, run_session, Session};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceInstance {
    #[serde(with = "decimal_vec")]
    pub prices: Vec<f64>,
    #[serde(with = "decimal")]
    pub m: f64,
    #[serde(rename = "M", with = "decimal")]
    pub big_m: f64,
}

impl PriceInstance {
    pub fn new(prices: Vec<f64>, m: f64, big_m: f64) -> Result<Self> {
        let inst = PriceInstance { prices, m, big_m };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.big_m >= self.m && self.big_m.is_finite()) {
            return Err(Error::domain(format!("need 0 < m <= M, got m={}, M={}", self.m, self.big_m)));
        }
        if self.prices.is_empty() {
            return Err(Error::domain("price sequence is empty"));
        }
        if let Some(p) = self.prices.iter().find(|p| !(**p >= self.m && **p <= self.big_m)) {
            return Err(Error::domain(format!("price {p} outside [{}, {}]", self.m, self.big_m)));
        }
        Ok(())
    }

    pub fn max_price(&self) -> f64 {
        self.prices.iter().copied().fold(f64::MIN, f64::max)
    }
}

/// Geometric reservation grid `a_i = lo * step^i`, `i = 1..=count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservationGrid {
    pub lo: f64,
    pub ln_step: f64,
    pub count: u64,
}

impl ReservationGrid {
    /// `count` points strictly inside `[lo, hi]` with equal ratios, the
    /// ratio being `(hi/lo)^{1/(count+1)}`.
    pub fn spanning(lo: f64, hi: f64, count: u64) -> Self {
        ReservationGrid { lo, ln_step: (hi / lo).ln() / (count as f64 + 1.0), count }
    }

    pub fn price(&self, i: u64) -> f64 {
        self.lo * (self.ln_step * i as f64).exp()
    }

    pub fn step(&self) -> f64 {
        self.ln_step.exp()
    }

    /// Largest `i` with `a_i <= max_price`, else `1`.
    pub fn best_index(&self, max_price: f64) -> u64 {
        if self.count == 0 || self.price(1) > max_price {
            return 1;
        }
        let guess = ((max_price / self.lo).ln() / self.ln_step).floor().max(1.0).min(self.count as f64) as u64;
        let mut i = guess;
        while i < self.count && self.price(i + 1) <= max_price {
            i += 1;
        }
        while i > 1 && self.price(i) > max_price {
            i -= 1;
        }
        i
    }
}

/// Accepts the first price `>= reservation`, else the last price.
pub fn accept_with_reservation(prices: &[f64], reservation: f64) -> f64 {
    prices.iter().copied().find(|&p| p >= reservation).unwrap_or(*prices.last().expect("nonempty"))
}

fn grid_size(budget: QueryBudget) -> Result<u64> {
    find_capacity(budget)
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("reservation grid for k={} does not fit in u64", budget.k)))
}

/// Grid of `U = floor(2^{k-H}/<<k-H,H>>)` prices between `m` and `M`.
pub fn ts_grid(budget: QueryBudget, m: f64, big_m: f64) -> Result<ReservationGrid> {
    Ok(ReservationGrid::spanning(m, big_m, grid_size(budget)?))
}

/// Robust grid restricted to `[p1, p2]`, `p1 = m (M/m)^{1-rho}`, `p2 = m (M/m)^rho`.
pub fn ts_robust_grid(budget: QueryBudget, m: f64, big_m: f64, rho: f64) -> Result<ReservationGrid> {
    check_rho(rho)?;
    let ln_r = (big_m / m).ln();
    let p1 = m * (ln_r * (1.0 - rho)).exp();
    let p2 = m * (ln_r * rho).exp();
    Ok(ReservationGrid::spanning(p1, p2, grid_size(budget)?))
}

/// Truth for the advice oracle: index of the best reservation price.
pub fn ts_truth(instance: &PriceInstance, grid: &ReservationGrid) -> Truth {
    Truth::Index(grid.best_index(instance.max_price()))
}

#[derive(Debug, Clone)]
pub struct TsOutcome {
    pub chosen_index: u64,
    pub reservation: f64,
    pub accepted: f64,
    /// `max(prices) / accepted`.
    pub ratio: f64,
    pub session: Session<Option<u64>>,
}

fn run_on_grid(instance: &PriceInstance, budget: QueryBudget, grid: ReservationGrid, oracle: &mut AdviceOracle) -> Result<TsOutcome> {
    instance.validate()?;
    let q = identify_questioner(grid.count, budget)?;
    let best = instance.max_price();
    let prices = instance.prices.clone();
    let damage = move |out: &Option<u64>| best / accept_with_reservation(&prices, grid.price(out.unwrap_or(1)));
    let session = run_session(q, oracle, &damage)?;
    let chosen_index = session.output.unwrap_or(1);
    let reservation = grid.price(chosen_index);
    let accepted = accept_with_reservation(&instance.prices, reservation);
    Ok(TsOutcome { chosen_index, reservation, accepted, ratio: best / accepted, session })
}

/// Reservation-price search with the reservation located by Find over
/// the geometric grid; ratio at most `(M/m)^{1/(U+1)}` when `eta <= H`.
pub fn ts_run(instance: &PriceInstance, budget: QueryBudget, oracle: &mut AdviceOracle) -> Result<TsOutcome> {
    let grid = ts_grid(budget, instance.m, instance.big_m)?;
    run_on_grid(instance, budget, grid, oracle)
}

/// As [`ts_run`] on the robust grid; ratio at most `(M/m)^rho` for any advice.
pub fn ts_robust_run(instance: &PriceInstance, budget: QueryBudget, oracle: &mut AdviceOracle, rho: f64) -> Result<TsOutcome> {
    let grid = ts_robust_grid(budget, instance.m, instance.big_m, rho)?;
    run_on_grid(instance, budget, grid, oracle)
}

/// Sequences `sigma_i = (m, a_1, ..., a_i, m)`, `i = 1..=L+1`, on the grid
/// with ratio `(M/m)^{1/(L+1)}`, `L = ceil(2^k/<<k,H>>)`, `a_{L+1} = M`.
pub fn ts_adversarial_instances(budget: QueryBudget, m: f64, big_m: f64) -> Result<Vec<PriceInstance>> {
    let l = find_ceiling_ceil(budget)
        .to_u64()
        .filter(|&l| l < 1 << 24)
        .ok_or_else(|| Error::Overflow(format!("adversarial family for k={} is too large", budget.k)))?;
    let grid = ReservationGrid::spanning(m, big_m, l);
    let level = |j: u64| if j == l + 1 { big_m } else { grid.price(j) };
    (1..=l + 1)
        .map(|i| {
            let mut prices = vec![m];
            prices.extend((1..=i).map(level));
            prices.push(m);
            PriceInstance::new(prices, m, big_m)
        })
        .collect()
}
