//! Competitive-ratio bounds for the three online problems.
//!
//! Integer quantities (`U`, `L`, partial sums) are exact; the ratios
//! themselves are evaluated in log space in `f64`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::combinatorics::{ceil_div, find_capacity, find_ceiling_ceil, pow2, QueryBudget};
use super::entropy::entropy_unchecked;
use super::optimize::golden_section_min;
use crate::error::{Error, Result};

/// Bracket for every golden-section search on `b`.
pub const BASE_BRACKET: (f64, f64) = (1.0 + 1e-9, 8.0);
pub const GOLDEN_TOL: f64 = 1e-12;

pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Natural log of a positive big integer, accurate beyond the `f64` range.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return big_to_f64(x).ln();
    }
    let shift = bits - 64;
    big_to_f64(&(x >> shift as usize)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `f(x) = (1/x)(1+x)^{1+1/x}`, decreasing from `f(0+) = inf` to `f(inf) = 1`.
pub fn bidding_f(x: f64) -> f64 {
    if x.is_infinite() {
        return 1.0;
    }
    (x.recip().ln_1p() + x.ln_1p() / x).exp()
}

/// `f` evaluated at an exact ratio `num/den`, robust to huge operands.
fn bidding_f_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let x = ratio_to_f64(&BigRational::new(
        BigInt::from(num.clone()),
        BigInt::from(den.clone()),
    ));
    if x.is_finite() && x < 1e300 {
        return bidding_f(x);
    }
    // x beyond f64: ln f(x) ~ 1/x + ln(x)/x.
    let ln_x = big_ln(num) - big_ln(den);
    ((-ln_x).exp() + ln_x * (-ln_x).exp()).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsBounds {
    pub u: BigUint,
    pub l: BigUint,
    pub upper_cr: f64,
    pub lower_cr: f64,
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio.is_nan() || ratio <= 1.0 || !ratio.is_finite() {
        return Err(Error::domain(format!("price/density ratio must be finite and > 1, got {ratio}")));
    }
    Ok(())
}

/// `ratio^{1/(n+1)}` for a possibly huge `n`.
fn root_of(ratio: f64, n: &BigUint) -> f64 {
    (ratio.ln() / (big_to_f64(n) + 1.0)).exp()
}

/// Time-series search with `k` comparison queries and tolerance `H`:
/// upper `(M/m)^{1/(U+1)}`, lower `(M/m)^{1/(L+1)}` with
/// `U = floor(2^{k-H}/<<k-H,H>>)`, `L = ceil(2^k/<<k,H>>)`.
pub fn ts_bounds(budget: QueryBudget, ratio: f64) -> Result<TsBounds> {
    check_ratio(ratio)?;
    let u = find_capacity(budget);
    let l = find_ceiling_ceil(budget);
    Ok(TsBounds {
        upper_cr: root_of(ratio, &u),
        lower_cr: root_of(ratio, &l),
        u,
        l,
    })
}

/// `U = 2^H <<k-H,H>>` used by the bidding strategy (already an integer).
pub fn bidding_u(budget: QueryBudget) -> BigUint {
    pow2(budget.h) * budget.reduced_sum()
}

/// `f(2^k/(U+1))`.
pub fn bidding_upper_bound(budget: QueryBudget) -> f64 {
    bidding_f_ratio(&pow2(budget.k), &(bidding_u(budget) + 1u32))
}

/// `f(2^k/<<k,H>>)`, with the ratio kept exact.
pub fn bidding_lower_bound(budget: QueryBudget) -> f64 {
    bidding_f_ratio(&pow2(budget.k), &budget.full_sum())
}

/// Natural log of `b^{n+u+1}/(b^n - 1)` at `ln b = t`.
pub fn bid_objective_ln(t: f64, n: f64, u: f64) -> f64 {
    (n + u + 1.0) * t - ln_exp_m1(n * t)
}

/// `ln(e^x - 1)` without overflow for large `x`.
fn ln_exp_m1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// Base minimising the bidding objective: `((n+U+1)/(U+1))^{1/n}` with `n = 2^k`.
pub fn bidding_default_base(budget: QueryBudget) -> f64 {
    let n = big_to_f64(&pow2(budget.k));
    let u = big_to_f64(&bidding_u(budget));
    ((n / (u + 1.0)).ln_1p() / n).exp()
}

/// Golden-section minimum of the bidding objective over `b`, as a check on
/// the closed form.
pub fn bidding_upper_numeric(budget: QueryBudget) -> (f64, f64) {
    let n = big_to_f64(&pow2(budget.k));
    let u = big_to_f64(&bidding_u(budget));
    let (t, v) = golden_section_min(
        |t| bid_objective_ln(t, n, u),
        BASE_BRACKET.0.ln(),
        BASE_BRACKET.1.ln(),
        GOLDEN_TOL,
    );
    (t.exp(), v.exp())
}

/// `alpha^{p+1+phi}/(alpha^p - 1)`; infinite for `alpha <= 1`.
pub fn fpb_lower_bound(p: u32, phi: u32, alpha: f64) -> Result<f64> {
    if p == 0 || phi >= p {
        return Err(Error::domain(format!("need p >= 1 and 0 <= phi < p, got p={p}, phi={phi}")));
    }
    if alpha.is_nan() {
        return Err(Error::domain("alpha is NaN"));
    }
    if alpha <= 1.0 {
        return Ok(f64::INFINITY);
    }
    let t = alpha.ln();
    let (p, phi) = (f64::from(p), f64::from(phi));
    Ok(((p + 1.0 + phi) * t - ln_exp_m1(p * t)).exp())
}

/// `f_m(beta) = (beta^m - 1)/(beta^{m-1} - 1) = beta + (beta-1)/(beta^{m-1}-1)`
/// at `ln beta = t`, for `m >= 2`.
pub fn knapsack_f(m: f64, t: f64) -> f64 {
    t.exp() + t.exp_m1() / ((m - 1.0) * t).exp_m1()
}

/// `g_m(beta) = ((beta^2 - beta + 1)/(2 beta + 1))^{1/(m+1)}`.
pub fn knapsack_g(m: f64, beta: f64) -> f64 {
    ((beta * beta - beta + 1.0) / (2.0 * beta + 1.0)).powf(1.0 / (m + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnapsackBounds {
    /// `+inf` when no `(s, m)` with `m >= 2` fits (no-advice regime).
    #[serde(serialize_with = "ser_extended")]
    pub upper_cr: f64,
    pub upper_sm: Option<(u64, u64)>,
    pub no_advice: bool,
    /// `max(1, lower_raw)`.
    pub lower_cr: f64,
    pub lower_raw: f64,
    pub lower_sm: (u64, u64),
    /// False when the search space was too large to enumerate exactly.
    pub exact: bool,
}

/// Caps above this are scanned approximately.
const EXACT_CAP: u128 = 1_000_000_000_000;

/// Pairs `(s, floor(cap/s))` for the largest `s` in each quotient block.
fn quotient_blocks(cap: u128) -> (Vec<(u128, u128)>, bool) {
    let mut out = Vec::new();
    if cap <= EXACT_CAP {
        let mut s = 1u128;
        while s <= cap {
            let q = cap / s;
            let s_max = cap / q;
            out.push((s_max, q));
            s = s_max + 1;
        }
        return (out, true);
    }
    let points = 200_000u32;
    let ln_cap = (cap as f64).ln();
    let mut last = 0u128;
    for i in 0..=points {
        let s = ((ln_cap * f64::from(i) / f64::from(points)).exp() as u128).clamp(1, cap);
        let q = cap / s;
        let s_max = cap / q;
        if s_max != last {
            out.push((s_max, q));
            last = s_max;
        }
    }
    (out, false)
}

fn cap_to_u128(x: &BigUint) -> u128 {
    x.to_u128().unwrap_or(u128::MAX)
}

/// Upper bound `min f_m((U/L)^{1/s})` over `s*m <= floor(2^{k-H}/<<k-H,H>>)`,
/// `m >= 2`; lower bound `min g_m` over `s*m <= ceil(2^k/<<k,H>>) + 1`.
pub fn knapsack_bounds(budget: QueryBudget, ratio: f64) -> Result<KnapsackBounds> {
    check_ratio(ratio)?;
    let ln_r = ratio.ln();
    let (up_blocks, up_exact) = quotient_blocks(cap_to_u128(&find_capacity(budget)));
    let mut upper: Option<(f64, (u64, u64))> = None;
    for (s, m) in up_blocks {
        if m < 2 {
            continue;
        }
        let v = knapsack_f(m as f64, ln_r / s as f64);
        if upper.is_none_or(|(best, _)| v < best) {
            upper = Some((v, (s as u64, m as u64)));
        }
    }

    let lower_cap = cap_to_u128(&(find_ceiling_ceil(budget) + 1u32));
    let (low_blocks, low_exact) = quotient_blocks(lower_cap);
    let mut lower = (f64::INFINITY, (1u64, 1u64));
    for (s, q) in low_blocks {
        let beta = (ln_r / s as f64).exp();
        for m in [1, q] {
            let v = knapsack_g(m as f64, beta);
            if v < lower.0 {
                lower = (v, (s as u64, m as u64));
            }
        }
    }

    Ok(KnapsackBounds {
        upper_cr: upper.map_or(f64::INFINITY, |u| u.0),
        upper_sm: upper.map(|u| u.1),
        no_advice: upper.is_none(),
        lower_cr: lower.0.max(1.0),
        lower_raw: lower.0,
        lower_sm: lower.1,
        exact: up_exact && low_exact,
    })
}

/// Advice size that lets an oblivious algorithm tolerating a `(1/3 - c)`
/// fraction of errors match `k` bits of perfect advice:
/// `k / ((2/3 + c)(1 - H((1/3 - c)/(2/3 + c)))) + 1`.
pub fn resource_augmentation_size(k: u32, c: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("resource augmentation needs k >= 1"));
    }
    if !(c > 0.0 && c < 1.0 / 3.0) {
        return Err(Error::domain(format!("c must lie in (0, 1/3), got {c}")));
    }
    let lead = 2.0 / 3.0 + c;
    let p = (1.0 / 3.0 - c) / lead;
    Ok(f64::from(k) / (lead * (1.0 - entropy_unchecked(p))) + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustTsBounds {
    pub u: BigUint,
    pub l: BigUint,
    pub upper_cr: f64,
    pub lower_cr: f64,
    /// `(M/m)^rho`, the ratio guaranteed under arbitrary advice.
    pub robustness: f64,
}

/// `(M/m)^{(2rho-1)/(U+1)}` and `(M/m)^{(2rho-1)/(L+1)}` where
/// `L = ceil(2^k/<<k-H,H>>)` (note the reduced sum in the denominator).
pub fn robust_ts_bounds(budget: QueryBudget, ratio: f64, rho: f64) -> Result<RobustTsBounds> {
    check_ratio(ratio)?;
    check_rho(rho)?;
    let u = find_capacity(budget);
    let l = ceil_div(&pow2(budget.k), &budget.reduced_sum());
    let scaled = ratio.ln() * (2.0 * rho - 1.0);
    Ok(RobustTsBounds {
        upper_cr: (scaled / (big_to_f64(&u) + 1.0)).exp(),
        lower_cr: (scaled / (big_to_f64(&l) + 1.0)).exp(),
        robustness: (ratio.ln() * rho).exp(),
        u,
        l,
    })
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.5 && rho <= 1.0) {
        return Err(Error::domain(format!("rho must lie in (1/2, 1], got {rho}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustBiddingBounds {
    pub upper_cr: f64,
    /// Base `b` of the cyclic family attaining `upper_cr`.
    pub base: f64,
    /// Absent when the lower-bound constraint is undefined (`k = 0`).
    pub lower_cr: Option<f64>,
}

/// Feasible interval of `ln b` for `b^{2e}/(b^e - 1) <= r`, intersected
/// with the search bracket. `y = b^e` must satisfy `y^2 - r y + r <= 0`.
fn robust_interval(e: f64, r: f64) -> (f64, f64) {
    let disc = (r * r - 4.0 * r).max(0.0).sqrt();
    let (y_lo, y_hi) = ((r - disc) / 2.0, (r + disc) / 2.0);
    let lo = (y_lo.ln() / e).max(BASE_BRACKET.0.ln());
    let hi = (y_hi.ln() / e).min(BASE_BRACKET.1.ln());
    (lo, hi.max(lo))
}

/// r-robust bidding: minimise `b^{2^k+U+1}/(b^{2^k}-1)` subject to
/// `b^{2^{k+1}}/(b^{2^k}-1) <= r`; the lower side minimises
/// `a^{2^k+L+1}/(a^{2^k}-1)` subject to `a^{2k}/(a^k-1) <= r`, `L = <<k,H>>`.
pub fn robust_bidding_bounds(budget: QueryBudget, r: f64) -> Result<RobustBiddingBounds> {
    if r.is_nan() || r < 4.0 || !r.is_finite() {
        return Err(Error::domain(format!("robustness target r must be finite and >= 4, got {r}")));
    }
    let n = big_to_f64(&pow2(budget.k));
    let u = big_to_f64(&bidding_u(budget));
    let (lo, hi) = robust_interval(n, r);
    let (t, v) = golden_section_min(|t| bid_objective_ln(t, n, u), lo, hi, GOLDEN_TOL);

    let lower_cr = (budget.k > 0).then(|| {
        let l = big_to_f64(&budget.full_sum());
        let (lo, hi) = robust_interval(f64::from(budget.k), r);
        golden_section_min(|t| bid_objective_ln(t, n, l), lo, hi, GOLDEN_TOL).1.exp()
    });
    Ok(RobustBiddingBounds {
        upper_cr: v.exp(),
        base: t.exp(),
        lower_cr,
    })
}

/// Analytic estimate of `ln(UB/LB)` for bidding at `H = tau k`.
pub fn bidding_gap_estimate(k: u32, tau: f64) -> f64 {
    let k = f64::from(k);
    let e1 = k * (1.0 - tau) * (1.0 - entropy_unchecked(tau / (1.0 - tau)));
    let e2 = k * (1.0 - entropy_unchecked(tau));
    (8.0 * k * tau * (1.0 - tau)).sqrt() * e1 / e1.exp2() - e2 / e2.exp2()
}

/// A named bound value with the inputs it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
    pub formula_inputs: Vec<(String, String)>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        BoundReport { name: name.into(), value, formula_inputs: Vec::new() }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.formula_inputs.push((key.to_string(), value.to_string()));
        self
    }
}

/// Finite values as numbers; infinities as the strings `"inf"`/`"-inf"`.
pub fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Exact `2^k/<<k,H>>`; `1` when `k = 0`.
pub fn lower_l(budget: QueryBudget) -> BigRational {
    let den = budget.full_sum();
    if den.is_zero() {
        return BigRational::one();
    }
    BigRational::new(pow2(budget.k).into(), den.into())
}
