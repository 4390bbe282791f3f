//! Partial sums of binomial coefficients and the query budget they are
//! evaluated against.
//!
//! `<<N, m>>` below denotes `sum_{j=0..m} C(N, j)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Advice size `k` together with the error tolerance `H`, `2H <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBudget")]
pub struct QueryBudget {
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u32,
}

#[derive(Deserialize)]
struct RawBudget {
    k: u32,
    #[serde(rename = "H")]
    h: u32,
}

impl TryFrom<RawBudget> for QueryBudget {
    type Error = Error;

    fn try_from(raw: RawBudget) -> Result<Self> {
        QueryBudget::new(raw.k, raw.h)
    }
}

impl QueryBudget {
    pub fn new(k: u32, h: u32) -> Result<Self> {
        if 2 * u64::from(h) > u64::from(k) {
            return Err(Error::Tolerance { k, h });
        }
        Ok(QueryBudget { k, h })
    }

    /// Perfect advice: `k` bits, no tolerated errors.
    pub fn perfect(k: u32) -> Self {
        QueryBudget { k, h: 0 }
    }

    /// `<<k-H, H>>`.
    pub fn reduced_sum(&self) -> BigUint {
        berlekamp_weight(self.k - self.h, i64::from(self.h))
    }

    /// `<<k, H>>`.
    pub fn full_sum(&self) -> BigUint {
        berlekamp_weight(self.k, i64::from(self.h))
    }
}

/// Exact `sum_{j=0..m} C(n, j)`; `m > n` is a domain error.
pub fn partial_binomial_sum(n: u64, m: u64) -> Result<BigUint> {
    if m > n {
        return Err(Error::domain(format!(
            "partial sum <<{n},{m}>> requires m <= N"
        )));
    }
    Ok(partial_sum_unchecked(n, m))
}

fn partial_sum_unchecked(n: u64, m: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for j in 1..=m {
        term = term * BigUint::from(n - j + 1) / BigUint::from(j);
        total += &term;
    }
    total
}

/// Berlekamp weight of a candidate with `q` questions left and lie slack
/// `slack`: `<<q, min(slack, q)>>`, and zero for a negative slack (dead
/// candidate). This is the form that satisfies Pascal's rule
/// `w(q, s) = w(q-1, s) + w(q-1, s-1)` for every `q >= 1`.
pub fn berlekamp_weight(q: u32, slack: i64) -> BigUint {
    if slack < 0 {
        return BigUint::zero();
    }
    let m = (slack as u64).min(u64::from(q));
    partial_sum_unchecked(u64::from(q), m)
}

/// Precomputed `berlekamp_weight(q, s)` for `q <= k`, `s <= h`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    h: u32,
    rows: Vec<Vec<BigUint>>,
}

impl WeightTable {
    pub fn new(k: u32, h: u32) -> Self {
        let rows = (0..=k)
            .map(|q| (0..=h).map(|s| berlekamp_weight(q, i64::from(s))).collect())
            .collect();
        WeightTable { h, rows }
    }

    /// Weight for `q` remaining questions and `lies` lies already charged.
    pub fn weight(&self, q: u32, lies: u32) -> &BigUint {
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if lies > self.h {
            return ZERO.get_or_init(BigUint::zero);
        }
        &self.rows[q as usize][(self.h - lies) as usize]
    }

    pub fn tolerance(&self) -> u32 {
        self.h
    }
}

/// Bracket on the number of values `mu(k, H)` identifiable with `k` queries
/// and at most `H` lies: `floor(2^{k-H}/<<k-H,H>>) <= mu <= floor(2^k/<<k,H>>)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuBounds {
    pub lower: BigUint,
    pub upper: BigUint,
}

pub fn mu_bounds(budget: QueryBudget) -> MuBounds {
    let lower = pow2(budget.k - budget.h) / budget.reduced_sum();
    let upper = pow2(budget.k) / budget.full_sum();
    MuBounds { lower, upper }
}

/// `floor(2^{k-H} / <<k-H,H>>)`: how many values a Find questioner is
/// guaranteed to separate.
pub fn find_capacity(budget: QueryBudget) -> BigUint {
    pow2(budget.k - budget.h) / budget.reduced_sum()
}

/// `ceil(2^k / <<k,H>>)`.
pub fn find_ceiling_ceil(budget: QueryBudget) -> BigUint {
    let (q, r) = pow2(budget.k).div_rem(&budget.full_sum());
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `2^k / <<k,H>>` as an exact rational.
pub fn lower_ratio(budget: QueryBudget) -> BigRational {
    BigRational::new(pow2(budget.k).into(), budget.full_sum().into())
}

pub fn pow2(e: u32) -> BigUint {
    BigUint::one() << e as usize
}

pub(crate) fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(n: u64, m: u64) -> BigUint {
        // Pascal's triangle row, built additively.
        let mut row = vec![BigUint::one()];
        for _ in 0..n {
            let mut next = vec![BigUint::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row.iter().take(m as usize + 1).sum()
    }

    #[test]
    fn small_sums() {
        assert_eq!(partial_binomial_sum(4, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(partial_binomial_sum(4, 1).unwrap(), BigUint::from(5u32));
        assert_eq!(partial_binomial_sum(4, 4).unwrap(), BigUint::from(16u32));
        assert_eq!(partial_binomial_sum(10, 2).unwrap(), BigUint::from(56u32));
        assert_eq!(partial_binomial_sum(20, 4).unwrap(), BigUint::from(6196u32));
    }

    #[test]
    fn m_above_n_is_rejected() {
        assert!(matches!(partial_binomial_sum(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn budget_rejects_excess_tolerance() {
        assert_eq!(QueryBudget::new(3, 2), Err(Error::Tolerance { k: 3, h: 2 }));
        assert!(QueryBudget::new(0, 0).is_ok());
        assert!(QueryBudget::new(4, 2).is_ok());
        let parsed: std::result::Result<QueryBudget, _> =
            serde_json::from_str(r#"{"k":3,"H":2}"#);
        assert!(parsed.is_err());
    }

    #[test]
    fn mu_examples() {
        let mu = |k, h| {
            let b = mu_bounds(QueryBudget::new(k, h).unwrap());
            (b.lower, b.upper)
        };
        assert_eq!(mu(4, 0), (16u32.into(), 16u32.into()));
        assert_eq!(mu(4, 1), (2u32.into(), 3u32.into()));
        assert_eq!(mu(6, 1), (5u32.into(), 9u32.into()));
    }

    #[test]
    fn weight_clamps_above_q_and_dies_below_zero() {
        assert_eq!(berlekamp_weight(2, 5), BigUint::from(4u32));
        assert_eq!(berlekamp_weight(0, 1), BigUint::one());
        assert!(berlekamp_weight(7, -1).is_zero());
        for q in 1..12 {
            for s in -1..8 {
                assert_eq!(
                    berlekamp_weight(q, s),
                    berlekamp_weight(q - 1, s) + berlekamp_weight(q - 1, s - 1)
                );
            }
        }
    }

    proptest! {
        #[test]
        fn pascal_recurrence(n in 2u64..200, frac in 0.0f64..1.0) {
            let m = 1 + ((n - 2) as f64 * frac) as u64;
            prop_assert!(m >= 1 && m < n);
            let lhs = partial_binomial_sum(n, m).unwrap();
            let rhs = partial_binomial_sum(n - 1, m).unwrap()
                + partial_binomial_sum(n - 1, m - 1).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn matches_pascal_triangle(n in 0u64..40, frac in 0.0f64..=1.0) {
            let m = (n as f64 * frac) as u64;
            prop_assert_eq!(partial_binomial_sum(n, m).unwrap(), naive(n, m));
        }

        #[test]
        fn monotone_in_m(n in 1u64..120, frac in 0.0f64..1.0) {
            let m = (n as f64 * frac) as u64;
            let m = m.min(n - 1);
            prop_assert!(partial_binomial_sum(n, m).unwrap() <= partial_binomial_sum(n, m + 1).unwrap());
        }
    }
}
