//! Randomised end-to-end properties across modules.

use num_bigint::BigUint;
use proptest::prelude::*;
use ulam_core::advice::{AdviceOracle, ErrorPolicy, Truth};
use ulam_core::bounds::{bidding_upper_bound, partial_binomial_sum, pow2, ts_bounds, QueryBudget};
use ulam_core::games::identify;
use ulam_core::problems::{bidding_family, bidding_truth, bidding_with_advice, ts_grid, ts_run, ts_truth, PriceInstance};

/// `(k, H)` with `k <= 10` and `2H <= k`, `H <= 2`.
fn budgets() -> impl Strategy<Value = QueryBudget> {
    (1u32..=10).prop_flat_map(|k| (Just(k), 0..=(k / 2).min(2))).prop_map(|(k, h)| QueryBudget::new(k, h).unwrap())
}

/// Up to `h` distinct lie positions among `k` queries.
fn lies(k: u32, h: u32) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..k as usize).collect::<Vec<_>>(), 0..=h as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_sums_complement(n in 1u64..=80, m in 0u64..80) {
        prop_assume!(m < n);
        let total = partial_binomial_sum(n, m).unwrap() + partial_binomial_sum(n, n - m - 1).unwrap();
        prop_assert_eq!(total, pow2(n as u32));
    }

    #[test]
    fn ts_ratio_within_bound(
        (b, positions) in budgets().prop_flat_map(|b| (Just(b), lies(b.k, b.h))),
        prices in proptest::collection::vec(1.0f64..=100.0, 1..40),
    ) {
        let inst = PriceInstance::new(prices, 1.0, 100.0).unwrap();
        let grid = ts_grid(b, 1.0, 100.0).unwrap();
        let mut oracle = AdviceOracle::new(ts_truth(&inst, &grid), b, ErrorPolicy::Fixed(positions)).unwrap();
        let out = ts_run(&inst, b, &mut oracle).unwrap();
        let bound = ts_bounds(b, 100.0).unwrap().upper_cr;
        prop_assert!(out.ratio <= bound * (1.0 + 1e-9), "ratio {} > {}", out.ratio, bound);
    }

    #[test]
    fn bidding_ratio_within_bound(
        (b, positions) in budgets().prop_filter("k <= 8", |b| b.k <= 8).prop_flat_map(|b| (Just(b), lies(b.k, b.h))),
        ln_u in 0.0f64..40.0,
    ) {
        let family = bidding_family(b, None).unwrap();
        let u = ln_u.exp();
        let mut oracle = AdviceOracle::new(bidding_truth(&family, u), b, ErrorPolicy::Fixed(positions)).unwrap();
        let out = bidding_with_advice(b, None, u, &mut oracle).unwrap();
        prop_assert!(out.ratio <= bidding_upper_bound(b) + 1e-9);
    }

    #[test]
    fn identify_recovers_truth(
        (b, positions) in budgets().prop_flat_map(|b| (Just(b), lies(b.k, b.h))),
        pick in 0.0f64..1.0,
    ) {
        let cap = u64::try_from(ulam_core::bounds::find_capacity(b)).unwrap();
        prop_assume!(cap >= 1);
        let x = 1 + ((cap as f64 * pick) as u64).min(cap - 1);
        let mut oracle = AdviceOracle::new(Truth::Index(x), b, ErrorPolicy::Fixed(positions)).unwrap();
        let session = identify(cap, b, &mut oracle).unwrap();
        prop_assert_eq!(session.output, Some(x));
    }

    #[test]
    fn policy_strings_round_trip(eta in 0usize..8, seed in any::<u64>(), fixed in proptest::collection::vec(0usize..64, 0..5)) {
        for p in [ErrorPolicy::Random { eta, seed }, ErrorPolicy::Fixed(fixed.clone()), ErrorPolicy::Greedy] {
            prop_assert_eq!(p.to_string().parse::<ErrorPolicy>().unwrap(), p);
        }
    }
}

#[test]
fn capacity_is_monotone_in_k() {
    for h in 0..=3u32 {
        let mut prev = BigUint::from(0u32);
        for k in 2 * h..=40 {
            let cap = ulam_core::bounds::find_capacity(QueryBudget::new(k, h).unwrap());
            assert!(cap >= prev, "k={k} H={h}");
            prev = cap;
        }
    }
}
