//! Exact combinatorics and closed-form competitive-ratio bounds.

mod combinatorics;
mod entropy;
mod optimize;
mod ratios;

pub use combinatorics::{
    berlekamp_weight, find_capacity, find_ceiling_ceil, lower_ratio, mu_bounds,
    partial_binomial_sum, pow2, MuBounds, QueryBudget, WeightTable,
};
pub(crate) use combinatorics::ceil_div;
pub use entropy::{entropy, entropy_bracket, partial_sum_entropy_bracket};
pub use optimize::golden_section_min;
pub use ratios::{
    big_ln, big_to_f64, bid_objective_ln, bidding_default_base, bidding_f, bidding_gap_estimate,
    bidding_lower_bound, bidding_u, bidding_upper_bound, bidding_upper_numeric, fpb_lower_bound,
    knapsack_bounds, knapsack_f, knapsack_g, lower_l, ratio_to_f64, resource_augmentation_size,
    robust_bidding_bounds, robust_ts_bounds, ser_extended, ts_bounds, BoundReport,
    KnapsackBounds, RobustBiddingBounds, RobustTsBounds, TsBounds, BASE_BRACKET, GOLDEN_TOL,
};
pub(crate) use ratios::check_rho;
