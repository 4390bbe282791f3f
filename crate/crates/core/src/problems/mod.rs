//! Online problems solved with advice from the search games.

mod bidding;
mod fpb;
mod knapsack;
mod serde_util;
mod timeseries;

pub use bidding::{
    bid_value, bidding_cost, bidding_family, bidding_robust_family, bidding_robust_with_advice,
    bidding_truth, bidding_with_advice, BidSequence, BiddingOutcome, CyclicFamily,
};
pub use fpb::{fpb_family_bound, fpb_family_ratio, fpb_simulate, fpb_worst_cost, ParallelBidStrategy};
pub use knapsack::{
    adversarial_levels, knapsack_adversarial_instances, knapsack_opt, knapsack_random_instance,
    knapsack_run, knapsack_truth, printed_ratio, KnapsackInstance, KnapsackItem,
    KnapsackOutcome, KnapsackPartition,
};
pub use timeseries::{
    accept_with_reservation, ts_adversarial_instances, ts_grid, ts_robust_grid, ts_robust_run,
    ts_run, ts_truth, PriceInstance, ReservationGrid, TsOutcome,
};
