//! Searching with lies: questioners with exact Berlekamp accounting and
//! adversarial responders.

mod continuous;
mod discrete;
mod query;
mod search;
mod session;

pub use continuous::{
    adversary_continuous, continuous_search, continuous_target, real_lies, ContinuousAdversary,
    ContinuousOutcome, ContinuousQuestioner, ContinuousState, Segment, ThresholdRule,
};
pub use discrete::{
    find, identify, identify_feasible, identify_questioner, weighting_questioner, DiscreteState,
    IdentifyQuestioner, Run, MAX_DISCRETE_K,
};
pub use query::{
    comparison_lie_runs, lies_against, lies_against_real, parse_rational, rational_string, Entry,
    Query, Transcript,
};
pub use search::{
    adversary_search, cyclic_rank, min_cyclic, min_cyclic_blocks, min_cyclic_guarantee,
    min_cyclic_questioner, play_search, search_floor, weighting_certified, Blocks,
    MinCyclicQuestioner, PointState, SearchAdversary, SearchOutcome, SearchQuestioner,
    SearchStrategy, Witness, CERTIFY_MAX_K,
};
pub use session::{play, run_session, Outlook, Questioner, Responder, Session};

/// Lies an integer hidden value `x` charges against a transcript.
pub fn transcript_lies(x: u64, transcript: &Transcript) -> u32 {
    lies_against(x, &transcript.answers())
}
