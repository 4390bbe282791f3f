use num_rational::BigRational;

use super::query::{Entry, Query, Transcript};
use crate::advice::{AdviceOracle, ErrorReport};
use crate::bounds::QueryBudget;
use crate::error::Result;

/// Berlekamp potential of the questioner's state after each possible answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outlook {
    pub yes: BigRational,
    pub no: BigRational,
}

/// An adaptive questioner. Deterministic: the same answers always produce
/// the same queries.
pub trait Questioner: Clone {
    type Output;

    /// The next query, or `None` once the questioner is done.
    fn next_query(&self) -> Option<Query>;

    /// Potential after answering `query` with yes / no.
    fn outlook(&self, query: &Query) -> Outlook;

    fn absorb(&mut self, query: &Query, answer: bool);

    fn finish(&self) -> Self::Output;
}

/// Anything that answers queries online.
pub trait Responder {
    fn respond(&mut self, step: usize, query: &Query, outlook: &Outlook) -> bool;
}

/// Result of one game run against an advice oracle.
#[derive(Debug, Clone)]
pub struct Session<O> {
    pub output: O,
    pub transcript: Transcript,
    pub report: ErrorReport,
}

/// Plays `questioner` against any responder; returns the output and the
/// transcript (with no lie positions, which only a truth holder knows).
pub fn play<Q: Questioner, R: Responder + ?Sized>(
    mut questioner: Q,
    responder: &mut R,
    budget: QueryBudget,
) -> (Q::Output, Transcript) {
    let mut transcript = Transcript::new(budget);
    let mut step = 0;
    while let Some(query) = questioner.next_query() {
        let outlook = questioner.outlook(&query);
        let response = responder.respond(step, &query, &outlook);
        questioner.absorb(&query, response);
        transcript.entries.push(Entry { query, response });
        step += 1;
    }
    (questioner.finish(), transcript)
}

/// Plays `questioner` against an advice oracle. A minimax policy is
/// resolved first by searching lie patterns that maximise `damage`.
pub fn run_session<Q: Questioner>(
    questioner: Q,
    oracle: &mut AdviceOracle,
    damage: &dyn Fn(&Q::Output) -> f64,
) -> Result<Session<Q::Output>> {
    oracle.plan(&questioner, damage)?;
    let budget = oracle.budget();
    let (output, mut transcript) = play(questioner, oracle, budget);
    transcript.lie_positions = oracle.lies().to_vec();
    let report = oracle.report();
    Ok(Session { output, transcript, report })
}
