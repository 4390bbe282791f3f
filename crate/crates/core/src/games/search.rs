//! Games over a hidden cyclic permutation `A` of `0..n`, where the hidden
//! value is the index `x` with `A[x] = 0`, so `A[i] = (i - x) mod n`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::discrete::{weighting_questioner, DiscreteState, IdentifyQuestioner, Weights};
use super::query::Query;
use super::session::{play, run_session, Outlook, Questioner, Responder, Session};
use super::transcript_lies;
use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{find_capacity, mu_bounds, QueryBudget};
use crate::error::{Error, Result};

/// Rank of index `i` when the minimum sits at `x`.
pub fn cyclic_rank(i: u64, x: u64, n: u64) -> u64 {
    (i + n - x % n) % n
}

/// Balanced partition of `0..n` into `m` consecutive blocks, `1`-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocks {
    pub n: u64,
    pub m: u64,
}

impl Blocks {
    /// Last index of block `b`.
    pub fn end(&self, b: u64) -> u64 {
        let (base, extra) = (self.n / self.m, self.n % self.m);
        b * base + b.min(extra) - 1
    }

    /// Block containing index `i`.
    pub fn block_of(&self, i: u64) -> u64 {
        let (base, extra) = (self.n / self.m, self.n % self.m);
        let big = extra * (base + 1);
        if i < big {
            i / (base + 1) + 1
        } else {
            extra + (i - big) / base + 1
        }
    }

    pub fn max_size(&self) -> u64 {
        self.n.div_ceil(self.m)
    }
}

/// Identify over blocks; outputs the largest index of the identified block.
#[derive(Debug, Clone)]
pub struct MinCyclicQuestioner {
    inner: IdentifyQuestioner,
    blocks: Blocks,
}

impl MinCyclicQuestioner {
    pub fn blocks(&self) -> Blocks {
        self.blocks
    }
}

impl Questioner for MinCyclicQuestioner {
    type Output = u64;

    fn next_query(&self) -> Option<Query> {
        match self.inner.next_query()? {
            Query::Le(a) => Some(Query::Le(self.blocks.end(a.max(1)))),
            other => Some(other),
        }
    }

    fn outlook(&self, query: &Query) -> Outlook {
        match query {
            Query::Le(i) => self.inner.outlook(&Query::Le(self.blocks.block_of(*i))),
            other => self.inner.outlook(other),
        }
    }

    fn absorb(&mut self, query: &Query, answer: bool) {
        if let Query::Le(i) = query {
            self.inner.absorb(&Query::Le(self.blocks.block_of(*i)), answer);
        }
    }

    fn finish(&self) -> u64 {
        self.inner.finish().map_or(self.blocks.n - 1, |b| self.blocks.end(b))
    }
}

/// Budgets up to this `k` get a certified block count.
pub const CERTIFY_MAX_K: u32 = 12;

/// `(k, H, blocks)` to whether the block count is certified.
type CertCache = Mutex<HashMap<(u32, u32, u64), bool>>;

fn certification_cache() -> &'static CertCache {
    static CACHE: OnceLock<CertCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn identifies_everywhere(state: &DiscreteState) -> bool {
    let Some(a) = state.threshold() else {
        return state.live_count() <= 1;
    };
    [true, false].into_iter().all(|answer| {
        let mut next = state.clone();
        next.absorb(a, answer);
        identifies_everywhere(&next)
    })
}

/// True when the weighting questioner identifies `x in 1..=m` against
/// every responder with at most `H` lies. Exhaustive over `2^k` leaves.
pub fn weighting_certified(m: u64, budget: QueryBudget) -> Result<bool> {
    let key = (budget.k, budget.h, m);
    if let Some(&v) = certification_cache().lock().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let q = weighting_questioner(m, budget)?;
    let ok = identifies_everywhere(q.state());
    certification_cache().lock().expect("cache lock").insert(key, ok);
    Ok(ok)
}

fn big_to_u64(x: &BigUint) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

/// Number of blocks `min_cyclic` splits `n` indices into.
///
/// For `k <= 12` this is the largest `m <= min(n, floor(2^k/<<k,H>>))` for
/// which weighting is certified; it is never below
/// `floor(2^{k-H}/<<k-H,H>>)`. Larger budgets use that floor directly.
pub fn min_cyclic_blocks(n: u64, budget: QueryBudget) -> Result<u64> {
    let literal = big_to_u64(&find_capacity(budget)).max(1);
    if budget.h == 0 || budget.k > CERTIFY_MAX_K {
        return Ok(literal.min(n));
    }
    let ceiling = big_to_u64(&mu_bounds(budget).upper).min(n);
    for m in (literal.min(n) + 1..=ceiling).rev() {
        if weighting_certified(m, budget)? {
            return Ok(m);
        }
    }
    Ok(literal.min(n))
}

pub fn min_cyclic_questioner(n: u64, budget: QueryBudget) -> Result<MinCyclicQuestioner> {
    if n == 0 {
        return Err(Error::domain("min_cyclic needs n >= 1"));
    }
    let m = min_cyclic_blocks(n, budget)?;
    Ok(MinCyclicQuestioner { inner: weighting_questioner(m, budget)?, blocks: Blocks { n, m } })
}

/// Finds an index of small rank in a hidden cyclic permutation of `0..n`;
/// the oracle answers "x <= i?" about the position `x` of the minimum.
pub fn min_cyclic(n: u64, budget: QueryBudget, oracle: &mut AdviceOracle) -> Result<Session<u64>> {
    let q = min_cyclic_questioner(n, budget)?;
    let x = match oracle.truth() {
        Truth::Index(x) => *x,
        Truth::Real(_) => return Err(Error::domain("min_cyclic needs an index truth")),
    };
    run_session(q, oracle, &|j: &u64| cyclic_rank(*j, x, n) as f64)
}

/// `ceil(n <<k-H,H>> / 2^{k-H})`: the rank `min_cyclic` guarantees.
pub fn min_cyclic_guarantee(n: u64, budget: QueryBudget) -> u64 {
    let num = BigUint::from(n) * budget.reduced_sum();
    big_to_u64(&crate::bounds::ceil_div(&num, &crate::bounds::pow2(budget.k - budget.h)))
}

/// Per-candidate lie counts over `0..n`.
#[derive(Debug, Clone)]
pub struct PointState {
    lies: Vec<u32>,
    remaining: u32,
    weights: Weights,
}

impl PointState {
    pub fn new(n: u64, budget: QueryBudget) -> Result<Self> {
        Ok(PointState { lies: vec![0; n as usize], remaining: budget.k, weights: Weights::new(budget)? })
    }

    pub fn n(&self) -> u64 {
        self.lies.len() as u64
    }

    pub fn live(&self) -> impl Iterator<Item = u64> + '_ {
        let h = self.weights.tolerance();
        self.lies.iter().enumerate().filter(move |(_, &l)| l <= h).map(|(i, _)| i as u64)
    }

    pub fn lies(&self, x: u64) -> u32 {
        self.lies[x as usize]
    }

    pub fn split_weights(&self, query: &Query) -> (u128, u128) {
        let q = self.remaining.saturating_sub(1);
        let (mut yes, mut no) = (0u128, 0u128);
        for (x, &l) in self.lies.iter().enumerate() {
            let (stay, charged) = (self.weights.w(q, l), self.weights.w(q, l + 1));
            if query.holds_for(x as u64) {
                yes += stay;
                no += charged;
            } else {
                yes += charged;
                no += stay;
            }
        }
        (yes, no)
    }

    pub fn absorb(&mut self, query: &Query, answer: bool) {
        for (x, l) in self.lies.iter_mut().enumerate() {
            if query.holds_for(x as u64) != answer {
                *l = l.saturating_add(1);
            }
        }
        self.remaining = self.remaining.saturating_sub(1);
    }

    fn slope(&self, x: u64) -> u128 {
        self.weights.slope(self.remaining.saturating_sub(1), self.lies(x))
    }

    /// Output index minimising the worst rank over live candidates.
    pub fn best_output(&self) -> u64 {
        let n = self.n();
        let live: Vec<u64> = self.live().collect();
        (0..n)
            .min_by_key(|&e| live.iter().map(|&x| cyclic_rank(e, x, n)).max().unwrap_or(0))
            .unwrap_or(0)
    }
}

/// Questioners for the search game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchStrategy {
    /// Prefix queries balancing Berlekamp weight.
    ComparisonWeighting,
    /// Arbitrary subsets chosen greedily to balance Berlekamp weight.
    BalancedSubset,
    /// Binary digits of `x`, cycling.
    Bits,
    /// Halve the live hull, ignoring lie counts.
    NaiveHalving,
    /// Independent fair coin per index.
    Random(u64),
}

impl SearchStrategy {
    /// Every strategy used in exhaustive checks.
    pub fn family() -> Vec<SearchStrategy> {
        let mut all = vec![
            SearchStrategy::ComparisonWeighting,
            SearchStrategy::BalancedSubset,
            SearchStrategy::Bits,
            SearchStrategy::NaiveHalving,
        ];
        all.extend((0..4).map(SearchStrategy::Random));
        all
    }
}

#[derive(Debug, Clone)]
pub struct SearchQuestioner {
    state: PointState,
    strategy: SearchStrategy,
    step: u32,
}

impl SearchQuestioner {
    pub fn new(n: u64, budget: QueryBudget, strategy: SearchStrategy) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("search needs n >= 1"));
        }
        Ok(SearchQuestioner { state: PointState::new(n, budget)?, strategy, step: 0 })
    }

    fn comparison_threshold(&self) -> u64 {
        let n = self.state.n();
        let total: u128 = (0..n).map(|x| self.state.slope(x)).sum();
        let (mut best, mut best_gap, mut prefix) = (0, u128::MAX, 0u128);
        for a in 0..n.saturating_sub(1) {
            prefix += self.state.slope(a);
            let gap = (2 * prefix).abs_diff(total);
            if gap < best_gap {
                best = a;
                best_gap = gap;
            }
        }
        best
    }

    fn balanced_subset(&self) -> Query {
        let mut live: Vec<(u128, u64)> = self.state.live().map(|x| (self.state.slope(x), x)).collect();
        let total: u128 = live.iter().map(|p| p.0).sum();
        live.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut chosen = Vec::new();
        let mut acc = 0u128;
        for (s, x) in live {
            if 2 * (acc + s) <= total {
                acc += s;
                chosen.push(x);
            }
        }
        Query::subset(chosen)
    }
}

impl Questioner for SearchQuestioner {
    type Output = u64;

    fn next_query(&self) -> Option<Query> {
        if self.state.remaining == 0 {
            return None;
        }
        let n = self.state.n();
        Some(match &self.strategy {
            SearchStrategy::ComparisonWeighting => Query::Le(self.comparison_threshold()),
            SearchStrategy::BalancedSubset => self.balanced_subset(),
            SearchStrategy::Bits => {
                let width = (64 - n.saturating_sub(1).leading_zeros()).max(1);
                let bit = self.step % width;
                Query::subset((0..n).filter(|x| x >> bit & 1 == 1))
            }
            SearchStrategy::NaiveHalving => {
                let live: Vec<u64> = self.state.live().collect();
                match (live.first(), live.last()) {
                    (Some(lo), Some(hi)) => Query::Le((lo + hi) / 2),
                    _ => Query::Le(0),
                }
            }
            SearchStrategy::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(u64::from(self.step)));
                Query::subset((0..n).filter(|_| rng.gen_bool(0.5)))
            }
        })
    }

    fn outlook(&self, query: &Query) -> Outlook {
        let (yes, no) = self.state.split_weights(query);
        Outlook { yes: BigRational::from_integer(yes.into()), no: BigRational::from_integer(no.into()) }
    }

    fn absorb(&mut self, query: &Query, answer: bool) {
        self.state.absorb(query, answer);
        self.step += 1;
    }

    fn finish(&self) -> u64 {
        self.state.best_output()
    }
}

/// A permutation consistent with the answers that ranks the output high.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Position of the minimum (`A[x] = 0`).
    pub rotation: u64,
    /// `A[e]` for the questioner's output `e`.
    pub rank: u64,
    pub permutation: Vec<u64>,
}

/// Responder for the search game that keeps the heavier half of its own
/// Berlekamp state over rank space (ties answer "no").
#[derive(Debug, Clone)]
pub struct SearchAdversary {
    state: PointState,
}

pub fn adversary_search(n: u64, budget: QueryBudget) -> Result<SearchAdversary> {
    if n == 0 {
        return Err(Error::domain("search needs n >= 1"));
    }
    Ok(SearchAdversary { state: PointState::new(n, budget)? })
}

impl SearchAdversary {
    pub fn state(&self) -> &PointState {
        &self.state
    }

    /// Rotation among the live candidates maximising the rank of `e`.
    pub fn witness(&self, e: u64) -> Option<Witness> {
        let n = self.state.n();
        let x = self.state.live().max_by_key(|&x| (cyclic_rank(e, x, n), std::cmp::Reverse(x)))?;
        Some(Witness {
            rotation: x,
            rank: cyclic_rank(e, x, n),
            permutation: (0..n).map(|i| cyclic_rank(i, x, n)).collect(),
        })
    }
}

impl Responder for SearchAdversary {
    fn respond(&mut self, _step: usize, query: &Query, _: &Outlook) -> bool {
        let (yes, no) = self.state.split_weights(query);
        let answer = yes > no;
        self.state.absorb(query, answer);
        answer
    }
}

/// One search game: the questioner's output and the adversary's witness.
#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub output: u64,
    pub witness: Option<Witness>,
    /// Lies the witness charges against the transcript.
    pub witness_lies: Option<u32>,
    pub transcript: super::query::Transcript,
}

pub fn play_search(n: u64, budget: QueryBudget, strategy: SearchStrategy) -> Result<SearchOutcome> {
    let questioner = SearchQuestioner::new(n, budget, strategy)?;
    let mut adversary = adversary_search(n, budget)?;
    let (output, transcript) = play(questioner, &mut adversary, budget);
    let witness = adversary.witness(output);
    let witness_lies = witness.as_ref().map(|w| transcript_lies(w.rotation, &transcript));
    Ok(SearchOutcome { output, witness, witness_lies, transcript })
}

/// `floor(n <<k,H>> / 2^k)`.
pub fn search_floor(n: u64, budget: QueryBudget) -> u64 {
    big_to_u64(&(BigUint::from(n) * budget.full_sum() / crate::bounds::pow2(budget.k)))
}
