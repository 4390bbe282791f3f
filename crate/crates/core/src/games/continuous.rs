//! The continuous game on `(0, 1]`: segments with exact rational endpoints.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::discrete::Weights;
use super::query::{lies_against_real, Query};
use super::session::{run_session, Outlook, Questioner, Responder, Session};
use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{pow2, QueryBudget};
use crate::error::Result;

/// Half-open segment `(lo, hi]` of candidates charged `lies` lies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub lo: BigRational,
    pub hi: BigRational,
    pub lies: u32,
}

fn int(x: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Debug, Clone)]
pub struct ContinuousState {
    segments: Vec<Segment>,
    remaining: u32,
    weights: Weights,
}

impl ContinuousState {
    pub fn new(budget: QueryBudget) -> Result<Self> {
        Ok(ContinuousState {
            segments: vec![Segment { lo: BigRational::zero(), hi: BigRational::one(), lies: 0 }],
            remaining: budget.k,
            weights: Weights::new(budget)?,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn remaining(&self) -> u32 {
        self.remaining
    }

    /// Total length of the consistent set.
    pub fn measure(&self) -> BigRational {
        self.segments.iter().map(|s| &s.hi - &s.lo).sum()
    }

    /// Smallest interval covering every consistent point.
    pub fn hull(&self) -> Option<(BigRational, BigRational)> {
        Some((self.segments.first()?.lo.clone(), self.segments.last()?.hi.clone()))
    }

    pub fn total_weight(&self) -> BigRational {
        self.segments
            .iter()
            .map(|s| (&s.hi - &s.lo) * int(self.weights.w(self.remaining, s.lies)))
            .sum()
    }

    /// Threshold splitting the weight exactly in half: the smallest root of
    /// the piecewise-linear `yes(a) - no(a)`.
    pub fn balanced_threshold(&self) -> Option<BigRational> {
        if self.remaining == 0 {
            return None;
        }
        let Some(first) = self.segments.first() else {
            return Some(BigRational::zero());
        };
        let q = self.remaining - 1;
        let rates: Vec<BigRational> = self.segments.iter().map(|s| int(self.weights.slope(q, s.lies))).collect();
        let total: BigRational = self.segments.iter().zip(&rates).map(|(s, c)| (&s.hi - &s.lo) * c).sum();
        if total.is_zero() {
            return Some(first.lo.clone());
        }
        let target = total / int(2);
        let mut before = BigRational::zero();
        for (s, c) in self.segments.iter().zip(&rates) {
            if c.is_zero() {
                continue;
            }
            let mass = (&s.hi - &s.lo) * c;
            if &before + &mass >= target {
                return Some(&s.lo + (&target - &before) / c);
            }
            before += mass;
        }
        unreachable!("cumulative rate reaches the total")
    }

    /// Weights after "yes" / "no" to "x <= a?".
    pub fn split_weights(&self, a: &BigRational) -> (BigRational, BigRational) {
        let q = self.remaining.saturating_sub(1);
        let (mut yes, mut no) = (BigRational::zero(), BigRational::zero());
        for s in &self.segments {
            let cut = a.clone().max(s.lo.clone()).min(s.hi.clone());
            let left = &cut - &s.lo;
            let right = &s.hi - &cut;
            let (stay, charged) = (int(self.weights.w(q, s.lies)), int(self.weights.w(q, s.lies + 1)));
            yes += &left * &stay + &right * &charged;
            no += left * charged + right * stay;
        }
        (yes, no)
    }

    pub fn absorb(&mut self, a: &BigRational, yes: bool) {
        let h = self.weights.tolerance();
        let mut next: Vec<Segment> = Vec::with_capacity(self.segments.len() + 1);
        let mut push = |seg: Segment| {
            if seg.lies > h || seg.lo >= seg.hi {
                return;
            }
            match next.last_mut() {
                Some(last) if last.lies == seg.lies && last.hi == seg.lo => last.hi = seg.hi,
                _ => next.push(seg),
            }
        };
        for s in &self.segments {
            if &s.lo < a {
                push(Segment { lo: s.lo.clone(), hi: s.hi.clone().min(a.clone()), lies: s.lies + u32::from(!yes) });
            }
            if &s.hi > a {
                push(Segment { lo: s.lo.clone().max(a.clone()), hi: s.hi.clone(), lies: s.lies + u32::from(yes) });
            }
        }
        self.segments = next;
        self.remaining = self.remaining.saturating_sub(1);
    }
}

/// Threshold rule of a continuous questioner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdRule {
    /// Exact weight halving.
    Balanced,
    /// Always the same threshold.
    Fixed(BigRational),
    /// Midpoint of the current hull, ignoring lie counts.
    HullMidpoint,
}

/// What a continuous questioner reports at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuousOutcome {
    /// Hull of the consistent set; `None` if it is empty.
    pub interval: Option<(BigRational, BigRational)>,
    pub consistent_measure: BigRational,
}

#[derive(Debug, Clone)]
pub struct ContinuousQuestioner {
    state: ContinuousState,
    rule: ThresholdRule,
}

impl ContinuousQuestioner {
    pub fn new(budget: QueryBudget, rule: ThresholdRule) -> Result<Self> {
        Ok(ContinuousQuestioner { state: ContinuousState::new(budget)?, rule })
    }

    pub fn state(&self) -> &ContinuousState {
        &self.state
    }
}

impl Questioner for ContinuousQuestioner {
    type Output = ContinuousOutcome;

    fn next_query(&self) -> Option<Query> {
        if self.state.remaining == 0 {
            return None;
        }
        let a = match &self.rule {
            ThresholdRule::Balanced => self.state.balanced_threshold()?,
            ThresholdRule::Fixed(a) => a.clone(),
            ThresholdRule::HullMidpoint => match self.state.hull() {
                Some((lo, hi)) => (lo + hi) / int(2),
                None => BigRational::new(1.into(), 2.into()),
            },
        };
        Some(Query::LeReal(a))
    }

    fn outlook(&self, query: &Query) -> Outlook {
        let (yes, no) = match query {
            Query::LeReal(a) => self.state.split_weights(a),
            _ => (BigRational::zero(), BigRational::zero()),
        };
        Outlook { yes, no }
    }

    fn absorb(&mut self, query: &Query, answer: bool) {
        if let Query::LeReal(a) = query {
            self.state.absorb(a, answer);
        }
    }

    fn finish(&self) -> ContinuousOutcome {
        ContinuousOutcome { interval: self.state.hull(), consistent_measure: self.state.measure() }
    }
}

/// `<<k,H>>/2^k`: the consistent measure both sides can force.
pub fn continuous_target(budget: QueryBudget) -> BigRational {
    BigRational::new(budget.full_sum().into(), pow2(budget.k).into())
}

/// C-Weighting against an oracle about a hidden `x in (0, 1]`.
pub fn continuous_search(budget: QueryBudget, oracle: &mut AdviceOracle) -> Result<Session<ContinuousOutcome>> {
    let q = ContinuousQuestioner::new(budget, ThresholdRule::Balanced)?;
    let x = match oracle.truth() {
        Truth::Real(x) => Some(x.clone()),
        Truth::Index(_) => None,
    };
    let damage = move |out: &ContinuousOutcome| match (&x, &out.interval) {
        (Some(x), Some((lo, hi))) => f64::from(!(lo < x && x <= hi)),
        _ => 1.0,
    };
    run_session(q, oracle, &damage)
}

/// Responder that keeps the heavier half of its own Berlekamp state
/// (ties answer "no").
#[derive(Debug, Clone)]
pub struct ContinuousAdversary {
    state: ContinuousState,
}

/// Adversary for the continuous game: forces a consistent set of measure
/// at least `<<k,H>>/2^k` against any comparison questioner.
pub fn adversary_continuous(budget: QueryBudget) -> Result<ContinuousAdversary> {
    Ok(ContinuousAdversary { state: ContinuousState::new(budget)? })
}

impl ContinuousAdversary {
    pub fn state(&self) -> &ContinuousState {
        &self.state
    }

    /// A point consistent with every answer up to `H` lies, if any.
    pub fn witness(&self) -> Option<BigRational> {
        self.state.segments.first().map(|s| s.hi.clone())
    }
}

impl Responder for ContinuousAdversary {
    fn respond(&mut self, _step: usize, query: &Query, _: &Outlook) -> bool {
        let a = match query {
            Query::LeReal(a) => a.clone(),
            Query::Le(a) => BigRational::from_integer(BigInt::from(*a)),
            Query::In(_) => return false,
        };
        let (yes, no) = self.state.split_weights(&a);
        let answer = yes > no;
        self.state.absorb(&a, answer);
        answer
    }
}

/// Lies a real `x` would charge against the transcript; for checkers.
pub fn real_lies(x: &BigRational, answers: &[(Query, bool)]) -> u32 {
    lies_against_real(x, answers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::make_truth_oracle;
    use crate::games::play;

    fn budget(k: u32, h: u32) -> QueryBudget {
        QueryBudget::new(k, h).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn binary_search_without_lies() {
        let mut o = make_truth_oracle(Truth::Real(r(5, 7)), budget(3, 0));
        let s = continuous_search(budget(3, 0), &mut o).unwrap();
        assert_eq!(s.output.consistent_measure, r(1, 8));
        let (lo, hi) = s.output.interval.unwrap();
        assert!(lo < r(5, 7) && r(5, 7) <= hi);
    }

    #[test]
    fn measures_match_partial_sums() {
        assert_eq!(continuous_target(budget(4, 1)), r(5, 16));
        assert_eq!(continuous_target(budget(6, 2)), r(22, 64));
        let mut o = make_truth_oracle(Truth::Real(r(1, 3)), budget(6, 2));
        let s = continuous_search(budget(6, 2), &mut o).unwrap();
        assert_eq!(s.output.consistent_measure, r(22, 64));
    }

    #[test]
    fn every_query_halves_weight() {
        let b = budget(5, 2);
        let mut q = ContinuousQuestioner::new(b, ThresholdRule::Balanced).unwrap();
        let mut flip = false;
        while let Some(Query::LeReal(a)) = q.next_query() {
            let (yes, no) = q.state.split_weights(&a);
            assert_eq!(yes, no);
            assert_eq!(&yes + &no, q.state.total_weight());
            q.absorb(&Query::LeReal(a), flip);
            flip = !flip;
        }
    }

    #[test]
    fn adversary_against_balanced_and_naive() {
        let b = budget(4, 1);
        let mut adv = adversary_continuous(b).unwrap();
        let q = ContinuousQuestioner::new(b, ThresholdRule::Balanced).unwrap();
        let (out, _) = play(q, &mut adv, b);
        assert_eq!(out.consistent_measure, r(5, 16));

        let mut adv = adversary_continuous(b).unwrap();
        let naive = ContinuousQuestioner::new(b, ThresholdRule::Fixed(r(1, 2))).unwrap();
        let (out, _) = play(naive, &mut adv, b);
        assert!(out.consistent_measure > r(5, 16));
        assert_eq!(adv.state().measure(), out.consistent_measure);

        let b = budget(1, 0);
        let mut adv = adversary_continuous(b).unwrap();
        let q = ContinuousQuestioner::new(b, ThresholdRule::HullMidpoint).unwrap();
        let (out, t) = play(q, &mut adv, b);
        assert!(out.consistent_measure >= r(1, 2));
        let w = adv.witness().unwrap();
        assert_eq!(real_lies(&w, &t.answers()), 0);
    }

    #[test]
    fn zero_budget_is_whole_interval() {
        let mut o = make_truth_oracle(Truth::Real(r(1, 2)), budget(0, 0));
        let s = continuous_search(budget(0, 0), &mut o).unwrap();
        assert_eq!(s.output.consistent_measure, r(1, 1));
        assert!(s.transcript.entries.is_empty());
    }
}
