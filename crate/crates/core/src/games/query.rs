use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::bounds::QueryBudget;

/// A yes/no question about the hidden value `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Query {
    /// "is x <= a?" over integers.
    Le(u64),
    /// "is x <= a?" over the reals.
    LeReal(BigRational),
    /// "is x in S?"; `S` given as sorted, disjoint, inclusive ranges.
    In(Vec<(u64, u64)>),
}

impl Query {
    /// Builds a subset query from arbitrary member ids.
    pub fn subset(members: impl IntoIterator<Item = u64>) -> Query {
        let mut ids: Vec<u64> = members.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        for id in ids {
            match ranges.last_mut() {
                Some((_, hi)) if *hi + 1 == id => *hi = id,
                _ => ranges.push((id, id)),
            }
        }
        Query::In(ranges)
    }

    /// Truthful answer for an integer hidden value.
    pub fn holds_for(&self, x: u64) -> bool {
        match self {
            Query::Le(a) => x <= *a,
            Query::LeReal(a) => BigRational::from_integer(BigInt::from(x)) <= *a,
            Query::In(ranges) => member(ranges, x),
        }
    }

    /// Truthful answer for a real hidden value.
    pub fn holds_for_real(&self, x: &BigRational) -> bool {
        match self {
            Query::Le(a) => *x <= BigRational::from_integer(BigInt::from(*a)),
            Query::LeReal(a) => x <= a,
            Query::In(ranges) => {
                x.is_integer()
                    && x.numer() >= &BigInt::from(0)
                    && member(ranges, x.to_integer().try_into().unwrap_or(u64::MAX))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Query::Le(_) | Query::LeReal(_) => "cmp",
            Query::In(_) => "subset",
        }
    }
}

pub(crate) fn member(ranges: &[(u64, u64)], x: u64) -> bool {
    let i = ranges.partition_point(|&(_, hi)| hi < x);
    i < ranges.len() && ranges[i].0 <= x
}

/// Rational rendered as `"p/q"` (or `"p"` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

struct Arg<'a>(&'a Query);

impl Serialize for Arg<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Query::Le(a) => s.serialize_u64(*a),
            Query::LeReal(a) => s.serialize_str(&rational_string(a)),
            Query::In(ranges) => {
                let mut seq = s.serialize_seq(Some(ranges.len()))?;
                for r in ranges {
                    seq.serialize_element(&[r.0, r.1])?;
                }
                seq.end()
            }
        }
    }
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub query: Query,
    pub response: bool,
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("type", self.query.kind())?;
        map.serialize_entry("arg", &Arg(&self.query))?;
        map.serialize_entry("response", &self.response)?;
        map.end()
    }
}

/// The advice string: every query, its response, and which responses
/// were lies (known only to the truth holder).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub budget: QueryBudget,
    pub entries: Vec<Entry>,
    pub lie_positions: Vec<usize>,
}

impl Transcript {
    pub fn new(budget: QueryBudget) -> Self {
        Transcript { budget, entries: Vec::new(), lie_positions: Vec::new() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serialises")
    }

    pub fn answers(&self) -> Vec<(Query, bool)> {
        self.entries.iter().map(|e| (e.query.clone(), e.response)).collect()
    }
}

/// Number of responses in `answers` that are false for integer `x`.
pub fn lies_against(x: u64, answers: &[(Query, bool)]) -> u32 {
    answers.iter().filter(|(q, r)| q.holds_for(x) != *r).count() as u32
}

/// Number of responses that are false for real `x`.
pub fn lies_against_real(x: &BigRational, answers: &[(Query, bool)]) -> u32 {
    answers.iter().filter(|(q, r)| q.holds_for_real(x) != *r).count() as u32
}

/// Lie counts over the integer range `[lo, hi]` for a comparison-only
/// transcript, as maximal runs `(lo, hi, lies)`. Independent of any
/// questioner state.
pub fn comparison_lie_runs(lo: u64, hi: u64, answers: &[(Query, bool)]) -> Vec<(u64, u64, u32)> {
    let mut cuts: Vec<u64> = answers
        .iter()
        .filter_map(|(q, _)| match q {
            Query::Le(a) if *a >= lo && *a < hi => Some(*a + 1),
            _ => None,
        })
        .collect();
    cuts.push(lo);
    cuts.sort_unstable();
    cuts.dedup();
    let mut runs: Vec<(u64, u64, u32)> = Vec::new();
    for (i, &start) in cuts.iter().enumerate() {
        let end = cuts.get(i + 1).map_or(hi, |c| c - 1);
        let lies = lies_against(start, answers);
        match runs.last_mut() {
            Some(last) if last.2 == lies => last.1 = end,
            _ => runs.push((start, end, lies)),
        }
    }
    runs
}
