//! Online fractional knapsack with unit capacity and item densities in
//! `[L, U]`. Advice names a density class and a reserve level.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::serde_util::rational;
use crate::advice::{AdviceOracle, Truth};
use crate::bounds::{knapsack_bounds, QueryBudget};
use crate::error::{Error, Result};
use crate::games::{identify_questioner, run_session, Session};

/// Reserve levels are rounded down to multiples of `2^-RESERVE_BITS`.
const RESERVE_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackItem {
    #[serde(with = "rational")]
    pub v: BigRational,
    #[serde(with = "rational")]
    pub s: BigRational,
}

impl KnapsackItem {
    /// Item of size `s` whose density is exactly the float `density`.
    pub fn with_density(density: f64, s: BigRational) -> Result<Self> {
        let d = BigRational::from_float(density).ok_or_else(|| Error::domain(format!("density {density} is not finite")))?;
        Ok(KnapsackItem { v: d * &s, s })
    }

    pub fn density(&self) -> f64 {
        (&self.v / &self.s).to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackInstance {
    pub items: Vec<KnapsackItem>,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "U")]
    pub u: f64,
}

impl KnapsackInstance {
    pub fn new(items: Vec<KnapsackItem>, l: f64, u: f64) -> Result<Self> {
        let inst = KnapsackInstance { items, l, u };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(&item_densities(&self.items))
    }

    fn validate_with(&self, densities: &[f64]) -> Result<()> {
        if !(self.l > 0.0 && self.u > self.l && self.u.is_finite()) {
            return Err(Error::domain(format!("need 0 < L < U, got L={}, U={}", self.l, self.u)));
        }
        for (i, (item, &d)) in self.items.iter().zip(densities).enumerate() {
            if !(item.s > BigRational::zero() && item.s <= BigRational::one()) {
                return Err(Error::domain(format!("item {i} has size outside (0, 1]")));
            }
            if !(d >= self.l && d <= self.u) {
                return Err(Error::domain(format!("item {i} has density {d} outside [{}, {}]", self.l, self.u)));
            }
        }
        Ok(())
    }
}

/// Exact densities; runs of identical items reuse one rational division.
fn item_densities(items: &[KnapsackItem]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let d = match out.last() {
            Some(&d) if items[i - 1] == *item => d,
            _ => item.density(),
        };
        out.push(d);
    }
    out
}

/// Density classes `d_i = L beta^i` (`i = 0..=s`, `beta = (U/L)^{1/s}`) and
/// reserve levels `c_j = (beta^m - beta^{m-j})/(beta^m - 1)` (`j = 0..=m`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnapsackPartition {
    pub s: u64,
    pub m: u64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "U")]
    pub u: f64,
}

impl KnapsackPartition {
    pub fn new(s: u64, m: u64, l: f64, u: f64) -> Result<Self> {
        if s == 0 || m == 0 || !(l > 0.0 && u > l && u.is_finite()) {
            return Err(Error::domain(format!("invalid partition s={s}, m={m}, L={l}, U={u}")));
        }
        Ok(KnapsackPartition { s, m, l, u })
    }

    /// The `(s, m)` minimising the upper bound among `s m <= U_k`.
    pub fn for_budget(budget: QueryBudget, l: f64, u: f64) -> Result<Self> {
        let b = knapsack_bounds(budget, u / l)?;
        let (s, m) = b.upper_sm.ok_or(Error::BudgetInsufficient { m: 2, k: budget.k, h: budget.h })?;
        Self::new(s, m, l, u)
    }

    pub fn ln_beta(&self) -> f64 {
        (self.u / self.l).ln() / self.s as f64
    }

    pub fn beta(&self) -> f64 {
        self.ln_beta().exp()
    }

    pub fn density(&self, i: u64) -> f64 {
        match i {
            0 => self.l,
            i if i >= self.s => self.u,
            i => self.l * (self.ln_beta() * i as f64).exp(),
        }
    }

    pub fn reserve(&self, j: u64) -> f64 {
        if j >= self.m {
            return 1.0;
        }
        let t = self.ln_beta();
        (-(j as f64) * t).exp_m1() / (-(self.m as f64) * t).exp_m1()
    }

    pub fn advice_size(&self) -> u64 {
        self.s * self.m
    }

    /// `z = (x-1) m + y` back to `(x, y)`, both 1-based.
    pub fn decode(&self, z: u64) -> (u64, u64) {
        let z = z.clamp(1, self.advice_size());
        ((z - 1) / self.m + 1, (z - 1) % self.m + 1)
    }

    pub fn encode(&self, x: u64, y: u64) -> u64 {
        (x - 1) * self.m + y
    }

    /// Class `x` with `d_{x-1} <= d < d_x`, capped at `s`.
    pub fn class_of(&self, d: f64) -> u64 {
        1 + (1..self.s).filter(|&j| self.density(j) <= d).count() as u64
    }

    /// Level `y` with `c_{y-1} <= c < c_y`, capped at `m`.
    pub fn level_of(&self, c: f64) -> u64 {
        1 + (1..self.m).filter(|&j| self.reserve(j) <= c).count() as u64
    }
}

/// Sizes in integer units of `1/denom`, with room for a `2^-32` reserve grid.
#[derive(Debug)]
struct Prepared {
    density: Vec<f64>,
    value: Vec<f64>,
    units: Vec<u128>,
    denom: u128,
}

impl Prepared {
    fn new(inst: &KnapsackInstance) -> Result<Self> {
        let density = item_densities(&inst.items);
        inst.validate_with(&density)?;
        let overflow = || Error::Overflow("item sizes have no common denominator within u128".into());
        let mut lcm = BigInt::one() << RESERVE_BITS;
        for (i, item) in inst.items.iter().enumerate() {
            if i == 0 || inst.items[i - 1].s.denom() != item.s.denom() {
                lcm = lcm.lcm(item.s.denom());
            }
        }
        let denom = lcm.to_u128().ok_or_else(overflow)?;
        let mut units: Vec<u128> = Vec::with_capacity(inst.items.len());
        for (i, item) in inst.items.iter().enumerate() {
            let u = match units.last() {
                Some(&u) if inst.items[i - 1].s == item.s => u,
                _ => (item.s.numer() * (&lcm / item.s.denom())).to_u128().ok_or_else(overflow)?,
            };
            units.push(u);
        }
        Ok(Prepared {
            density,
            value: inst.items.iter().map(|i| i.v.to_f64().unwrap_or(f64::NAN)).collect(),
            units,
            denom,
        })
    }

    /// Greedy by decreasing density (ties by arrival); returns the value and
    /// the units taken per item.
    fn optimum(&self) -> (f64, Vec<u128>) {
        let mut order: Vec<usize> = (0..self.units.len()).collect();
        order.sort_by(|&a, &b| self.density[b].total_cmp(&self.density[a]).then(a.cmp(&b)));
        let mut left = self.denom;
        let mut taken = vec![0u128; self.units.len()];
        let mut value = 0.0;
        for i in order {
            if left == 0 {
                break;
            }
            let t = self.units[i].min(left);
            left -= t;
            taken[i] = t;
            value += self.value[i] * (t as f64 / self.units[i] as f64);
        }
        (value, taken)
    }

    fn online(&self, part: &KnapsackPartition, x: u64, y: u64) -> (u128, Vec<u128>, f64) {
        let heavy_from = part.density(x);
        let critical_from = part.density(x - 1);
        let scale = self.denom >> RESERVE_BITS;
        let reserve = (part.reserve(y - 1) * (1u64 << RESERVE_BITS) as f64).floor() as u128 * scale;
        let mut critical_left = reserve;
        let mut heavy_left = self.denom - reserve;
        let mut taken = vec![0u128; self.units.len()];
        let mut profit = 0.0;
        for (i, &d) in self.density.iter().enumerate() {
            let left = if d >= heavy_from {
                &mut heavy_left
            } else if d >= critical_from {
                &mut critical_left
            } else {
                continue;
            };
            let t = self.units[i].min(*left);
            *left -= t;
            taken[i] = t;
            profit += self.value[i] * (t as f64 / self.units[i] as f64);
        }
        (reserve, taken, profit)
    }
}

fn ratio_of(opt: f64, profit: f64) -> f64 {
    if opt == 0.0 {
        1.0
    } else {
        opt / profit
    }
}

/// Advice truth `z = (x-1) m + y`: `x` is the class of the smallest density
/// the optimum uses, `y` the level of the capacity the optimum leaves to
/// densities below `d_x` (an empty optimum gives `x = 1, y = m`).
pub fn knapsack_truth(instance: &KnapsackInstance, part: &KnapsackPartition) -> Result<Truth> {
    let prep = Prepared::new(instance)?;
    let (_, taken) = prep.optimum();
    let used: Vec<usize> = (0..taken.len()).filter(|&i| taken[i] > 0).collect();
    let Some(d_star) = used.iter().map(|&i| prep.density[i]).min_by(f64::total_cmp) else {
        return Ok(Truth::Index(part.encode(1, part.m)));
    };
    let x = part.class_of(d_star);
    let heavy: u128 = used.iter().filter(|&&i| prep.density[i] >= part.density(x)).map(|&i| taken[i]).sum();
    let c_star = (prep.denom - heavy) as f64 / prep.denom as f64;
    Ok(Truth::Index(part.encode(x, part.level_of(c_star))))
}

/// Offline fractional optimum.
pub fn knapsack_opt(instance: &KnapsackInstance) -> Result<f64> {
    Ok(Prepared::new(instance)?.optimum().0)
}

#[derive(Debug, Clone)]
pub struct KnapsackOutcome {
    pub x: u64,
    pub y: u64,
    /// Capacity held back for class-`x` items.
    pub reserve: BigRational,
    /// Accepted fraction of each item.
    pub fractions: Vec<BigRational>,
    pub profit: f64,
    pub opt: f64,
    /// `opt / profit`.
    pub ratio: f64,
    pub session: Session<Option<u64>>,
}

/// Reads `(x, y)` from the advice, reserves `c_{y-1}` for densities in
/// `[d_{x-1}, d_x)`, fills the rest with densities `>= d_x` and rejects
/// everything lighter. Accepted sizes never exceed capacity 1.
pub fn knapsack_run(
    instance: &KnapsackInstance,
    part: &KnapsackPartition,
    budget: QueryBudget,
    oracle: &mut AdviceOracle,
) -> Result<KnapsackOutcome> {
    let prep = Arc::new(Prepared::new(instance)?);
    let (opt, _) = prep.optimum();
    let q = identify_questioner(part.advice_size(), budget)?;
    let (p2, part2) = (Arc::clone(&prep), *part);
    let damage = move |z: &Option<u64>| {
        let (x, y) = part2.decode(z.unwrap_or(1));
        ratio_of(opt, p2.online(&part2, x, y).2)
    };
    let session = run_session(q, oracle, &damage)?;
    let (x, y) = part.decode(session.output.unwrap_or(1));
    let (reserve, taken, profit) = prep.online(part, x, y);
    let total: u128 = taken.iter().sum();
    assert!(total <= prep.denom, "capacity exceeded");
    let denom = BigInt::from(prep.denom);
    let fractions = taken
        .iter()
        .zip(&prep.units)
        .map(|(&t, &n)| BigRational::new(BigInt::from(t), BigInt::from(n)))
        .collect();
    Ok(KnapsackOutcome {
        x,
        y,
        reserve: BigRational::new(BigInt::from(reserve), denom),
        fractions,
        profit,
        opt,
        ratio: ratio_of(opt, profit),
        session,
    })
}

/// Reserve levels of the adversarial family: endpoints
/// `min/max(1/beta, 1 - 1/beta)` with `v_j = beta - (beta-1) c_j`
/// interpolated geometrically.
pub fn adversarial_levels(beta: f64, m: u64) -> Vec<f64> {
    let (a, b) = (1.0 / beta, 1.0 - 1.0 / beta);
    let (c0, cm) = (a.min(b), a.max(b));
    let v = |c: f64| beta - (beta - 1.0) * c;
    let (v0, vm) = (v(c0), v(cm));
    (0..=m)
        .map(|j| {
            let vj = v0 * (vm / v0).powf(j as f64 / m as f64);
            (beta - vj) / (beta - 1.0)
        })
        .collect()
}

/// Per-step ratio of the adversarial levels as printed in closed form,
/// `((beta^2 - beta + 1)/(2 beta + 1))^{1/m}`.
pub fn printed_ratio(beta: f64, m: u64) -> f64 {
    ((beta * beta - beta + 1.0) / (2.0 * beta + 1.0)).powf(1.0 / m as f64)
}

/// `sigma_{x,y}` for `x = 1..=s`, `y = 1..=m`: unit mass at each of
/// `d_0, ..., d_{x-1}`, then mass `c_y` at `d_x`, all in items of size
/// `1/granularity`. For fixed `x` each instance is a prefix of the next.
pub fn knapsack_adversarial_instances(part: &KnapsackPartition, granularity: u64) -> Result<Vec<((u64, u64), KnapsackInstance)>> {
    if granularity == 0 {
        return Err(Error::domain("granularity must be positive"));
    }
    let eps = BigRational::new(BigInt::one(), BigInt::from(granularity));
    let levels = adversarial_levels(part.beta(), part.m);
    let mut out = Vec::new();
    for x in 1..=part.s {
        let mut blocks = Vec::new();
        for j in 0..x {
            let item = KnapsackItem::with_density(part.density(j), eps.clone())?;
            blocks.extend(std::iter::repeat_n(item, granularity as usize));
        }
        let top = KnapsackItem::with_density(part.density(x), eps.clone())?;
        for (y, c) in levels.iter().enumerate().skip(1) {
            let count = (c * granularity as f64).round() as usize;
            let mut items = blocks.clone();
            items.extend(std::iter::repeat_n(top.clone(), count));
            out.push(((x, y as u64), KnapsackInstance::new(items, part.l, part.u)?));
        }
    }
    Ok(out)
}

/// `count` items with log-uniform densities and sizes in multiples of
/// `1/granularity` up to `max_units` units.
pub fn knapsack_random_instance(l: f64, u: f64, count: usize, granularity: u64, max_units: u64, seed: u64) -> Result<KnapsackInstance> {
    if granularity == 0 || max_units == 0 || max_units > granularity {
        return Err(Error::domain("need 0 < max_units <= granularity"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_r = (u / l).ln();
    let items = (0..count)
        .map(|_| {
            let d = (l * (ln_r * rng.gen::<f64>()).exp()).clamp(l, u);
            let units = rng.gen_range(1..=max_units);
            KnapsackItem::with_density(d, BigRational::new(BigInt::from(units), BigInt::from(granularity)))
        })
        .collect::<Result<Vec<_>>>()?;
    KnapsackInstance::new(items, l, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::{make_truth_oracle, ErrorPolicy};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn partition_endpoints() {
        let p = KnapsackPartition::new(4, 3, 1.0, 16.0).unwrap();
        assert_eq!(p.density(0), 1.0);
        assert_eq!(p.density(4), 16.0);
        assert!((p.density(2) - 4.0).abs() < 1e-12);
        assert_eq!(p.reserve(0), 0.0);
        assert_eq!(p.reserve(3), 1.0);
        // beta = 2, m = 3: c_1 = (8-4)/7.
        assert!((p.reserve(1) - 4.0 / 7.0).abs() < 1e-12);
        for z in 1..=12 {
            let (x, y) = p.decode(z);
            assert_eq!(p.encode(x, y), z);
        }
        assert_eq!(p.class_of(1.0), 1);
        assert_eq!(p.class_of(2.0), 2);
        assert_eq!(p.class_of(16.0), 4);
        assert_eq!(p.level_of(0.0), 1);
        assert_eq!(p.level_of(1.0), 3);
    }

    #[test]
    fn optimum_is_greedy_by_density() {
        let items = vec![
            KnapsackItem { v: rat(1, 2), s: rat(1, 2) },
            KnapsackItem { v: rat(2, 1), s: rat(1, 2) },
            KnapsackItem { v: rat(3, 2), s: rat(3, 4) },
        ];
        let inst = KnapsackInstance::new(items, 1.0, 4.0).unwrap();
        // Densities 1, 4, 2: take the 4, then 1/2 of size 3/4 at density 2.
        assert!((knapsack_opt(&inst).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_uses_rational_strings() {
        let inst = KnapsackInstance::new(vec![KnapsackItem { v: rat(3, 4), s: rat(1, 2) }], 1.0, 2.0).unwrap();
        let json = serde_json::to_string(&inst).unwrap();
        assert_eq!(json, r#"{"items":[{"v":"3/4","s":"1/2"}],"L":1.0,"U":2.0}"#);
        assert_eq!(serde_json::from_str::<KnapsackInstance>(&json).unwrap(), inst);
    }

    #[test]
    fn adversarial_levels_interpolate() {
        let lv = adversarial_levels(3.0, 4);
        assert!((lv[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((lv[4] - 2.0 / 3.0).abs() < 1e-12);
        assert!(lv.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adversarial_instances_are_prefix_closed() {
        let p = KnapsackPartition::new(2, 2, 1.0, 4.0).unwrap();
        let fam = knapsack_adversarial_instances(&p, 100).unwrap();
        assert_eq!(fam.len(), 4);
        for w in fam.windows(2) {
            let ((x0, _), a) = &w[0];
            let ((x1, _), b) = &w[1];
            if x0 == x1 {
                assert_eq!(a.items[..], b.items[..a.items.len()]);
            }
        }
    }

    #[test]
    fn true_advice_meets_upper_bound_and_capacity() {
        for (k, h) in [(6, 0), (6, 1)] {
            let b = QueryBudget::new(k, h).unwrap();
            let bounds = knapsack_bounds(b, 16.0).unwrap();
            let part = KnapsackPartition::for_budget(b, 1.0, 16.0).unwrap();
            let mut insts: Vec<_> = knapsack_adversarial_instances(&part, 200).unwrap().into_iter().map(|(_, i)| i).collect();
            insts.extend((0..10).map(|s| knapsack_random_instance(1.0, 16.0, 40, 1000, 200, s).unwrap()));
            for inst in insts {
                let truth = knapsack_truth(&inst, &part).unwrap();
                for policy in [ErrorPolicy::None, ErrorPolicy::Greedy] {
                    let mut o = AdviceOracle::new(truth.clone(), b, policy).unwrap();
                    let out = knapsack_run(&inst, &part, b, &mut o).unwrap();
                    let used: BigRational = out.fractions.iter().zip(&inst.items).map(|(f, i)| f * &i.s).sum();
                    assert!(used <= BigRational::one());
                    assert!(out.ratio <= bounds.upper_cr + 1e-6, "k={k} H={h} ratio={}", out.ratio);
                }
            }
        }
    }

    #[test]
    fn reserve_levels_satisfy_the_recurrence() {
        for (s, m) in [(3, 2), (4, 5), (1, 9)] {
            let p = KnapsackPartition::new(s, m, 1.0, 1024.0).unwrap();
            let beta = p.beta();
            for i in 1..m {
                let step = p.reserve(i + 1) - p.reserve(i) / beta;
                assert!((step - p.reserve(1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimum_small_examples() {
        let one = |v: i64, s: (i64, i64)| KnapsackItem { v: rat(v, 1), s: rat(s.0, s.1) };
        let single = KnapsackInstance::new(vec![one(2, (1, 2))], 1.0, 4.0).unwrap();
        assert_eq!(knapsack_opt(&single).unwrap(), 2.0);
        let pair = KnapsackInstance::new(vec![one(1, (1, 1)), one(2, (1, 1))], 1.0, 2.0).unwrap();
        assert_eq!(knapsack_opt(&pair).unwrap(), 2.0);
    }

    /// Best value over every way of taking whole `1/grain` units of items.
    fn unit_optimum(inst: &KnapsackInstance, grain: i64) -> f64 {
        let units: Vec<u32> = inst.items.iter().map(|i| (&i.s * rat(grain, 1)).to_integer().try_into().unwrap()).collect();
        let values: Vec<f64> = inst.items.iter().map(|i| i.v.to_f64().unwrap()).collect();
        let mut best = 0.0f64;
        let mut a = vec![0u32; units.len()];
        loop {
            if a.iter().sum::<u32>() as i64 <= grain {
                let v = a.iter().zip(&units).zip(&values).map(|((&a, &u), v)| f64::from(a) / f64::from(u) * v).sum();
                best = best.max(v);
            }
            let Some(i) = (0..a.len()).find(|&i| a[i] < units[i]) else { break };
            a[i] += 1;
            a[..i].iter_mut().for_each(|x| *x = 0);
        }
        best
    }

    #[test]
    fn optimum_matches_unit_enumeration() {
        for seed in 0..25 {
            let n = 1 + (seed % 6) as usize;
            let inst = knapsack_random_instance(1.0, 8.0, n, 4, 4, seed).unwrap();
            let brute = unit_optimum(&inst, 4);
            assert!((knapsack_opt(&inst).unwrap() - brute).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn uniform_density_uses_the_top_reserve() {
        let b = QueryBudget::new(4, 1).unwrap();
        let part = KnapsackPartition::for_budget(b, 1.0, 8.0).unwrap();
        let items = (0..10).map(|_| KnapsackItem::with_density(1.0, rat(1, 10)).unwrap()).collect();
        let inst = KnapsackInstance::new(items, 1.0, 8.0).unwrap();
        let mut o = make_truth_oracle(knapsack_truth(&inst, &part).unwrap(), b);
        let out = knapsack_run(&inst, &part, b, &mut o).unwrap();
        // All mass is critical, so y = m and only c_{m-1} is reserved for it.
        assert_eq!((out.x, out.y), (1, part.m));
        let expect = 1.0 / part.reserve(part.m - 1);
        assert!((out.ratio - expect).abs() < 1e-6, "{} vs {expect}", out.ratio);
        assert!(out.ratio <= knapsack_bounds(b, 8.0).unwrap().upper_cr);
    }

    #[test]
    fn sigma_optimum_and_recovered_advice() {
        let b = QueryBudget::new(6, 1).unwrap();
        let part = KnapsackPartition::for_budget(b, 1.0, 16.0).unwrap();
        let levels = adversarial_levels(part.beta(), part.m);
        for ((x, y), inst) in knapsack_adversarial_instances(&part, 1000).unwrap() {
            let c = (levels[y as usize] * 1000.0).round() / 1000.0;
            let expect = (1.0 - c) * part.density(x - 1) + c * part.density(x);
            assert!((knapsack_opt(&inst).unwrap() - expect).abs() < 1e-9 * expect);
            let truth = knapsack_truth(&inst, &part).unwrap();
            let Truth::Index(z) = truth else { unreachable!() };
            let mut o = AdviceOracle::new(truth, b, ErrorPolicy::Greedy).unwrap();
            let out = knapsack_run(&inst, &part, b, &mut o).unwrap();
            assert_eq!(part.encode(out.x, out.y), z);
        }
    }

    #[test]
    fn empty_instance_ratio_one() {
        let b = QueryBudget::new(4, 0).unwrap();
        let part = KnapsackPartition::for_budget(b, 1.0, 8.0).unwrap();
        let inst = KnapsackInstance::new(vec![], 1.0, 8.0).unwrap();
        let mut o = make_truth_oracle(knapsack_truth(&inst, &part).unwrap(), b);
        assert_eq!(knapsack_run(&inst, &part, b, &mut o).unwrap().ratio, 1.0);
    }
}
