use crate::error::{Error, Result};

/// Binary entropy in bits.
pub fn entropy(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("entropy requires 0 < p < 1, got {p}")));
    }
    Ok(entropy_unchecked(p))
}

/// Binary entropy extended continuously to `H(0) = H(1) = 0`.
pub(crate) fn entropy_unchecked(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// The pair `(4p(1-p), (4p(1-p))^{1/ln 4})` that sandwiches `H(p)`.
pub fn entropy_bracket(p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("entropy requires 0 < p < 1, got {p}")));
    }
    let base = 4.0 * p * (1.0 - p);
    Ok((base, base.powf(1.0 / 4f64.ln())))
}

/// Entropy sandwich of `<<n, m>>`:
/// `2^{nH(m/n)} / sqrt(8m(1-m/n)) <= <<n,m>> <= 2^{nH(m/n)}` for `0 < m < n/2`.
pub fn partial_sum_entropy_bracket(n: u64, m: u64) -> Result<(f64, f64)> {
    if m == 0 || 2 * m >= n {
        return Err(Error::domain(format!(
            "entropy bracket requires 0 < m < N/2, got N={n}, m={m}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    let upper = (nf * entropy_unchecked(mf / nf)).exp2();
    let lower = upper / (8.0 * mf * (1.0 - mf / nf)).sqrt();
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::partial_binomial_sum;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert!((entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-15);
        let h = entropy(1.0 / 3.0).unwrap();
        let (lo, hi) = entropy_bracket(1.0 / 3.0).unwrap();
        assert!(lo <= h && h <= hi);
    }

    #[test]
    fn endpoints_rejected() {
        assert!(entropy(0.0).is_err());
        assert!(entropy(1.0).is_err());
        assert!(entropy(f64::NAN).is_err());
        assert!(partial_sum_entropy_bracket(4, 2).is_err());
        assert!(partial_sum_entropy_bracket(4, 0).is_err());
    }

    #[test]
    fn bracket_contains_examples() {
        for (n, m, exact) in [(10u64, 2u64, 56.0), (20, 4, 6196.0)] {
            let (lo, hi) = partial_sum_entropy_bracket(n, m).unwrap();
            assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        }
    }

    #[test]
    fn bracket_contains_all_small() {
        for n in 1..=64u64 {
            for m in 1..n {
                if 2 * m >= n {
                    break;
                }
                let (lo, hi) = partial_sum_entropy_bracket(n, m).unwrap();
                let exact = partial_binomial_sum(n, m).unwrap().to_f64().unwrap();
                assert!(lo <= exact && exact <= hi, "N={n} m={m}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn entropy_sandwich(p in 1e-9f64..(1.0 - 1e-9)) {
            let h = entropy(p).unwrap();
            let (lo, hi) = entropy_bracket(p).unwrap();
            prop_assert!(lo <= h + 1e-15 && h <= hi + 1e-15);
        }
    }
}
