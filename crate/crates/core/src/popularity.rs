//! Zipf request popularity over a library of `m` files.
//!
//! Files are numbered `1..=m`, most popular first. Internal vectors are indexed by
//! `file - 1`.

use rand::Rng;

use crate::{Error, Result};

/// Generalized harmonic sum `H(gamma, a, b) = sum_{i=a}^{b} i^(-gamma)`.
pub fn harmonic(gamma: f64, a: usize, b: usize) -> Result<f64> {
    if a == 0 {
        return Err(Error::invalid("harmonic sum lower index must be >= 1"));
    }
    if b < a {
        return Err(Error::invalid(format!(
            "harmonic sum upper index {b} is below lower index {a}"
        )));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("harmonic exponent must be >= 0, got {gamma}")));
    }
    // Summing smallest terms first keeps the rounding error at the ulp level.
    Ok((a..=b).rev().map(|i| (i as f64).powf(-gamma)).sum())
}

/// Cumulative probability table for inverse-CDF sampling of a finite PMF.
///
/// Entries with zero mass are never returned: a draw `u` selects the first index
/// whose cumulative value strictly exceeds `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeTable {
    cdf: Vec<f64>,
}

impl CumulativeTable {
    pub fn new(pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Pin the top to exactly 1 so u in [0, 1) always lands inside the table;
        // trailing zero-mass entries keep the value of the last positive one.
        if let Some(last_positive) = pmf.iter().rposition(|&p| p > 0.0) {
            for c in &mut cdf[last_positive..] {
                *c = 1.0;
            }
        }
        CumulativeTable { cdf }
    }

    /// Zero-based index for a uniform variate `u` in `[0, 1)`.
    #[inline]
    pub fn index_of(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }

    /// Draws a one-based file id.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index_of(rng.gen::<f64>()) + 1
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }
}

/// Zipf request law `P_r(f) = f^(-gamma_r) / H(gamma_r, 1, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityModel {
    m: usize,
    gamma_r: f64,
    pmf: Vec<f64>,
    harmonic_norm: f64,
    table: CumulativeTable,
}

impl PopularityModel {
    /// Library size.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Request probability of the one-based file `f`.
    pub fn prob(&self, f: usize) -> f64 {
        self.pmf[f - 1]
    }

    pub fn harmonic_norm(&self) -> f64 {
        self.harmonic_norm
    }

    pub fn table(&self) -> &CumulativeTable {
        &self.table
    }
}

/// Builds the Zipf request model.
///
/// `gamma_r = 0` is accepted and yields the uniform law; `gamma_r >= 1` is rejected
/// because the closed-form tradeoff constants only hold below 1.
pub fn zipf_pmf(gamma_r: f64, m: usize) -> Result<PopularityModel> {
    if m == 0 {
        return Err(Error::invalid("library size m must be >= 1"));
    }
    if !(0.0..1.0).contains(&gamma_r) {
        return Err(Error::invalid(format!(
            "Zipf request exponent must lie in [0, 1), got {gamma_r}"
        )));
    }
    let harmonic_norm = harmonic(gamma_r, 1, m)?;
    let pmf: Vec<f64> = (1..=m)
        .map(|f| (f as f64).powf(-gamma_r) / harmonic_norm)
        .collect();
    let table = CumulativeTable::new(&pmf);
    Ok(PopularityModel {
        m,
        gamma_r,
        pmf,
        harmonic_norm,
        table,
    })
}

/// One request per user, one-based file ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestVector {
    pub requests: Vec<usize>,
}

impl RequestVector {
    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

/// Draws `n` i.i.d. requests from `model`.
pub fn sample_requests<R: Rng + ?Sized>(
    model: &PopularityModel,
    n: usize,
    rng: &mut R,
) -> RequestVector {
    let table = model.table();
    RequestVector {
        requests: (0..n).map(|_| table.sample(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn harmonic_trivial_values() {
        assert_eq!(harmonic(0.0, 1, 5).unwrap(), 5.0);
        let h = harmonic(0.5, 1, 2).unwrap();
        assert!((h - (1.0 + 2f64.powf(-0.5))).abs() < 1e-15);
        assert!((h - 1.707_106_78).abs() < 1e-8);
    }

    #[test]
    fn harmonic_golden_gamma_06() {
        // 40-digit reference summation.
        let h = harmonic(0.6, 1, 1000).unwrap();
        assert!((h - 37.677_592_036_819_6).abs() < 1e-11, "{h}");
    }

    #[test]
    fn harmonic_rejects_reversed_range() {
        assert!(harmonic(0.5, 3, 2).is_err());
        assert!(harmonic(0.5, 0, 2).is_err());
    }

    #[test]
    fn zipf_two_files() {
        let model = zipf_pmf(0.5, 2).unwrap();
        let first = 1.0 / (1.0 + 2f64.powf(-0.5));
        assert!((model.pmf()[0] - first).abs() < 1e-15);
        assert!((model.pmf()[0] - 0.585_786).abs() < 1e-6);
        assert!((model.pmf()[1] - 0.414_213).abs() < 1e-6);
    }

    #[test]
    fn zipf_uniform_extension() {
        let model = zipf_pmf(0.0, 4).unwrap();
        assert_eq!(model.pmf(), &[0.25; 4]);
    }

    #[test]
    fn zipf_head_probability_gamma_06() {
        let model = zipf_pmf(0.6, 1000).unwrap();
        assert!((model.prob(1) - 0.026_540_974_248_640_2).abs() < 1e-14);
    }

    #[test]
    fn zipf_rejects_out_of_range() {
        assert!(zipf_pmf(1.0, 10).is_err());
        assert!(zipf_pmf(-0.1, 10).is_err());
        assert!(zipf_pmf(0.5, 0).is_err());
    }

    #[test]
    fn single_file_library_always_requested() {
        let model = zipf_pmf(0.7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let reqs = sample_requests(&model, 500, &mut rng);
        assert!(reqs.requests.iter().all(|&f| f == 1));
    }

    #[test]
    fn sampling_matches_binomial_standard_error() {
        let model = zipf_pmf(0.5, 2).unwrap();
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let reqs = sample_requests(&model, n, &mut rng);
        let ones = reqs.requests.iter().filter(|&&f| f == 1).count() as f64;
        let p = model.prob(1);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((ones / n as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn sampling_is_deterministic() {
        let model = zipf_pmf(0.6, 100).unwrap();
        let a = sample_requests(&model, 1000, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_requests(&model, 1000, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_mass_entries_are_never_drawn() {
        let table = CumulativeTable::new(&[0.5, 0.0, 0.5, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let f = table.sample(&mut rng);
            assert!(f == 1 || f == 3);
        }
        assert_eq!(table.index_of(0.0), 0);
        assert_eq!(table.index_of(0.5), 2);
        assert_eq!(table.index_of(0.999_999_999), 2);
    }

    #[test]
    fn histogram_error_shrinks_with_more_samples() {
        let model = zipf_pmf(0.8, 20).unwrap();
        let max_dev = |n: usize, seed: u64| {
            let reqs = sample_requests(&model, n, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut counts = [0usize; 20];
            for f in reqs.requests {
                counts[f - 1] += 1;
            }
            counts
                .iter()
                .zip(model.pmf())
                .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
                .fold(0.0, f64::max)
        };
        assert!(max_dev(2_000_000, 5) < max_dev(2_000, 5));
    }

    proptest! {
        #[test]
        fn pmf_normalized_and_monotone(gamma in 0.0f64..0.999, m in 1usize..3000) {
            let model = zipf_pmf(gamma, m).unwrap();
            let total: f64 = model.pmf().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for w in model.pmf().windows(2) {
                if gamma > 0.0 {
                    prop_assert!(w[0] > w[1]);
                } else {
                    prop_assert_eq!(w[0], w[1]);
                }
            }
            for (i, &p) in model.pmf().iter().enumerate() {
                let f = (i + 1) as f64;
                prop_assert!((p * model.harmonic_norm() - f.powf(-gamma)).abs() < 1e-12);
            }
        }

        #[test]
        fn harmonic_monotone(gamma in 0.0f64..2.0, b in 2usize..500) {
            let h = harmonic(gamma, 1, b).unwrap();
            prop_assert!(harmonic(gamma, 1, b + 1).unwrap() > h);
            prop_assert!(harmonic(gamma + 0.05, 1, b).unwrap() < h);
        }
    }
}
