//! Random cache placement: caching distributions, the cluster hit probability, and the
//! water-filling optimum.
//!
//! Every node caches exactly one file, drawn i.i.d. from a caching PMF `P_c`. A user
//! in a cluster of `g_c` nodes is served when at least one of the *other* `g_c - 1`
//! nodes caches its request, so
//!
//! ```text
//! p_hit = sum_f P_r(f) * (1 - (1 - P_c(f))^(g_c - 1))
//! ```
//!
//! Stationarity of this objective on the simplex gives `P_c(f) = [1 - nu / z_f]^+`
//! with `z_f = P_r(f)^(1 / (g_c - 2))`, which [`optimal_caching`] evaluates with an
//! exact finite-size cutoff.

use rand::Rng;
use rayon::prelude::*;

use crate::popularity::{CumulativeTable, PopularityModel};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CachingKind {
    Optimal,
    ZipfHeuristic { gamma_c: f64 },
    Uniform,
    Custom,
}

impl std::fmt::Display for CachingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CachingKind::Optimal => write!(f, "optimal"),
            CachingKind::ZipfHeuristic { gamma_c } => write!(f, "zipf:{gamma_c}"),
            CachingKind::Uniform => write!(f, "uniform"),
            CachingKind::Custom => write!(f, "custom"),
        }
    }
}

/// Caching PMF over the library.
#[derive(Debug, Clone, PartialEq)]
pub struct CachingDistribution {
    pmf: Vec<f64>,
    /// Number of files with positive mass for optimal distributions; `m` otherwise.
    cutoff: usize,
    /// Water-filling multiplier; zero when not applicable.
    multiplier: f64,
    kind: CachingKind,
    table: CumulativeTable,
}

impl CachingDistribution {
    fn from_parts(pmf: Vec<f64>, cutoff: usize, multiplier: f64, kind: CachingKind) -> Self {
        let table = CumulativeTable::new(&pmf);
        CachingDistribution {
            pmf,
            cutoff,
            multiplier,
            kind,
            table,
        }
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("library size m must be >= 1"));
        }
        Ok(Self::from_parts(
            vec![1.0 / m as f64; m],
            m,
            0.0,
            CachingKind::Uniform,
        ))
    }

    /// Zipf-shaped caching with its own exponent `gamma_c`.
    pub fn zipf_heuristic(gamma_c: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("library size m must be >= 1"));
        }
        if !(gamma_c >= 0.0) || !gamma_c.is_finite() {
            return Err(Error::invalid(format!(
                "Zipf caching exponent must be >= 0, got {gamma_c}"
            )));
        }
        let weights: Vec<f64> = (1..=m).map(|f| (f as f64).powf(-gamma_c)).collect();
        let total: f64 = weights.iter().rev().sum();
        let pmf = weights.into_iter().map(|w| w / total).collect();
        Ok(Self::from_parts(
            pmf,
            m,
            0.0,
            CachingKind::ZipfHeuristic { gamma_c },
        ))
    }

    pub fn custom(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::invalid("caching pmf must be non-empty"));
        }
        if pmf.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid("caching pmf entries must be finite and >= 0"));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("caching pmf sums to {total}, expected 1")));
        }
        let m = pmf.len();
        Ok(Self::from_parts(pmf, m, 0.0, CachingKind::Custom))
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn m(&self) -> usize {
        self.pmf.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    pub fn kind(&self) -> &CachingKind {
        &self.kind
    }

    pub fn table(&self) -> &CumulativeTable {
        &self.table
    }
}

fn check_same_library(pop: &PopularityModel, cache: &CachingDistribution) -> Result<()> {
    if pop.m() != cache.m() {
        return Err(Error::LibraryMismatch {
            popularity: pop.m(),
            caching: cache.m(),
        });
    }
    Ok(())
}

/// `1 - (1 - x)^k`, accurate when `x` is tiny.
fn at_least_one(x: f64, k: usize) -> f64 {
    if x >= 1.0 {
        return if k == 0 { 0.0 } else { 1.0 };
    }
    -(k as f64 * (-x).ln_1p()).exp_m1()
}

/// Probability that a request is found among `others` i.i.d. caches.
pub(crate) fn hit_among(pop: &PopularityModel, cache: &CachingDistribution, others: usize) -> f64 {
    pop.pmf()
        .iter()
        .zip(cache.pmf())
        .rev()
        .map(|(&pr, &pc)| pr * at_least_one(pc, others))
        .sum()
}

/// Probability that a request is absent from `others` i.i.d. caches.
pub(crate) fn miss_among(pop: &PopularityModel, cache: &CachingDistribution, others: usize) -> f64 {
    pop.pmf()
        .iter()
        .zip(cache.pmf())
        .rev()
        .map(|(&pr, &pc)| pr * (1.0 - pc).powi(others as i32))
        .sum()
}

/// Probability that some other node of a `g_c`-node cluster caches a user's request.
pub fn hit_probability(pop: &PopularityModel, cache: &CachingDistribution, g_c: usize) -> Result<f64> {
    check_same_library(pop, cache)?;
    if g_c < 2 {
        return Err(Error::invalid(format!(
            "hit probability needs at least 2 nodes per cluster, got {g_c}"
        )));
    }
    Ok(hit_among(pop, cache, g_c - 1))
}

/// Per-user outage probability `sum_f P_r(f) (1 - P_c(f))^(g_c - 1)`; the complement
/// of [`hit_probability`].
pub fn analytic_outage(pop: &PopularityModel, cache: &CachingDistribution, g_c: usize) -> Result<f64> {
    check_same_library(pop, cache)?;
    if g_c < 2 {
        return Err(Error::invalid(format!(
            "outage needs at least 2 nodes per cluster, got {g_c}"
        )));
    }
    Ok(miss_among(pop, cache, g_c - 1))
}

/// Outage when a user's own cache also counts as a hit: all `g_c` caches are searched.
pub fn analytic_outage_with_self_hit(
    pop: &PopularityModel,
    cache: &CachingDistribution,
    g_c: usize,
) -> Result<f64> {
    check_same_library(pop, cache)?;
    if g_c < 1 {
        return Err(Error::invalid("cluster size must be >= 1"));
    }
    Ok(miss_among(pop, cache, g_c))
}

fn water_levels(pop: &PopularityModel, g_c: usize) -> Vec<f64> {
    let exponent = 1.0 / (g_c as f64 - 2.0);
    pop.pmf().iter().map(|p| p.powf(exponent)).collect()
}

/// Water-filling cutoff `m*` and multiplier `nu` for clusters of `g_c` nodes.
///
/// `nu(k) = (k - 1) / sum_{j<=k} 1/z_j` is non-decreasing in `k` while `z_k` is
/// non-increasing, so the indices with `nu(k) < z_k` form a prefix; `m*` is its length.
pub fn cutoff_index(pop: &PopularityModel, g_c: usize) -> Result<(usize, f64)> {
    if g_c < 3 {
        return Err(Error::invalid(format!(
            "optimal caching needs g_c >= 3 (exponent 1/(g_c - 2)), got {g_c}"
        )));
    }
    let z = water_levels(pop, g_c);
    let mut inv_sum = 0.0;
    let mut best = (1, 0.0);
    for (i, &zk) in z.iter().enumerate() {
        let k = i + 1;
        inv_sum += 1.0 / zk;
        let nu = (k - 1) as f64 / inv_sum;
        if nu < zk {
            best = (k, nu);
        } else {
            break;
        }
    }
    Ok(best)
}

fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// The hit-maximizing caching distribution `P_c(f) = [1 - nu / z_f]^+`.
pub fn optimal_caching(pop: &PopularityModel, g_c: usize) -> Result<CachingDistribution> {
    let (m_star, _) = cutoff_index(pop, g_c)?;
    let z = water_levels(pop, g_c);
    // Recompute nu and renormalize with compensated sums so that large m* stays
    // normalized to ~1e-15.
    let nu = (m_star - 1) as f64 / compensated_sum(z[..m_star].iter().map(|zf| 1.0 / zf));
    let mut pmf: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(i, &zf)| if i < m_star { 1.0 - nu / zf } else { 0.0 })
        .collect();
    let total = compensated_sum(pmf.iter().copied());
    pmf.iter_mut().for_each(|x| *x /= total);
    Ok(CachingDistribution::from_parts(
        pmf,
        m_star,
        nu,
        CachingKind::Optimal,
    ))
}

/// Exhaustive argmax of the hit probability over the `resolution`-grid simplex.
///
/// Independent of the closed form; only feasible for `m <= 6`. Near-ties resolve to
/// the lexicographically largest mass vector.
pub fn brute_force_caching_oracle(
    pop: &PopularityModel,
    g_c: usize,
    resolution: f64,
) -> Result<CachingDistribution> {
    let m = pop.m();
    if m > 6 {
        return Err(Error::OracleTooLarge(m));
    }
    if g_c < 2 {
        return Err(Error::invalid(format!("oracle needs g_c >= 2, got {g_c}")));
    }
    let units = match resolution {
        r if (r - 0.01).abs() < 1e-12 => 100,
        r if (r - 0.02).abs() < 1e-12 => 50,
        r if (r - 0.05).abs() < 1e-12 => 20,
        r => {
            return Err(Error::invalid(format!(
                "oracle resolution must be one of 0.01, 0.02, 0.05, got {r}"
            )))
        }
    };
    // gain[f][k]: contribution of file f when it holds k grid units of mass.
    let gain: Vec<Vec<f64>> = pop
        .pmf()
        .iter()
        .map(|&pr| {
            (0..=units)
                .map(|k| pr * at_least_one(k as f64 / units as f64, g_c - 1))
                .collect()
        })
        .collect();

    const TIE: f64 = 1e-13;

    struct Search<'a> {
        gain: &'a [Vec<f64>],
        current: Vec<usize>,
        best_value: f64,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn descend(&mut self, file: usize, remaining: usize, partial: f64) {
            let last = self.gain.len() - 1;
            if file == last {
                self.current[file] = remaining;
                let value = partial + self.gain[file][remaining];
                if value > self.best_value + TIE {
                    self.best_value = value;
                    self.best.copy_from_slice(&self.current);
                }
                return;
            }
            for k in (0..=remaining).rev() {
                self.current[file] = k;
                self.descend(file + 1, remaining - k, partial + self.gain[file][k]);
            }
        }
    }

    let run = |first: usize| {
        let mut search = Search {
            gain: &gain,
            current: vec![0; m],
            best_value: f64::NEG_INFINITY,
            best: vec![0; m],
        };
        if m == 1 {
            search.current[0] = units;
            search.best_value = gain[0][units];
            search.best[0] = units;
        } else {
            search.current[0] = first;
            search.descend(1, units - first, gain[0][first]);
        }
        (search.best_value, search.best)
    };

    let firsts: Vec<usize> = if m == 1 { vec![units] } else { (0..=units).rev().collect() };
    let candidates: Vec<(f64, Vec<usize>)> = firsts.into_par_iter().map(run).collect();
    let mut best_value = f64::NEG_INFINITY;
    let mut best = vec![0; m];
    for (value, vector) in candidates {
        if value > best_value + TIE {
            best_value = value;
            best = vector;
        }
    }
    let pmf = best.iter().map(|&k| k as f64 / units as f64).collect();
    CachingDistribution::custom(pmf)
}

/// One file per node, one-based ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachePlacement {
    pub cached_file: Vec<usize>,
}

/// Draws `n` i.i.d. caches from `cache`.
pub fn sample_placement<R: Rng + ?Sized>(
    cache: &CachingDistribution,
    n: usize,
    rng: &mut R,
) -> CachePlacement {
    let table = cache.table();
    CachePlacement {
        cached_file: (0..n).map(|_| table.sample(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::popularity::zipf_pmf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_two_files_hit() {
        let pop = zipf_pmf(0.5, 2).unwrap();
        let cache = CachingDistribution::uniform(2).unwrap();
        assert!((hit_probability(&pop, &cache, 3).unwrap() - 0.75).abs() < 1e-15);
        assert!((analytic_outage(&pop, &cache, 3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_file_always_hits() {
        let pop = zipf_pmf(0.5, 1).unwrap();
        let cache = CachingDistribution::custom(vec![1.0]).unwrap();
        assert_eq!(hit_probability(&pop, &cache, 2).unwrap(), 1.0);
        assert_eq!(analytic_outage(&pop, &cache, 2).unwrap(), 0.0);
        assert_eq!(cutoff_index(&pop, 5).unwrap(), (1, 0.0));
        assert_eq!(optimal_caching(&pop, 3).unwrap().pmf(), &[1.0]);
        assert_eq!(brute_force_caching_oracle(&pop, 3, 0.01).unwrap().pmf(), &[1.0]);
    }

    #[test]
    fn hit_probability_errors() {
        let pop = zipf_pmf(0.5, 3).unwrap();
        let cache = CachingDistribution::uniform(2).unwrap();
        assert!(matches!(
            hit_probability(&pop, &cache, 3),
            Err(Error::LibraryMismatch { .. })
        ));
        let cache = CachingDistribution::uniform(3).unwrap();
        assert!(hit_probability(&pop, &cache, 1).is_err());
    }

    #[test]
    fn two_file_cutoff_and_distribution() {
        let pop = zipf_pmf(0.5, 2).unwrap();
        let (m_star, nu) = cutoff_index(&pop, 4).unwrap();
        // z = sqrt(P_r): direct evaluation of the multiplier.
        let z1 = pop.prob(1).sqrt();
        let z2 = pop.prob(2).sqrt();
        assert!((z1 - 0.76537).abs() < 1e-5 && (z2 - 0.64359).abs() < 1e-5);
        assert_eq!(m_star, 2);
        assert!((nu - 1.0 / (1.0 / z1 + 1.0 / z2)).abs() < 1e-15);
        assert!((nu - 0.3496).abs() < 1e-4);
        let opt = optimal_caching(&pop, 4).unwrap();
        assert!((opt.pmf()[0] - 0.5432).abs() < 1e-4);
        assert!((opt.pmf()[1] - 0.4568).abs() < 1e-4);
        let oracle = brute_force_caching_oracle(&pop, 4, 0.01).unwrap();
        assert!((oracle.pmf()[0] - 0.5432).abs() <= 0.01);
        assert!((oracle.pmf()[1] - 0.4568).abs() <= 0.01);
    }

    #[test]
    fn steep_popularity_truncates_support() {
        let pop = zipf_pmf(0.8, 20).unwrap();
        let (m_star, _) = cutoff_index(&pop, 4).unwrap();
        assert!(m_star < 20);
        // Scan: every k past the cutoff violates nu(k) < z_k.
        let z: Vec<f64> = pop.pmf().iter().map(|p| p.powf(0.5)).collect();
        for k in 1..=20 {
            let nu = (k - 1) as f64 / z[..k].iter().map(|v| 1.0 / v).sum::<f64>();
            assert_eq!(nu < z[k - 1], k <= m_star, "k = {k}");
        }
    }

    #[test]
    fn tail_files_get_no_oracle_mass() {
        let pop = zipf_pmf(0.9, 6).unwrap();
        let opt = optimal_caching(&pop, 3).unwrap();
        assert!(opt.cutoff() < 6);
        let oracle = brute_force_caching_oracle(&pop, 3, 0.01).unwrap();
        for f in opt.cutoff()..6 {
            assert!(oracle.pmf()[f] <= 0.01);
        }
    }

    #[test]
    fn optimal_beats_grid_for_five_files() {
        let pop = zipf_pmf(0.6, 5).unwrap();
        let opt = optimal_caching(&pop, 5).unwrap();
        let oracle = brute_force_caching_oracle(&pop, 5, 0.01).unwrap();
        let h_opt = hit_probability(&pop, &opt, 5).unwrap();
        let h_grid = hit_probability(&pop, &oracle, 5).unwrap();
        assert!(h_opt >= h_grid - 1e-3);
    }

    #[test]
    fn degenerate_linear_objective_picks_vertex() {
        let pop = zipf_pmf(0.5, 2).unwrap();
        let oracle = brute_force_caching_oracle(&pop, 2, 0.01).unwrap();
        assert_eq!(oracle.pmf(), &[1.0, 0.0]);
        assert!(optimal_caching(&pop, 2).is_err());
    }

    #[test]
    fn oracle_guards() {
        let pop = zipf_pmf(0.5, 7).unwrap();
        assert!(matches!(
            brute_force_caching_oracle(&pop, 3, 0.01),
            Err(Error::OracleTooLarge(7))
        ));
        let pop = zipf_pmf(0.5, 3).unwrap();
        assert!(brute_force_caching_oracle(&pop, 3, 0.03).is_err());
    }

    #[test]
    fn hit_probability_matches_simulated_clusters() {
        let pop = zipf_pmf(0.5, 3).unwrap();
        let cache = optimal_caching(&pop, 4).unwrap();
        let exact = hit_probability(&pop, &cache, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let clusters = 1_000_000;
        let mut hits = 0usize;
        for _ in 0..clusters {
            let request = pop.table().sample(&mut rng);
            let others = sample_placement(&cache, 3, &mut rng);
            if others.cached_file.contains(&request) {
                hits += 1;
            }
        }
        let rate = hits as f64 / clusters as f64;
        let se = (exact * (1.0 - exact) / clusters as f64).sqrt();
        assert!((rate - exact).abs() < 4.0 * se, "{rate} vs {exact}");
    }

    #[test]
    fn placement_sampling() {
        let single = CachingDistribution::uniform(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_placement(&single, 100, &mut rng)
            .cached_file
            .iter()
            .all(|&f| f == 1));

        let pop = zipf_pmf(0.5, 2).unwrap();
        let opt = optimal_caching(&pop, 4).unwrap();
        let n = 1_000_000;
        let placement = sample_placement(&opt, n, &mut ChaCha8Rng::seed_from_u64(2));
        let frac = placement.cached_file.iter().filter(|&&f| f == 1).count() as f64 / n as f64;
        let p = opt.pmf()[0];
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());

        let again = sample_placement(&opt, n, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(placement, again);
    }

    #[test]
    fn uniform_popularity_gives_uniform_caching() {
        let pop = zipf_pmf(0.0, 8).unwrap();
        let opt = optimal_caching(&pop, 6).unwrap();
        assert_eq!(opt.cutoff(), 8);
        for &p in opt.pmf() {
            assert!((p - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_rejects_bad_pmf() {
        assert!(CachingDistribution::custom(vec![0.5, 0.6]).is_err());
        assert!(CachingDistribution::custom(vec![-0.1, 1.1]).is_err());
        assert!(CachingDistribution::custom(vec![]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn water_filling_structure(gamma in 0.0f64..0.99, m in 1usize..400, g_c in 3usize..300) {
                let pop = zipf_pmf(gamma, m).unwrap();
                let opt = optimal_caching(&pop, g_c).unwrap();
                let total: f64 = opt.pmf().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                for (i, &p) in opt.pmf().iter().enumerate() {
                    prop_assert_eq!(p > 0.0, i < opt.cutoff());
                }
                for w in opt.pmf().windows(2) {
                    prop_assert!(w[0] >= w[1]);
                }
            }

            #[test]
            fn hit_and_outage_are_complements(gamma in 0.0f64..0.99, m in 1usize..200, g_c in 3usize..50) {
                let pop = zipf_pmf(gamma, m).unwrap();
                let opt = optimal_caching(&pop, g_c).unwrap();
                let hit = hit_probability(&pop, &opt, g_c).unwrap();
                let out = analytic_outage(&pop, &opt, g_c).unwrap();
                prop_assert!((hit + out - 1.0).abs() < 1e-12);
            }

            #[test]
            fn optimal_dominates_heuristics(gamma in 0.05f64..0.99, m in 2usize..300, g_c in 3usize..60) {
                let pop = zipf_pmf(gamma, m).unwrap();
                let opt = optimal_caching(&pop, g_c).unwrap();
                let h_opt = hit_probability(&pop, &opt, g_c).unwrap();
                let zipf = CachingDistribution::zipf_heuristic(gamma, m).unwrap();
                let uni = CachingDistribution::uniform(m).unwrap();
                prop_assert!(h_opt >= hit_probability(&pop, &zipf, g_c).unwrap() - 1e-12);
                prop_assert!(h_opt >= hit_probability(&pop, &uni, g_c).unwrap() - 1e-12);
            }
        }
    }
}
