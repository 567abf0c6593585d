//! Brute-force reference computations used to check the closed forms and the Monte
//! Carlo engine: exhaustive enumeration of tiny networks and the caching simplex
//! search.

use crate::cache::{brute_force_caching_oracle, hit_probability, optimal_caching, CachingDistribution};
use crate::popularity::{zipf_pmf, PopularityModel};
use crate::simulator::{CachingSpec, Scenario, SimConfig};
use crate::topology::ClusterGrid;
use crate::{Error, Result};

/// Exact per-user expectations over every placement and request vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMetrics {
    /// Average outage probability across users.
    pub outage: f64,
    /// `E[T_u]` of each user.
    pub throughput: Vec<f64>,
}

impl ExactMetrics {
    pub fn mean_throughput(&self) -> f64 {
        self.throughput.iter().sum::<f64>() / self.throughput.len() as f64
    }
}

/// Enumerates all `m^n` placements times `m^n` request vectors.
///
/// A user is served when another node of its cluster (or itself, with
/// `allow_self_hit`) caches its request; the `s` served users of a cluster split
/// `C / K` evenly.
pub fn enumerate_small_network(
    pop: &PopularityModel,
    cache: &CachingDistribution,
    clusters: &ClusterGrid,
    rate: f64,
    allow_self_hit: bool,
) -> Result<ExactMetrics> {
    let n = clusters.n();
    let m = pop.m();
    let states = (m as f64).powi(2 * n as i32);
    if states > 2e7 {
        return Err(Error::invalid(format!(
            "enumeration over {states:.0} states is too large"
        )));
    }
    let per_side = m.pow(n as u32);
    let digits = |mut code: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let d = code % m;
                code /= m;
                d
            })
            .collect()
    };
    let slot = rate / clusters.reuse() as f64;

    let mut outage = 0.0;
    let mut throughput = vec![0.0; n];
    for pc in 0..per_side {
        let cached = digits(pc);
        let p_place: f64 = cached.iter().map(|&f| cache.pmf()[f]).product();
        if p_place == 0.0 {
            continue;
        }
        for rc in 0..per_side {
            let wanted = digits(rc);
            let p_req: f64 = wanted.iter().map(|&f| pop.pmf()[f]).product();
            let weight = p_place * p_req;
            if weight == 0.0 {
                continue;
            }
            let served: Vec<bool> = (0..n)
                .map(|u| {
                    (0..n).any(|v| {
                        (v != u || allow_self_hit)
                            && clusters.cluster_of(v) == clusters.cluster_of(u)
                            && cached[v] == wanted[u]
                    })
                })
                .collect();
            for u in 0..n {
                if !served[u] {
                    outage += weight / n as f64;
                    continue;
                }
                let s = (0..n)
                    .filter(|&v| served[v] && clusters.cluster_of(v) == clusters.cluster_of(u))
                    .count();
                throughput[u] += weight * slot / s as f64;
            }
        }
    }
    Ok(ExactMetrics { outage, throughput })
}

/// Outcome of one brute-force check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Closed-form optimal caching against the simplex grid for every `m <= 6`,
/// `g_c` in {3, 4, 5} and `gamma_r` in {0.2, 0.5, 0.9}: the optimum must reach the grid
/// maximum within `1e-3` and agree with the grid argmax within one grid step.
pub fn caching_oracle_suite(resolution: f64) -> Result<Vec<OracleCheck>> {
    let mut checks = Vec::new();
    for m in 1..=6 {
        for g_c in [3, 4, 5] {
            for gamma_r in [0.2, 0.5, 0.9] {
                let pop = zipf_pmf(gamma_r, m)?;
                let opt = optimal_caching(&pop, g_c)?;
                let grid = brute_force_caching_oracle(&pop, g_c, resolution)?;
                let h_opt = hit_probability(&pop, &opt, g_c)?;
                let h_grid = hit_probability(&pop, &grid, g_c)?;
                let max_dev = opt
                    .pmf()
                    .iter()
                    .zip(grid.pmf())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                checks.push(OracleCheck {
                    name: format!("caching m={m} g_c={g_c} gamma_r={gamma_r}"),
                    passed: h_opt >= h_grid - 1e-3 && max_dev <= resolution + 1e-12,
                    detail: format!(
                        "hit optimal={h_opt:.9} grid={h_grid:.9} max_coord_dev={max_dev:.4}"
                    ),
                });
            }
        }
    }
    Ok(checks)
}

/// Exact enumeration of the 4-node, 2-file, single-cluster network against Monte Carlo
/// with `trials` trials: outage and mean throughput within 4 standard errors.
pub fn enumeration_suite(trials: usize, seed: u64) -> Result<Vec<OracleCheck>> {
    let config = SimConfig {
        n: 4,
        m: 2,
        gamma_r: 0.5,
        g_c: 4,
        delta: 0.4,
        rate: 1.0,
        reuse_override: None,
        caching: CachingSpec::Optimal,
        trials,
        seed,
        allow_self_hit: false,
        workers: 0,
    };
    let scenario = Scenario::new(&config)?;
    let exact = enumerate_small_network(
        scenario.popularity(),
        scenario.caching(),
        scenario.clusters(),
        config.rate,
        false,
    )?;

    let mut outage = Vec::with_capacity(trials);
    let mut mean_share = Vec::with_capacity(trials);
    for t in 0..trials {
        let out = scenario.run_trial(t);
        outage.push(out.outage_count() as f64 / 4.0);
        mean_share.push(out.total_throughput() / 4.0);
    }
    let stats = |xs: &[f64]| {
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (mean, (var / k).sqrt())
    };
    let (p_mc, p_se) = stats(&outage);
    let (t_mc, t_se) = stats(&mean_share);
    Ok(vec![
        OracleCheck {
            name: "enumeration n=4 m=2 g_c=4 outage".into(),
            passed: (p_mc - exact.outage).abs() <= 4.0 * p_se,
            detail: format!("exact={:.9} mc={p_mc:.9} se={p_se:.2e}", exact.outage),
        },
        OracleCheck {
            name: "enumeration n=4 m=2 g_c=4 throughput".into(),
            passed: (t_mc - exact.mean_throughput()).abs() <= 4.0 * t_se,
            detail: format!(
                "exact={:.9} mc={t_mc:.9} se={t_se:.2e}",
                exact.mean_throughput()
            ),
        },
    ])
}
