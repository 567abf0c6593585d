//! Monte Carlo estimation of the clustering scheme's outage and min per-user throughput.
//!
//! Each trial draws a fresh cache placement and request vector. Within a cluster the
//! served users share the cluster's single link in round robin, and the cluster is
//! active in one of `K` reuse slots, so each of the `s` served users of a cluster gets
//! the long-run rate `C / (K s)`. That limit is computed directly per trial.
//!
//! Trial `t` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, so every
//! number depends only on the configuration and master seed. Trials are evaluated in
//! parallel in fixed-size batches and reduced in trial order, which keeps results
//! bit-identical across worker counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::{
    self, optimal_caching, sample_placement, CachePlacement, CachingDistribution, CachingKind,
};
use crate::popularity::{sample_requests, zipf_pmf, PopularityModel, RequestVector};
use crate::theory::{CaseTag, CurvePoint, SourceTag, TradeoffCurve};
use crate::topology::{build_clusters, build_grid, ClusterGrid, GridNetwork, LinkSet};
use crate::{Error, Result};

/// Which caching distribution the nodes draw from.
#[derive(Debug, Clone, PartialEq)]
pub enum CachingSpec {
    Optimal,
    Zipf { gamma_c: f64 },
    Uniform,
}

impl CachingSpec {
    pub fn build(&self, pop: &PopularityModel, g_c: usize) -> Result<CachingDistribution> {
        match *self {
            CachingSpec::Optimal => optimal_caching(pop, g_c),
            CachingSpec::Zipf { gamma_c } => CachingDistribution::zipf_heuristic(gamma_c, pop.m()),
            CachingSpec::Uniform => CachingDistribution::uniform(pop.m()),
        }
    }
}

impl std::fmt::Display for CachingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CachingSpec::Optimal => write!(f, "optimal"),
            CachingSpec::Zipf { gamma_c } => write!(f, "zipf:{gamma_c}"),
            CachingSpec::Uniform => write!(f, "uniform"),
        }
    }
}

impl std::str::FromStr for CachingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(CachingSpec::Optimal),
            "uniform" => Ok(CachingSpec::Uniform),
            other => match other.strip_prefix("zipf:") {
                Some(g) => g
                    .parse::<f64>()
                    .ok()
                    .filter(|g| *g >= 0.0 && g.is_finite())
                    .map(|gamma_c| CachingSpec::Zipf { gamma_c })
                    .ok_or_else(|| Error::invalid(format!("bad Zipf caching exponent in {s:?}"))),
                None => Err(Error::invalid(format!(
                    "unknown caching kind {s:?} (expected optimal, uniform or zipf:<gamma_c>)"
                ))),
            },
        }
    }
}

impl From<&CachingKind> for CachingSpec {
    fn from(kind: &CachingKind) -> Self {
        match *kind {
            CachingKind::ZipfHeuristic { gamma_c } => CachingSpec::Zipf { gamma_c },
            CachingKind::Uniform => CachingSpec::Uniform,
            CachingKind::Optimal | CachingKind::Custom => CachingSpec::Optimal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub m: usize,
    pub gamma_r: f64,
    pub g_c: usize,
    pub delta: f64,
    /// Link rate `C` in bit/s/Hz.
    pub rate: f64,
    pub reuse_override: Option<usize>,
    pub caching: CachingSpec,
    pub trials: usize,
    pub seed: u64,
    pub allow_self_hit: bool,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 10_000,
            m: 1000,
            gamma_r: 0.6,
            g_c: 100,
            delta: 1.0,
            rate: 1.0,
            reuse_override: None,
            caching: CachingSpec::Optimal,
            trials: 200,
            seed: 0,
            allow_self_hit: false,
            workers: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::invalid(format!("link rate C must be > 0, got {}", self.rate)));
        }
        if self.m == 0 {
            return Err(Error::invalid("library size m must be >= 1"));
        }
        Ok(())
    }
}

/// Everything a trial needs, built once per configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: SimConfig,
    popularity: PopularityModel,
    caching: CachingDistribution,
    grid: GridNetwork,
    clusters: ClusterGrid,
}

impl Scenario {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let popularity = zipf_pmf(config.gamma_r, config.m)?;
        let grid = build_grid(config.n)?;
        let clusters = build_clusters(&grid, config.g_c, config.delta, config.reuse_override)?;
        let caching = config.caching.build(&popularity, config.g_c)?;
        Ok(Scenario {
            config: config.clone(),
            popularity,
            caching,
            grid,
            clusters,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn popularity(&self) -> &PopularityModel {
        &self.popularity
    }

    pub fn caching(&self) -> &CachingDistribution {
        &self.caching
    }

    pub fn grid(&self) -> &GridNetwork {
        &self.grid
    }

    pub fn clusters(&self) -> &ClusterGrid {
        &self.clusters
    }

    /// Generator for trial `index`.
    pub fn trial_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Placement and requests of trial `index`, in that draw order.
    pub fn draw(&self, index: usize) -> (CachePlacement, RequestVector) {
        let mut rng = self.trial_rng(index);
        let placement = sample_placement(&self.caching, self.config.n, &mut rng);
        let requests = sample_requests(&self.popularity, self.config.n, &mut rng);
        (placement, requests)
    }

    pub fn run_trial(&self, index: usize) -> TrialOutcome {
        let (placement, requests) = self.draw(index);
        run_trial(&self.config, &placement, &requests, &self.clusters)
    }

    /// Closed-form outage of this configuration.
    pub fn analytic_outage(&self) -> f64 {
        let searched = if self.config.allow_self_hit {
            self.config.g_c
        } else {
            self.config.g_c - 1
        };
        cache::miss_among(&self.popularity, &self.caching, searched)
    }
}

/// In-cluster serving candidates of every user.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialLinks {
    /// For each user, the nodes of its cluster caching its request.
    pub candidates: Vec<Vec<usize>>,
    /// Whether each cluster holds at least one potential link.
    pub good: Vec<bool>,
}

impl PotentialLinks {
    pub fn served(&self) -> Vec<bool> {
        self.candidates.iter().map(|c| !c.is_empty()).collect()
    }

    pub fn good_clusters(&self) -> usize {
        self.good.iter().filter(|&&g| g).count()
    }
}

pub fn find_potential_links(
    placement: &CachePlacement,
    requests: &RequestVector,
    clusters: &ClusterGrid,
    allow_self_hit: bool,
) -> PotentialLinks {
    let mut candidates = vec![Vec::new(); clusters.n()];
    let mut good = vec![false; clusters.cluster_count()];
    for (c, members) in clusters.members().iter().enumerate() {
        for &u in members {
            let wanted = requests.requests[u];
            let found: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&v| (v != u || allow_self_hit) && placement.cached_file[v] == wanted)
                .collect();
            good[c] |= !found.is_empty();
            candidates[u] = found;
        }
    }
    PotentialLinks { candidates, good }
}

/// One active link per good cluster of a reuse class: a served user chosen uniformly
/// and one of its serving nodes. Self-hits never produce a link.
pub fn sample_active_links<R: Rng + ?Sized>(
    potential: &PotentialLinks,
    clusters: &ClusterGrid,
    class: &[usize],
    rng: &mut R,
) -> LinkSet {
    let mut links = LinkSet::new();
    for &c in class {
        let pairs: Vec<(usize, usize)> = clusters.members()[c]
            .iter()
            .flat_map(|&u| {
                potential.candidates[u]
                    .iter()
                    .filter(move |&&v| v != u)
                    .map(move |&v| (v, u))
            })
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let receivers: Vec<usize> = {
            let mut r: Vec<usize> = pairs.iter().map(|&(_, u)| u).collect();
            r.dedup();
            r
        };
        let rx = receivers[rng.gen_range(0..receivers.len())];
        let txs: Vec<usize> = pairs.iter().filter(|p| p.1 == rx).map(|p| p.0).collect();
        let tx = txs[rng.gen_range(0..txs.len())];
        links
            .push(tx, rx)
            .expect("clusters are disjoint, so transmitters are distinct");
    }
    links
}

/// Per-user result of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub served: Vec<bool>,
    /// Long-run throughput of each user in bit/s/Hz.
    pub share: Vec<f64>,
    pub good_clusters: usize,
}

impl TrialOutcome {
    pub fn outage_count(&self) -> usize {
        self.served.iter().filter(|&&s| !s).count()
    }

    pub fn total_throughput(&self) -> f64 {
        self.share.iter().sum()
    }
}

/// Round-robin shares for one placement/request realization.
pub fn run_trial(
    config: &SimConfig,
    placement: &CachePlacement,
    requests: &RequestVector,
    clusters: &ClusterGrid,
) -> TrialOutcome {
    let n = clusters.n();
    let slot_rate = config.rate / clusters.reuse() as f64;
    let mut served = vec![false; n];
    let mut share = vec![0.0; n];
    let mut good_clusters = 0;
    let mut copies = vec![0u32; config.m];

    for members in clusters.members() {
        for &v in members {
            copies[placement.cached_file[v] - 1] += 1;
        }
        let mut count = 0usize;
        for &u in members {
            let wanted = requests.requests[u];
            let own = (!config.allow_self_hit && placement.cached_file[u] == wanted) as u32;
            if copies[wanted - 1] > own {
                served[u] = true;
                count += 1;
            }
        }
        if count > 0 {
            good_clusters += 1;
            let each = slot_rate / count as f64;
            for &u in members {
                if served[u] {
                    share[u] = each;
                }
            }
        }
        for &v in members {
            copies[placement.cached_file[v] - 1] = 0;
        }
    }

    TrialOutcome {
        served,
        share,
        good_clusters,
    }
}

/// Aggregated outage/throughput of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffEstimate {
    pub config: SimConfig,
    /// `K` actually used.
    pub reuse: usize,
    pub reuse_overridden: bool,
    pub caching_kind: CachingKind,
    /// Mean outage probability over users and trials.
    pub p_hat: f64,
    /// 95% half-width of `p_hat`.
    pub p_ci: f64,
    /// Pooled per-user mean throughput.
    pub t_min_hat: f64,
    pub t_ci: f64,
    /// Smallest per-user mean throughput; biased low at finite trial counts.
    pub t_min_diag: f64,
    pub analytic_outage: f64,
    pub per_user_throughput: Vec<f64>,
    pub trials: usize,
}

const Z95: f64 = 1.959_963_984_540_054;
const BATCH: usize = 64;

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(pool.install(job))
}

impl Scenario {
    /// Runs every trial and aggregates.
    pub fn estimate(&self) -> Result<TradeoffEstimate> {
        let config = &self.config;
        let n = config.n;
        let trials = config.trials;
        let (per_trial_outage, per_trial_mean, totals) = with_workers(config.workers, || {
            let mut per_trial_outage = Vec::with_capacity(trials);
            let mut per_trial_mean = Vec::with_capacity(trials);
            let mut totals = vec![0.0f64; n];
            let mut start = 0;
            while start < trials {
                let end = (start + BATCH).min(trials);
                let batch: Vec<TrialOutcome> =
                    (start..end).into_par_iter().map(|t| self.run_trial(t)).collect();
                for outcome in batch {
                    per_trial_outage.push(outcome.outage_count() as f64 / n as f64);
                    per_trial_mean.push(outcome.total_throughput() / n as f64);
                    for (acc, s) in totals.iter_mut().zip(&outcome.share) {
                        *acc += s;
                    }
                }
                start = end;
            }
            (per_trial_outage, per_trial_mean, totals)
        })?;

        let (p_hat, p_sd) = mean_and_sd(&per_trial_outage);
        let (t_min_hat, t_sd) = mean_and_sd(&per_trial_mean);
        let p_ci = if trials >= 2 {
            Z95 * p_sd / (trials as f64).sqrt()
        } else {
            Z95 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
        };
        let t_ci = Z95 * t_sd / (trials as f64).sqrt();
        let per_user_throughput: Vec<f64> = totals.iter().map(|s| s / trials as f64).collect();
        let t_min_diag = per_user_throughput.iter().copied().fold(f64::INFINITY, f64::min);

        Ok(TradeoffEstimate {
            config: config.clone(),
            reuse: self.clusters.reuse(),
            reuse_overridden: self.clusters.reuse_overridden(),
            caching_kind: self.caching.kind().clone(),
            p_hat,
            p_ci,
            t_min_hat,
            t_ci,
            t_min_diag,
            analytic_outage: self.analytic_outage(),
            per_user_throughput,
            trials,
        })
    }
}

pub fn estimate_tradeoff_point(config: &SimConfig) -> Result<TradeoffEstimate> {
    Scenario::new(config)?.estimate()
}

/// A sweep point that could not be run.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub g_c: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    /// Ordered by `p_hat` ascending.
    pub estimates: Vec<TradeoffEstimate>,
    pub skipped: Vec<SkippedPoint>,
}

impl Sweep {
    /// Simulated points normalized by `C`.
    pub fn curve(&self) -> TradeoffCurve {
        TradeoffCurve::new(
            self.estimates
                .iter()
                .map(|e| CurvePoint {
                    p: e.p_hat,
                    t: e.t_min_hat / e.config.rate,
                    case: CaseTag::Simulated,
                    source: SourceTag::Simulated,
                })
                .collect(),
        )
    }
}

/// Estimates one point per cluster size. Inadmissible sizes are recorded, not fatal;
/// a network size that is not a perfect square is.
pub fn sweep_cluster_sizes(base: &SimConfig, cluster_sizes: &[usize]) -> Result<Sweep> {
    base.validate()?;
    crate::topology::build_grid(base.n)?;
    let mut sweep = Sweep::default();
    for &g_c in cluster_sizes {
        let config = SimConfig { g_c, ..base.clone() };
        match Scenario::new(&config) {
            Ok(scenario) => sweep.estimates.push(scenario.estimate()?),
            Err(e) if e.exit_code() == 1 => sweep.skipped.push(SkippedPoint {
                g_c,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    sweep
        .estimates
        .sort_by(|a, b| a.p_hat.total_cmp(&b.p_hat).then(b.config.g_c.cmp(&a.config.g_c)));
    Ok(sweep)
}
