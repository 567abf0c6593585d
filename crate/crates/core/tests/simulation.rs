use d2d_tradeoff::oracle::enumerate_small_network;
use d2d_tradeoff::simulator::{estimate_tradeoff_point, CachingSpec, Scenario, SimConfig};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn tiny(caching: CachingSpec, allow_self_hit: bool, gamma_r: f64) -> SimConfig {
    SimConfig {
        n: 4,
        m: 2,
        gamma_r,
        g_c: 4,
        delta: 0.4,
        caching,
        trials: 40_000,
        seed: 77,
        allow_self_hit,
        ..SimConfig::default()
    }
}

#[test]
fn enumeration_matches_monte_carlo_across_variants() {
    let variants = [
        tiny(CachingSpec::Optimal, false, 0.5),
        tiny(CachingSpec::Uniform, false, 0.2),
        tiny(CachingSpec::Zipf { gamma_c: 0.8 }, false, 0.9),
        tiny(CachingSpec::Optimal, true, 0.5),
        tiny(CachingSpec::Uniform, true, 0.0),
    ];
    for config in variants {
        let s = Scenario::new(&config).unwrap();
        let exact =
            enumerate_small_network(s.popularity(), s.caching(), s.clusters(), 1.0, config.allow_self_hit)
                .unwrap();
        let mut outage = Vec::new();
        let mut share = Vec::new();
        for t in 0..config.trials {
            let out = s.run_trial(t);
            outage.push(out.outage_count() as f64 / 4.0);
            share.push(out.total_throughput() / 4.0);
        }
        let (p, p_se) = mean_se(&outage);
        let (t, t_se) = mean_se(&share);
        assert!((p - exact.outage).abs() <= 4.0 * p_se, "{config:?}: {p} vs {}", exact.outage);
        assert!(
            (t - exact.mean_throughput()).abs() <= 4.0 * t_se,
            "{config:?}: {t} vs {}",
            exact.mean_throughput()
        );
    }
}

#[test]
fn enumerated_users_are_exchangeable() {
    let s = Scenario::new(&tiny(CachingSpec::Zipf { gamma_c: 0.3 }, false, 0.7)).unwrap();
    let exact = enumerate_small_network(s.popularity(), s.caching(), s.clusters(), 1.0, false).unwrap();
    for t in &exact.throughput {
        assert!((t - exact.throughput[0]).abs() < 1e-15);
    }
}

#[test]
fn monte_carlo_users_are_exchangeable() {
    let config = SimConfig {
        n: 400,
        m: 50,
        gamma_r: 0.6,
        g_c: 16,
        trials: 4000,
        seed: 123,
        ..SimConfig::default()
    };
    let s = Scenario::new(&config).unwrap();
    let mut per_user = vec![Vec::with_capacity(config.trials); config.n];
    for t in 0..config.trials {
        for (u, x) in s.run_trial(t).share.into_iter().enumerate() {
            per_user[u].push(x);
        }
    }
    let stats: Vec<(f64, f64)> = per_user.iter().map(|xs| mean_se(xs)).collect();
    let pooled = stats.iter().map(|s| s.0).sum::<f64>() / config.n as f64;
    // Bonferroni-style bound over 400 users.
    for (u, (mean, se)) in stats.iter().enumerate() {
        assert!((mean - pooled).abs() <= 4.5 * se, "user {u}: {mean} vs pooled {pooled}");
    }
}

#[test]
fn outage_matches_analytic_with_per_trial_standard_error() {
    let cases = [
        (900, 200, 0.3, 9, CachingSpec::Optimal),
        (900, 200, 0.8, 100, CachingSpec::Uniform),
        (2500, 500, 0.6, 25, CachingSpec::Zipf { gamma_c: 0.6 }),
        (400, 400, 0.1, 400, CachingSpec::Uniform),
        (1600, 1000, 0.5, 64, CachingSpec::Optimal),
    ];
    for (i, (n, m, gamma_r, g_c, caching)) in cases.into_iter().enumerate() {
        let config = SimConfig {
            n,
            m,
            gamma_r,
            g_c,
            caching,
            trials: 2000,
            seed: 500 + i as u64,
            ..SimConfig::default()
        };
        let s = Scenario::new(&config).unwrap();
        let xs: Vec<f64> = (0..config.trials)
            .map(|t| s.run_trial(t).outage_count() as f64 / n as f64)
            .collect();
        let (p, se) = mean_se(&xs);
        assert!(
            (p - s.analytic_outage()).abs() <= 4.0 * se,
            "case {i}: mc {p} analytic {} se {se}",
            s.analytic_outage()
        );
    }
}

#[test]
fn single_file_library_gives_full_cluster_share() {
    for (n, g_c, k) in [(100, 4, None), (400, 25, Some(4)), (900, 900, None)] {
        let config = SimConfig {
            n,
            m: 1,
            g_c,
            reuse_override: k,
            trials: 5,
            seed: 1,
            ..SimConfig::default()
        };
        let est = estimate_tradeoff_point(&config).unwrap();
        assert_eq!(est.p_hat, 0.0);
        let expected = 1.0 / (est.reuse as f64 * g_c as f64);
        assert!((est.t_min_hat - expected).abs() <= 1e-12 * expected);
    }
}
