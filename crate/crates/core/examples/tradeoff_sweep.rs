//! Simulated tradeoff for n=10000, m=1000, K=4 against the achievable dominant term.

use d2d_tradeoff::simulator::{sweep_cluster_sizes, SimConfig};
use d2d_tradeoff::theory::TheoryParams;

fn main() -> d2d_tradeoff::Result<()> {
    let sizes = [4, 16, 25, 100, 400, 625, 2500];
    for gamma_r in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let base = SimConfig {
            gamma_r,
            reuse_override: Some(4),
            seed: 11,
            ..SimConfig::default()
        };
        let sweep = sweep_cluster_sizes(&base, &sizes)?;
        let theory = TheoryParams::new(gamma_r, base.m, base.n);
        println!("gamma_r = {gamma_r}");
        for e in &sweep.estimates {
            let t = theory.achievable_case2(e.p_hat);
            println!(
                "  g_c={:5} p={:.4} sim={:.4e} theory={:.4e} ratio={:.3}",
                e.config.g_c,
                e.p_hat,
                e.t_min_hat,
                t,
                e.t_min_hat / t
            );
        }
    }
    Ok(())
}
