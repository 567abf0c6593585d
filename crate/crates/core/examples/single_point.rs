//! One Monte Carlo tradeoff point with confidence intervals and the analytic outage.

use d2d_tradeoff::simulator::{estimate_tradeoff_point, SimConfig};

fn main() -> d2d_tradeoff::Result<()> {
    let config = SimConfig {
        g_c: 100,
        reuse_override: Some(4),
        seed: 2024,
        ..SimConfig::default()
    };
    let est = estimate_tradeoff_point(&config)?;
    println!("K = {} (overridden: {})", est.reuse, est.reuse_overridden);
    println!("p_hat = {:.5} +/- {:.5}, analytic {:.5}", est.p_hat, est.p_ci, est.analytic_outage);
    println!("T_min = {:.6e} +/- {:.1e} bit/s/Hz", est.t_min_hat, est.t_ci);
    println!("min over users (biased low) = {:.6e}", est.t_min_diag);
    Ok(())
}
