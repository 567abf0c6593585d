//! Closed-form achievable and outer-bound curves with the reference baselines.

use d2d_tradeoff::theory::{
    baseline_throughputs, default_achievable_curve, default_outer_curve, regime_classify, solve_rho4,
    TheoryParams, DEFAULT_SMALL_EPSILON,
};

fn main() -> d2d_tradeoff::Result<()> {
    let params = TheoryParams::new(0.6, 1000, 10_000);
    let regime = regime_classify(params.n, params.m, params.gamma_r, DEFAULT_SMALL_EPSILON)?;
    println!("regime {:?} (m / n^alpha = {:.3e})", regime.regime, regime.ratio);
    println!("rho4 = {:.10}", solve_rho4(params.gamma_r, params.delta)?);

    let achievable = default_achievable_curve(&params, 8)?;
    let outer = default_outer_curve(&params, 8)?;
    for pt in achievable.points.iter().chain(&outer.points) {
        println!("{:>20} p={:.5} t={:.5e}", pt.case.to_string(), pt.p, pt.t);
    }
    let b = baseline_throughputs(params.n, params.m, params.rate)?;
    println!("broadcast {:.1e}, coded multicast {:.1e}", b.broadcast, b.coded_multicast);
    for w in achievable.warnings.iter().chain(&outer.warnings) {
        println!("warning: {w}");
    }
    Ok(())
}
