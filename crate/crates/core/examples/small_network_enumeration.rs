//! Exact expectations of a 4-node network by enumeration, against Monte Carlo.

use d2d_tradeoff::oracle::{enumerate_small_network, enumeration_suite};
use d2d_tradeoff::simulator::{Scenario, SimConfig};

fn main() -> d2d_tradeoff::Result<()> {
    let config = SimConfig {
        n: 4,
        m: 2,
        gamma_r: 0.5,
        g_c: 4,
        delta: 0.4,
        trials: 1,
        seed: 3,
        ..SimConfig::default()
    };
    let s = Scenario::new(&config)?;
    println!("caching PMF {:?}", s.caching().pmf());
    let exact = enumerate_small_network(s.popularity(), s.caching(), s.clusters(), 1.0, false)?;
    println!("exact outage {:.9}, E[T_u] {:?}", exact.outage, exact.throughput);
    for check in enumeration_suite(100_000, 3)? {
        println!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    Ok(())
}
