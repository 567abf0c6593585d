//! Water-filling caching distribution versus the uniform and Zipf heuristics.

use d2d_tradeoff::cache::{cutoff_index, hit_probability, optimal_caching, CachingDistribution};
use d2d_tradeoff::popularity::zipf_pmf;

fn main() -> d2d_tradeoff::Result<()> {
    let (m, gamma_r) = (1000, 0.6);
    let pop = zipf_pmf(gamma_r, m)?;
    println!("{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}", "g_c", "m*", "nu", "optimal", "zipf", "uniform");
    for g_c in [4, 16, 25, 100, 400] {
        let (m_star, nu) = cutoff_index(&pop, g_c)?;
        let opt = optimal_caching(&pop, g_c)?;
        let zipf = CachingDistribution::zipf_heuristic(gamma_r, m)?;
        let uniform = CachingDistribution::uniform(m)?;
        println!(
            "{g_c:>6} {m_star:>6} {nu:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            hit_probability(&pop, &opt, g_c)?,
            hit_probability(&pop, &zipf, g_c)?,
            hit_probability(&pop, &uniform, g_c)?,
        );
    }
    Ok(())
}
