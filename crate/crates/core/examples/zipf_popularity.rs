//! Zipf request popularity: normalization, tail mass and an empirical histogram.

use d2d_tradeoff::popularity::{sample_requests, zipf_pmf};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> d2d_tradeoff::Result<()> {
    let pop = zipf_pmf(0.6, 1000)?;
    println!("H(0.6, 1, 1000) = {:.15}", pop.harmonic_norm());
    for f in [1, 2, 10, 100, 1000] {
        println!("P_r({f:4}) = {:.6e}", pop.prob(f));
    }
    let head: f64 = pop.pmf()[..100].iter().sum();
    println!("top 100 files carry {:.4} of the requests", head);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = sample_requests(&pop, 100_000, &mut rng);
    let ones = draws.requests.iter().filter(|&&f| f == 1).count();
    println!("empirical P_r(1) over 1e5 draws = {:.5}", ones as f64 / 1e5);
    Ok(())
}
