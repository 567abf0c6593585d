//! Cluster tiling, TDMA reuse classes and a protocol-model check of every slot.

use d2d_tradeoff::topology::{build_clusters, build_grid, check_feasible, reuse_schedule, LinkSet};

fn main() -> d2d_tradeoff::Result<()> {
    let grid = build_grid(10_000)?;
    for delta in [0.4, 1.0, 2.0] {
        let clusters = build_clusters(&grid, 100, delta, None)?;
        let classes = reuse_schedule(&clusters)?;
        let mut ok = true;
        for class in &classes {
            // First member transmits to the last member of each active cluster.
            let mut links = LinkSet::new();
            for &c in class {
                let members = &clusters.members()[c];
                links.push(members[0], members[members.len() - 1])?;
            }
            ok &= check_feasible(&links, &grid, clusters.range(), delta);
        }
        println!(
            "Delta={delta}: R={:.4} K={} classes of {} clusters, all slots feasible: {ok}",
            clusters.range(),
            clusters.reuse(),
            classes[0].len()
        );
    }
    Ok(())
}
