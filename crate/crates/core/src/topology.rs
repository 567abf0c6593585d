//! Grid geometry, square cluster tiling, spatial reuse and the protocol model.

use std::collections::HashSet;

use crate::{Error, Result};

/// Integer square root when `n` is a perfect square.
pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    [r.saturating_sub(1), r, r + 1].into_iter().find(|&c| c * c == n)
}

fn floor_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// `sqrt(n) x sqrt(n)` lattice with spacing `1/sqrt(n)`, cell-centered in the unit
/// square. Node `row * side + col` sits at `((col + 1/2)/side, (row + 1/2)/side)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridNetwork {
    n: usize,
    side: usize,
    positions: Vec<Point>,
}

impl GridNetwork {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Nodes per axis.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.side as f64
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, node: usize) -> Point {
        self.positions[node]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.positions[a].distance(&self.positions[b])
    }

    /// `(row, col)` of a node.
    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node / self.side, node % self.side)
    }
}

pub fn build_grid(n: usize) -> Result<GridNetwork> {
    let side = exact_sqrt(n).filter(|&s| s > 0).ok_or_else(|| {
        let r = floor_sqrt(n);
        Error::NotPerfectSquare {
            n,
            below: r * r,
            above: (r + 1) * (r + 1),
        }
    })?;
    let step = 1.0 / side as f64;
    let positions = (0..n)
        .map(|i| Point {
            x: ((i % side) as f64 + 0.5) * step,
            y: ((i / side) as f64 + 0.5) * step,
        })
        .collect();
    Ok(GridNetwork { n, side, positions })
}

/// Cluster sizes that tile an `n`-node grid into square clusters: `n / d^2` for
/// every divisor `d` of `sqrt(n)`. Ascending.
pub fn admissible_cluster_sizes(n: usize) -> Vec<usize> {
    let Some(side) = exact_sqrt(n) else {
        return Vec::new();
    };
    let mut sizes: Vec<usize> = (1..=side)
        .filter(|d| side % d == 0)
        .map(|d| n / (d * d))
        .collect();
    sizes.sort_unstable();
    sizes
}

fn nearest_admissible(n: usize, g_c: usize) -> Vec<usize> {
    let sizes = admissible_cluster_sizes(n);
    let below = sizes.iter().rev().find(|&&s| s < g_c).copied();
    let above = sizes.iter().find(|&&s| s > g_c).copied();
    below.into_iter().chain(above).collect()
}

/// Worst-case in-cluster link length: the cluster diagonal `sqrt(2) * sqrt(g_c / n)`.
pub fn transmission_range(g_c: usize, n: usize) -> f64 {
    std::f64::consts::SQRT_2 * (g_c as f64 / n as f64).sqrt()
}

/// Reuse factor `K = (ceil(sqrt(2) (1 + delta)) + 1)^2` that keeps co-colored clusters
/// outside each other's interference disks.
pub fn reuse_factor(delta: f64) -> Result<usize> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("Delta must be > 0, got {delta}")));
    }
    let spread = (std::f64::consts::SQRT_2 * (1.0 + delta)).ceil() as usize + 1;
    Ok(spread * spread)
}

/// Square tiling of a grid into `dim x dim` clusters of `g_c` nodes each.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGrid {
    n: usize,
    g_c: usize,
    /// Cluster edge length `sqrt(g_c / n)`.
    side: f64,
    /// Clusters per axis.
    dim: usize,
    membership: Vec<usize>,
    members: Vec<Vec<usize>>,
    range: f64,
    delta: f64,
    reuse: usize,
    reuse_overridden: bool,
}

impl ClusterGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g_c(&self) -> usize {
        self.g_c
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cluster_count(&self) -> usize {
        self.dim * self.dim
    }

    /// Cluster index of every node.
    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.membership[node]
    }

    /// Node lists per cluster, in ascending node order.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// `(row, col)` of a cluster.
    pub fn cluster_coords(&self, cluster: usize) -> (usize, usize) {
        (cluster / self.dim, cluster % self.dim)
    }

    /// Transmission range `R`.
    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Reuse factor `K`.
    pub fn reuse(&self) -> usize {
        self.reuse
    }

    /// True when `K` was supplied by the caller rather than derived from `Delta`.
    pub fn reuse_overridden(&self) -> bool {
        self.reuse_overridden
    }
}

/// Tiles `grid` into clusters of `g_c` nodes. `K` is derived from `delta` unless
/// `reuse_override` is given.
pub fn build_clusters(
    grid: &GridNetwork,
    g_c: usize,
    delta: f64,
    reuse_override: Option<usize>,
) -> Result<ClusterGrid> {
    let n = grid.n();
    let inadmissible = || Error::InadmissibleClusterSize {
        n,
        g_c,
        nearest: nearest_admissible(n, g_c),
    };
    if g_c == 0 || !n.is_multiple_of(g_c) {
        return Err(inadmissible());
    }
    let dim = exact_sqrt(n / g_c).ok_or_else(inadmissible)?;
    let per_axis = exact_sqrt(g_c).ok_or_else(inadmissible)?;
    debug_assert_eq!(per_axis * dim, grid.side());

    let derived = reuse_factor(delta)?;
    let (reuse, reuse_overridden) = match reuse_override {
        Some(0) => return Err(Error::invalid("reuse factor K must be >= 1")),
        Some(k) => (k, k != derived),
        None => (derived, false),
    };

    let membership: Vec<usize> = (0..n)
        .map(|node| {
            let (row, col) = grid.coords(node);
            (row / per_axis) * dim + col / per_axis
        })
        .collect();
    let mut members = vec![Vec::with_capacity(g_c); dim * dim];
    for (node, &c) in membership.iter().enumerate() {
        members[c].push(node);
    }

    Ok(ClusterGrid {
        n,
        g_c,
        side: (g_c as f64 / n as f64).sqrt(),
        dim,
        membership,
        members,
        range: transmission_range(g_c, n),
        delta,
        reuse,
        reuse_overridden,
    })
}

/// Partition of the clusters into `K` color classes by `(row mod sqrt(K), col mod sqrt(K))`.
///
/// Class `a * sqrt(K) + b` holds the clusters with `row % sqrt(K) == a` and
/// `col % sqrt(K) == b`. Classes may be empty when `dim < sqrt(K)`.
pub fn reuse_schedule(clusters: &ClusterGrid) -> Result<Vec<Vec<usize>>> {
    let k = clusters.reuse();
    let stride = exact_sqrt(k).ok_or_else(|| {
        Error::invalid(format!(
            "square reuse coloring needs a perfect-square K, got {k}"
        ))
    })?;
    let mut classes = vec![Vec::new(); k];
    for c in 0..clusters.cluster_count() {
        let (row, col) = clusters.cluster_coords(c);
        classes[(row % stride) * stride + col % stride].push(c);
    }
    Ok(classes)
}

/// Simultaneously active directed links, `(transmitter, receiver)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkSet {
    links: Vec<(usize, usize)>,
}

impl LinkSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a link set, rejecting self-links and transmitters used twice.
    pub fn from_links(links: Vec<(usize, usize)>) -> Result<Self> {
        let mut set = LinkSet::new();
        for (tx, rx) in links {
            set.push(tx, rx)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, tx: usize, rx: usize) -> Result<()> {
        if tx == rx {
            return Err(Error::invalid(format!("link {tx} -> {rx} is a self-link")));
        }
        if self.links.iter().any(|&(t, _)| t == tx) {
            return Err(Error::invalid(format!("node {tx} already transmits in this set")));
        }
        self.links.push((tx, rx));
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> (usize, usize) {
        self.links.remove(index)
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// Protocol-model feasibility: every receiver is within `range` of its transmitter and
/// at least `(1 + delta) * range` away from every other active transmitter.
pub fn check_feasible(links: &LinkSet, grid: &GridNetwork, range: f64, delta: f64) -> bool {
    // Tolerance for lattice distances that land exactly on a threshold.
    const EPS: f64 = 1e-12;
    let guard = (1.0 + delta) * range;
    let transmitters: HashSet<usize> = links.links().iter().map(|&(t, _)| t).collect();
    links.links().iter().all(|&(tx, rx)| {
        grid.distance(tx, rx) <= range + EPS
            && transmitters
                .iter()
                .filter(|&&k| k != tx)
                .all(|&k| grid.distance(k, rx) >= guard - EPS)
    })
}
