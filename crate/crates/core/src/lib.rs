//! Throughput-outage tradeoff toolkit for one-hop wireless D2D caching networks.
//!
//! Users sit on a regular grid, each caches one file drawn i.i.d. from a caching
//! distribution and requests one file drawn from a Zipf popularity law. The network
//! is tiled into clusters of `g_c` nodes; a user is served when another node of its
//! cluster caches the requested file, and at most one link per cluster is active in
//! each of the `K` reuse slots.
//!
//! The crate is organized by capability:
//!
//! - [`popularity`]: generalized harmonic sums, the Zipf request law, request sampling.
//! - [`cache`]: the water-filling optimal caching distribution, the cluster hit
//!   probability it maximizes, a brute-force simplex oracle, placement sampling.
//! - [`topology`]: grid geometry, cluster tiling, reuse factor and coloring, and a
//!   protocol-model feasibility checker.
//! - [`simulator`]: Monte Carlo estimation of outage and min per-user throughput.
//! - [`theory`]: closed-form achievable and outer-bound curves, regime classification,
//!   baselines.
//! - [`io`]: CSV schemas, run manifests, flat config files and the SVG plot emitter.
//! - [`cli`]: the `simulate` / `theory` / `compare` / `oracle` commands.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
mod error;
pub mod io;
pub mod oracle;
pub mod popularity;
pub mod simulator;
pub mod theory;
pub mod topology;

pub use error::{Error, Result};
