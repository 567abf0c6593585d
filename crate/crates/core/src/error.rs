use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n = {n} is not a perfect square (nearest perfect squares: {below} and {above})")]
    NotPerfectSquare { n: usize, below: usize, above: usize },

    #[error("cluster size {g_c} does not tile a {n}-node grid into square clusters (nearest admissible: {nearest:?})")]
    InadmissibleClusterSize {
        n: usize,
        g_c: usize,
        nearest: Vec<usize>,
    },

    #[error("library size mismatch: popularity has {popularity} files, caching has {caching}")]
    LibraryMismatch { popularity: usize, caching: usize },

    #[error("brute-force caching oracle supports at most 6 files, got {0}")]
    OracleTooLarge(usize),

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("malformed csv at row {row}: {msg}")]
    Csv { row: usize, msg: String },

    #[error("curves do not overlap in outage probability")]
    DisjointRanges,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code: 1 for input validation failures, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::NoConvergence(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable category used in single-line CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotPerfectSquare { .. } => "not_perfect_square",
            Error::InadmissibleClusterSize { .. } => "inadmissible_cluster_size",
            Error::LibraryMismatch { .. } => "library_mismatch",
            Error::OracleTooLarge(_) => "oracle_too_large",
            Error::NoConvergence(_) => "no_convergence",
            Error::Csv { .. } => "malformed_csv",
            Error::DisjointRanges => "disjoint_ranges",
            Error::Io(_) => "io",
        }
    }
}
