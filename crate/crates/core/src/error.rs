use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cloud has {size} points, exact search is limited to {limit}; use greedy_cover for larger clouds")]
    SizeLimit { size: usize, limit: usize },

    #[error("point of norm {norm} lies outside the open ball of radius {radius}")]
    Domain { norm: f64, radius: f64 },

    #[error("quadrature did not converge after {nodes} nodes (last delta {delta:e})")]
    Convergence { nodes: usize, delta: f64 },

    #[error("images are linearly dependent (numerical rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("interpolation is ill-conditioned (condition {condition:e}, residual {residual:e})")]
    IllConditioned { condition: f64, residual: f64 },

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("family is linearly dependent; certificate {certificate}")]
    DependentFamily { certificate: String },

    #[error("{what} = {value} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("lower bound {lower} exceeds upper bound {upper} at n = {n}")]
    BoundsInverted { n: usize, lower: f64, upper: f64 },

    #[error("sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("net has no centers")]
    EmptyNet,
}
