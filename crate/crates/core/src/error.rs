use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("ball has more than {cap} vertices")]
    BallTooLarge { cap: usize },
    #[error("infeasible graph parameters: {0}")]
    Infeasible(String),
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },
    #[error("state space 2^{n} exceeds the exact-solver cap 2^{cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("iterative solve did not converge within {sweeps} sweeps")]
    NotConverged { sweeps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
