use thiserror::Error;

/// Errors raised while building or evaluating decision problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad probability table: {0}")]
    BadProbability(String),

    #[error("bad loss table: {0}")]
    BadLoss(String),

    #[error("bad space: {0}")]
    BadSpace(String),

    #[error("mixing weight {0} is outside [0, 1]")]
    BadLambda(f64),

    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("joint distribution has zero mass at (x={x}, y={y}); full support is required")]
    ZeroSupport { x: usize, y: usize },

    #[error("dimension must be at least 1")]
    BadDim,

    #[error("trial count must be at least 1")]
    BadTrials,

    #[error("coupling fit did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("marginal has zero mass at index {index}")]
    ZeroMarginal { index: usize },

    #[error("bad agent subset: {0}")]
    BadSubset(String),

    #[error("agent {agent} out of range ({n} observable agents)")]
    BadAgent { agent: usize, n: usize },

    #[error("problem needs {cells} cells, above the cap of {cap}")]
    CapExceeded { cells: u128, cap: usize },

    #[error("observed event has zero probability")]
    ZeroProbabilityEvent,
}

pub type Result<T> = std::result::Result<T, Error>;
