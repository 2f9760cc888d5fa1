use thiserror::Error;

/// Errors produced by the solvers and model constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor argument violated a type invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// The target SIR cannot be reached for any power: gamma >= 1/nu.
    #[error("group {group}: target SIR {gamma} is unreachable (requires gamma < 1/nu = {limit})")]
    InfeasibleTargetSir {
        group: usize,
        gamma: f64,
        limit: f64,
    },

    /// Path-loss gain must be strictly positive to invert the link budget.
    #[error("path-loss gain must be positive, got {0}")]
    NonPositivePathLoss(f64),

    /// An iterative scheme ran out of iterations. `estimate` is the best
    /// value available at termination.
    #[error("no convergence after {iterations} iterations (residual {residual:e}, best estimate {estimate})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        estimate: f64,
    },

    /// The system admits no positive power solution.
    #[error("infeasible system: {reason}")]
    InfeasibleSystem { reason: String },

    /// The coupling matrix is too close to the feasibility boundary for a
    /// reliable linear solve.
    #[error("near-singular system: spectral radius {rho} is within {margin} of 1")]
    SingularSystem { rho: f64, margin: f64 },

    /// The recursive solver detected infeasibility (nonpositive margin or
    /// first-group denominator).
    #[error("recursive solve infeasible: {reason} (denominator {denominator})")]
    RecursionInfeasible { denominator: f64, reason: String },

    /// A group saturates its own dimension budget: alpha * lambda >= 1.
    #[error("group {group} is degenerate: alpha * lambda = {load} >= 1")]
    DegenerateGroup { group: usize, load: f64 },

    /// More groups than the solver supports.
    #[error("{count} groups exceeds the supported maximum of {max}")]
    TooManyGroups { count: usize, max: usize },

    /// No detection order yields a feasible power allocation.
    #[error("no detection order is feasible")]
    AllInfeasible,

    /// A detection order was not a permutation of the class labels.
    #[error("order {order:?} is not a permutation of 0..{expected}")]
    InvalidOrder { order: Vec<usize>, expected: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
