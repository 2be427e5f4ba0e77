use thiserror::Error;

/// Errors surfaced by geometry primitives and solver loops.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// The requested (prox setup, feasible set) combination is not supported.
    #[error("unsupported capability: {0}")]
    Capability(String),

    /// An inner numerical routine failed to reach its tolerance.
    #[error("numerical failure in {what}: residual {residual:e}")]
    Numerical { what: String, residual: f64 },

    /// A solver produced or consumed a non-finite value.
    #[error("non-finite value at iteration {iteration}: {what}")]
    NonFinite { iteration: usize, what: String },

    /// The doubling line search exceeded its trial cap.
    #[error(
        "line search exceeded {max_doublings} doublings at iteration {iteration} (last M = {last_m:e})"
    )]
    LineSearchDiverged {
        iteration: usize,
        max_doublings: u32,
        last_m: f64,
    },

    /// An inner solve ran out of budget before its certificate held.
    #[error("uncertified result: {what} (best bound {best_bound:e} after {iterations} iterations)")]
    Uncertified {
        what: String,
        best_bound: f64,
        iterations: usize,
    },

    /// Tolerance planning could not produce a consistent parameter set.
    #[error("tolerance planning failed: {0}")]
    Planning(String),

    /// A runtime audit contradicted the declared problem constants.
    #[error("declared constants violated: {0}")]
    ConstantsMisdeclared(String),
}

pub type Result<T> = std::result::Result<T, Error>;
