//! First-order methods for monotone variational inequalities and strongly
//! convex-concave saddle point problems.
//!
//! Three solver families share one proximal toolbox:
//!
//! * [`md::md_solve`] — fixed-step mirror descent for operators that are
//!   relatively bounded and sigma-monotone, with the `(eps + sigma)`
//!   restricted-gap guarantee.
//! * [`ump::ump_solve`] / [`ump::restarted_ump`] — universal mirror prox
//!   with a doubling line search and an inexactness-aware acceptance test,
//!   plus the restart scheme that turns strong monotonicity into linear
//!   convergence.
//! * [`accel::fgm_solve`] — an accelerated method for strongly
//!   convex-concave saddle problems with Holder-continuous partial
//!   gradients, built on a two-sided inexact quadratic model of the inner
//!   maximum.
//!
//! [`gap`] provides the certificates that define an epsilon-solution, and
//! [`bench`] hosts a reproducible constrained covering-ball benchmark.

pub mod accel;
pub mod bench;
pub mod error;
pub mod gap;
pub mod linalg;
pub mod md;
pub mod operator;
pub mod prox;
pub mod report;
pub mod saddle;
pub mod set;
pub mod ump;

pub use error::{Error, Result};
pub use gap::{saddle_gap, vi_gap, GapCertificate};
pub use operator::VIOperator;
pub use prox::{mirror_step, ProxSetup};
pub use report::SolveReport;
pub use saddle::{saddle_to_vi, SaddleProblem};
pub use set::FeasibleSet;
