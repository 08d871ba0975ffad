//! greenfix solves truncated infinite systems of second-order boundary
//! value problems v'' + v = f(t, v), v(0) = v(T) = 0 by fixed-point
//! iteration on the equivalent Green's-function integral equations in lp,
//! and checks the existence hypotheses (envelope constants, contraction
//! conditions, invariant-ball radius) and solution properties (residuals,
//! ball invariance, tail contraction) that justify the answer.
//!
//! Pipeline: pick a system (`system`), form the kernel (`kernel`),
//! evaluate the existence constants (`hypothesis`), iterate the integral
//! operator (`solver`), then audit the result (`verifier`). `config`
//! and the `greenfix` binary wire these together behind a JSON config.

pub mod config;
pub mod error;
pub mod hypothesis;
pub mod kernel;
pub mod quadrature;
pub mod seqspace;
pub mod solver;
pub mod state_csv;
pub mod system;
pub mod verifier;

pub use config::Config;
pub use error::{Error, Result};
pub use hypothesis::{HypothesisReport, Verdict};
pub use kernel::{GreenKernel, Side};
pub use quadrature::QuadratureRule;
pub use seqspace::{LpParams, TailProfile, TruncatedState, TruncatedVec};
pub use solver::{apply_operator, solve, OperatorTable, SolveResult, SolverConfig};
pub use system::{eval_f, System};
