//! Exact coverage probabilities for scale-sign invariant confidence
//! intervals `[c1 X, c2 X]` for a normal mean from a single observation,
//! minimax two-point mixture rules of fixed expected length, seeded Monte
//! Carlo verification, and the norm-bounded multivariate confidence set.
//!
//! Modules:
//!
//! - [`special`]: normal and chi-square distribution functions.
//! - [`rules`]: interval rules, mixtures, coverage and its infimum over the
//!   standardized mean `lambda = mu / sigma`.
//! - [`minimax`]: grid search plus pattern-search refinement of the
//!   max-min coverage problem.
//! - [`mc`]: reproducible Monte Carlo estimates on split ChaCha streams.
//! - [`multivariate`]: the constant `c(p, alpha)` and miss probabilities for
//!   `{ ||mu|| <= c ||X|| }`.
//! - [`report`]: CSV and JSON rendering used by the command-line tool.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mc;
pub mod minimax;
pub mod multivariate;
pub mod optim;
pub mod report;
pub mod rules;
pub mod special;

pub use error::{Error, Result};
pub use mc::{SimConfig, SimEstimate};
pub use minimax::{CandidateParams, CaseId, OptimResult};
pub use multivariate::MvBoundReport;
pub use rules::{IntervalRule, LambdaMin, LambdaStar, MixtureRule};
pub use special::Probability;
