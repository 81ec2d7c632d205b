//! Generic derivative-free optimizers used by the coverage and minimax code.

mod brent;
mod pattern;

pub use brent::{brent_minimize, Minimum1d};
pub use pattern::{pattern_search_max, PatternOptions, PatternOutcome};
