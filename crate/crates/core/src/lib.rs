//! Online matching algorithms of the Ranking family, exact offline
//! oracles, per-run structural checks, and seeded Monte Carlo
//! concentration experiments.
//!
//! The crate splits along the randomness boundary: [`engines`] are pure
//! functions of an instance and a rank vector, [`seeding`] owns every
//! random draw, and [`experiments`] farms seeded trials (in parallel with
//! the default `parallel` feature, sequentially without) into empirical
//! distributions that [`checks`] and the tail calculators judge against
//! their analytic guarantees.

pub mod checks;
pub mod engines;
pub mod error;
pub mod experiments;
pub mod format;
pub mod generators;
pub mod graph;
pub mod oracles;
pub mod seeding;
pub mod stats;

pub use engines::{Engine, RunRecord};
pub use error::{Error, Result};
pub use graph::{BipartiteInstance, FullyOnlineInstance, Instance, Matching, RankVector};
