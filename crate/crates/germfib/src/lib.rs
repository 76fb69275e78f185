//! Analysis of real polynomial map germs `G: (R^m, 0) -> (R^p, 0)`:
//! singular and Milnor sets as determinantal systems, numerical
//! certification of fibration conditions, weighted-homogeneity detection,
//! and blow-away flow integration from the tube to the sphere.

pub mod analysis;
pub mod catalog;
pub mod conditions;
pub mod config;
pub mod export;
pub mod flow;
pub mod germ;
pub mod homogeneity;
pub mod mixed;
pub mod newton;
pub mod parse;
pub mod poly;
pub mod report;
pub mod variety;
pub mod witness;

pub use analysis::{analyze, AnalysisBundle, AnalysisError};
pub use config::Config;
pub use germ::{GermError, MapGerm};
pub use mixed::MixedFunction;
pub use poly::{Polynomial, PolyVector};
pub use report::{ConditionId, ConditionReport, Verdict};
pub use variety::DeterminantalSystem;
pub use witness::WitnessSet;
