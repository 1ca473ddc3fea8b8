pub mod chromatic;
pub mod coupling;
pub mod error;
pub mod expectation;
pub mod family;
pub mod format;
pub mod generators;
pub mod lift;
pub mod measures;
pub mod numeric;
pub mod rng;
pub mod simplex;
pub mod spread;
pub mod thresholds;
