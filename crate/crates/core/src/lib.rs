//! Universal online regression with adversarial responses on metric value
//! spaces.
//!
//! The crate provides the learning rules (capped nearest-neighbour
//! representatives, cluster-wise exponentially weighted forecasters, anytime
//! model selection, mean estimation over a dense sequence), the adversarial
//! constructions that show where universal learning breaks down, finite-horizon
//! diagnostics for instance processes, and a seeded experiment harness.

pub mod adversaries;
pub mod c1nn;
pub mod cluster;
pub mod error;
pub mod ewa;
pub mod harness;
pub mod instance;
pub mod learner;
pub mod numeric;
pub mod processes;
pub mod seed;
pub mod selector;
pub mod spaces;

pub use error::{Error, Result};
pub use learner::OnlineLearner;
