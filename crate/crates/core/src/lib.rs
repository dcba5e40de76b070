//! Structural model of bundled insurance deductible choice with two risk
//! preference types (CARA expected utility and Prelec probability
//! distortion) and alternative-specific random consideration.
//!
//! The crate covers certainty equivalents and cutoffs, exact choice
//! probabilities, simulation, maximum likelihood estimation, welfare
//! counterfactuals, identification diagnostics, and file formats.

pub mod beta;
pub mod choice;
pub mod consideration;
pub mod cutoffs;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod household;
pub mod io;
pub mod menu;
pub mod oracle;
pub mod partition;
pub mod preferences;
pub mod quadrature;
mod roots;
pub mod simulation;
pub mod welfare;

pub use beta::{BetaShape, ScaledBeta};
pub use choice::{choice_prob, choice_probs, ModelParams, PreferenceParams};
pub use consideration::{BundleSet, ConsiderationParams, MicBranch};
pub use error::{Error, Result};
pub use household::Household;
pub use menu::{Bundle, Context, ContextMenu, HouseholdMenu, MenuConfig};
pub use preferences::{Lottery, PreferenceType};
pub use quadrature::{Integration, QuadratureRule};
