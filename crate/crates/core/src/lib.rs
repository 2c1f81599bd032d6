//! Simulation and limit theory for multivariate Lévy processes whose clocks are
//! positive linear combinations of independent inverse stable subordinators.
//!
//! The crate is organised bottom-up:
//!
//! * [`mittag_leffler`] evaluates `E_α(x)` on the whole real line, including a
//!   log-scale evaluator for the large-argument regime.
//! * [`cumulants`] holds the light-tailed Lévy components and their cumulant
//!   generating functions.
//! * [`subordinators`] samples stable and inverse stable subordinators.
//! * [`processes`] samples the two time-changed constructions at a fixed time.
//! * [`rate_functions`] evaluates the limit cumulant functions, their numerical
//!   Legendre–Fenchel transforms and the closed-form moderate-deviation rates.
//! * [`weak_limits`] samples the weak limits and evaluates their MGFs.
//! * [`verification`] ties simulation and theory together with Monte Carlo
//!   diagnostics.
//! * `cli` (feature `cli`) holds config parsing and the subcommand driver.

pub mod cumulants;
mod error;
pub mod mc;
pub mod mittag_leffler;
pub mod processes;
pub mod rate_functions;
pub mod rng;
pub mod stats;
pub mod subordinators;
pub mod verification;
pub mod weak_limits;

#[cfg(feature = "cli")]
pub mod cli;

pub use cumulants::{CumulantModel, MeanVector};
pub use error::{Error, Result};
pub use mittag_leffler::MLOrder;
pub use processes::{Condition1Config, Condition2Config, Model};
pub use rng::RandomStream;
pub use subordinators::StableIndex;
