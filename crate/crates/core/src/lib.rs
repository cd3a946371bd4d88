//! Blockage analytics for mmWave links with mobile, static and self blockers.

pub mod error;
pub mod hex;
pub mod los;
pub mod nlos;
pub mod output;
pub mod params;
pub mod planner;
pub mod quad;
pub mod sim;

pub use error::{Error, Result};
pub use los::{BlockageProb, Conditional, LosReport};
pub use nlos::NlosReport;
pub use params::{derive, Config, DerivedConstants, ParamKey, SystemParams};
