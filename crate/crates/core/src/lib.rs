//! Design, simulation and calibration models for reflection-type
//! kinetic-inductance parametric amplifiers.

pub mod error;
pub mod lsq;
pub mod material;
pub mod netcore;
pub mod noise;
pub mod presets;
pub mod pump;
pub mod registry;
pub mod search;
pub mod simulator;
pub mod synthesis;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
