pub mod cli;
pub mod distributions;
pub mod error;
pub mod exact;
pub mod majorization;
pub mod montecarlo;
pub mod portfolio;
pub mod scenarios;

pub use error::{Error, Result};
