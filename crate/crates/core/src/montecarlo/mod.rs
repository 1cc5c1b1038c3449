//! Sampling engine, empirical distributions and dominance tests.

mod bootstrap;
pub mod document;
mod dominance;
mod empirical;
pub mod engine;

pub use bootstrap::{paired_bootstrap_gaps, GapBand};
pub use document::{write_verdict_csv, ResultDocument};
pub use dominance::{
    crossing_detect, empirical_fsd_test, empirical_ssd_test, Crossing, DominanceVerdict, GridSpec,
    read_at, Order, Relation, TIE_RTOL,
};
pub use empirical::{dkw_epsilon, quantile_curve, EmpiricalDistribution, MAX_SAMPLES};
pub use engine::StreamKey;
