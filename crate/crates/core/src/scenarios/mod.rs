//! Runnable comparisons assembled from margins, dependence, transforms and
//! weight pairs.

mod catalog;
pub mod figures;
mod model;

pub(crate) use model::dot;

pub use catalog::{
    catalog, catalog_ids, entry, run_all, run_catalog, standard_pair, summary_table, two_sample_ks,
    write_summary, CatalogEntry, CatalogOutcome, Expectation, RunOptions, SubRun,
};
pub use model::{
    common_shock_margin, Dependence, PairedSampler, Pairing, ScenarioSpec, TriggerCoupling,
};
