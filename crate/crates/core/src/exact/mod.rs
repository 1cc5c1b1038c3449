//! Exact and semi-analytic oracles.

pub mod quadrature;
mod stp;
mod two_point;
mod two_term;

pub use stp::{
    format_decimal, format_fraction, parse_rational, stp_dominance_pair, stp_sum_cdf_exact,
    stp_sum_cdf_with_budget, stp_sum_pmf, DyadicPmf, StpComparison, DEFAULT_NODE_BUDGET,
};
pub use two_point::{
    two_point_eu_enumerate, two_point_eu_exact, weights_to_rational, TabulatedUtility,
    MAX_TWO_POINT_DIM,
};
pub use two_term::{h_function, two_term_cdf, TwoTermIntegrand, QUAD_TOL};
