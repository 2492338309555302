//! Wilks, ANOVA and Friedman tests per parameter group with Benjamini–Hochberg control.

mod band;
mod bh;
mod local;
mod report;
mod types;

pub use band::{epsilon_s, llr_band, LlrBand};
pub use bh::{bh_correct, bh_line};
pub use local::{anova_local, friedman_local, wilks_global, wilks_local, GlobalTest, PopulationEstimates};
pub use report::{
    aggregated_test, individual_rejection_rates, matrix_to_csv, parse_matrix_csv, run_tests,
    TestReport, RATE_THRESHOLD,
};
pub use types::{Decision, Method, ProfilePoint, TestOutcome};
