//! End-to-end simulation sweeps and their CSV outputs.

mod config;
mod figures;
mod study;

pub use config::{PerturbationSetting, Sampler, StudyConfig};
pub use figures::{
    emit_figures, p_profile_csv, parse_rejection_matrix_csv, rejection_curve_csv, rejection_matrix_csv,
    ParsedMatrix, CURVE_HEADER, MATRIX_HEADER, PROFILE_HEADER,
};
pub use study::{run_study, MethodSummary, StudyResult, SweepPoint};
