//! Repeated-motif hierarchical stochastic blockmodels: sampling, likelihood
//! estimation, group-wise hypothesis tests and simulation sweeps.
//!
//! ```
//! use rmhsbm::estimation::{bic_delta, summarize};
//! use rmhsbm::hierarchy::{build_parameter_groups, presets};
//! use rmhsbm::sampling::{draw_model_parameters, sample_conditional_sbm, BetaPrior};
//! use rmhsbm::testing::run_tests;
//! use rmhsbm::{Membership, Method, Seed};
//!
//! let spec = presets::bnu1_desk(20);
//! let groups = build_parameter_groups(&spec);
//! let model = draw_model_parameters(&groups, BetaPrior::default(), Seed::new(1))?;
//! let tau = Membership::contiguous(spec.block_sizes());
//! let population = (0..10)
//!     .map(|i| summarize(&sample_conditional_sbm(&model, &tau, Seed::new(1).derive("graph", i))?))
//!     .collect::<Result<Vec<_>, _>>()?;
//! let report = run_tests(&population, &groups, Method::Anova, 0.05)?;
//! assert_eq!(report.groups.len(), groups.len());
//! let bic = bic_delta(&population[0], &groups)?;
//! assert!(bic.delta < 0.0);
//! # Ok::<(), rmhsbm::Error>(())
//! ```

pub mod cell;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod hierarchy;
pub mod io;
pub mod numeric;
pub mod sampling;
pub mod testing;

pub use cell::Cell;
pub use error::{Error, Result};
pub use estimation::{BicReport, BlockSummary, LlrReport};
pub use harness::{StudyConfig, StudyResult};
pub use hierarchy::{FlatModel, HierarchySpec, Membership, ParameterGroups};
pub use sampling::{GraphSample, PerturbationMode, Seed};
pub use testing::{Decision, Method, TestOutcome, TestReport};
