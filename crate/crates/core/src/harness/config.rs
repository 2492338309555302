use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{presets, HierarchySpec};
use crate::sampling::{BetaPrior, PerturbationMode};
use crate::testing::Method;

/// How graph summaries are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Sample every dyad, then count.
    #[default]
    Dyad,
    /// Draw each cell's edge count from its binomial directly.
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSetting {
    pub relative_sd: f64,
    #[serde(default)]
    pub mode: PerturbationMode,
}

impl PerturbationSetting {
    pub const NONE: PerturbationSetting = PerturbationSetting {
        relative_sd: 0.0,
        mode: PerturbationMode::Population,
    };
}

/// A simulation sweep over corruption counts and perturbation settings.
///
/// The hierarchy comes from `spec_path` (resolved against the config file's
/// directory) or, when absent, from the named `preset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
    #[serde(default = "default_preset")]
    pub preset: String,
    /// Overrides every block size of the spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    /// Per-block sizes; takes precedence over `block_size`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sizes: Option<Vec<usize>>,
    #[serde(default = "default_n_params")]
    pub n_params: usize,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_corruption_counts")]
    pub corruption_counts: Vec<usize>,
    #[serde(default = "default_perturbations")]
    pub perturbations: Vec<PerturbationSetting>,
    /// Graphs per population, S.
    #[serde(default = "default_graphs")]
    pub graphs_per_population: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub prior: BetaPrior,
    #[serde(default)]
    pub sampler: Sampler,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

fn default_preset() -> String {
    "bnu1-desk".into()
}
fn default_n_params() -> usize {
    20
}
fn default_n_reps() -> usize {
    10
}
fn default_corruption_counts() -> Vec<usize> {
    vec![0]
}
fn default_perturbations() -> Vec<PerturbationSetting> {
    vec![
        PerturbationSetting::NONE,
        PerturbationSetting {
            relative_sd: 0.01,
            mode: PerturbationMode::Population,
        },
    ]
}
fn default_graphs() -> usize {
    10
}
fn default_alpha() -> f64 {
    0.05
}
fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

impl Default for StudyConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl StudyConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: StudyConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file, resolving `spec_path` relative to it.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: StudyConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if let (Some(spec), Some(dir)) = (&config.spec_path, path.parent()) {
            if spec.is_relative() {
                config.spec_path = Some(dir.join(spec));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.graphs_per_population == 0 {
            return Err(Error::InvalidArgument("graphs_per_population must be at least 1".into()));
        }
        if self.block_size == Some(0) {
            return Err(Error::InvalidArgument("block_size must be at least 1".into()));
        }
        for p in &self.perturbations {
            if !(p.relative_sd >= 0.0 && p.relative_sd.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "relative_sd must be finite and >= 0, got {}",
                    p.relative_sd
                )));
            }
        }
        BetaPrior::new(self.prior.a, self.prior.b)?;
        Ok(())
    }

    /// The hierarchy the study runs on, with any block size override applied.
    pub fn hierarchy(&self) -> Result<HierarchySpec> {
        let spec = match &self.spec_path {
            Some(p) => HierarchySpec::from_path(p)?,
            None => presets::by_name(&self.preset, 20).ok_or_else(|| {
                Error::InvalidArgument(format!("unknown preset {:?}", self.preset))
            })?,
        };
        match (&self.block_sizes, self.block_size) {
            (Some(sizes), _) => spec.with_block_sizes(sizes.clone()),
            (None, Some(size)) => spec.with_uniform_block_size(size),
            (None, None) => Ok(spec),
        }
    }
}
