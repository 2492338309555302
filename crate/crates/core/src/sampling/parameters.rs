use rand::seq::index;
use rand::Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::seed::Seed;
use crate::cell::{dyad_count, Cell};
use crate::error::{Error, Result};
use crate::hierarchy::{FlatModel, ParameterGroups, SymMatrix};

/// Draws are clipped into `[DRAW_MIN, DRAW_MAX]`.
pub const DRAW_MIN: f64 = 0.01;
pub const DRAW_MAX: f64 = 0.99;
/// Perturbed effective probabilities are clipped into `[EFFECTIVE_MIN, EFFECTIVE_MAX]`.
pub const EFFECTIVE_MIN: f64 = 0.001;
pub const EFFECTIVE_MAX: f64 = 0.999;

/// Beta(a, b) prior for group probabilities (the two-category Dirichlet).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl BetaPrior {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Beta shapes must be positive and finite (a = {a}, b = {b})"
            )));
        }
        Ok(BetaPrior { a, b })
    }

    fn distribution(self) -> Result<Beta<f64>> {
        Beta::new(self.a, self.b)
            .map_err(|e| Error::InvalidArgument(format!("Beta({}, {}): {e}", self.a, self.b)))
    }

    fn draw(dist: &Beta<f64>, rng: &mut impl Rng) -> f64 {
        dist.sample(rng).clamp(DRAW_MIN, DRAW_MAX)
    }
}

impl Default for BetaPrior {
    fn default() -> Self {
        BetaPrior { a: 1.0, b: 1.0 }
    }
}

/// One clipped Beta draw per group, broadcast to the group's cells.
pub fn draw_model_parameters(groups: &ParameterGroups, prior: BetaPrior, seed: Seed) -> Result<FlatModel> {
    let prior = BetaPrior::new(prior.a, prior.b)?;
    let dist = prior.distribution()?;
    let mut rng = seed.derive("parameters", 0).rng();
    let per_group: Vec<f64> = (0..groups.len()).map(|_| BetaPrior::draw(&dist, &mut rng)).collect();
    let values = groups.cell_groups().iter().map(|&g| per_group[g]).collect();
    FlatModel::new(
        SymMatrix::from_upper(groups.k_star(), values)?,
        groups.block_sizes().to_vec(),
    )
}

/// A model with some tied cells redrawn, plus the redrawn cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptedModel {
    pub model: FlatModel,
    pub cells: Vec<Cell>,
}

/// Redraws `count` cells, chosen uniformly without replacement among the
/// cells of groups with at least two members, from the same clipped prior.
pub fn corrupt_parameters(
    model: &FlatModel,
    groups: &ParameterGroups,
    count: usize,
    prior: BetaPrior,
    seed: Seed,
) -> Result<CorruptedModel> {
    check_same_shape(model, groups)?;
    let eligible = groups.tied_cells();
    if count > eligible.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot corrupt {count} cells: only {} cells belong to tied groups",
            eligible.len()
        )));
    }
    if count == 0 {
        return Ok(CorruptedModel {
            model: model.clone(),
            cells: Vec::new(),
        });
    }
    let dist = BetaPrior::new(prior.a, prior.b)?.distribution()?;
    let mut rng = seed.derive("corruption", 0).rng();
    let mut chosen: Vec<Cell> = index::sample(&mut rng, eligible.len(), count)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    chosen.sort();
    let k = model.k_star();
    let mut values = model.cell_probabilities().to_vec();
    for c in &chosen {
        values[c.index(k)] = BetaPrior::draw(&dist, &mut rng);
    }
    Ok(CorruptedModel {
        model: model.with_cell_probabilities(values),
        cells: chosen,
    })
}

fn check_same_shape(model: &FlatModel, groups: &ParameterGroups) -> Result<()> {
    if model.k_star() != groups.k_star() {
        return Err(Error::Dimension(format!(
            "model has {} blocks, groups cover {}",
            model.k_star(),
            groups.k_star()
        )));
    }
    Ok(())
}

/// Whether deviations are shared by the whole population or drawn per graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    #[default]
    Population,
    PerIndividual,
}

impl std::str::FromStr for PerturbationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(PerturbationMode::Population),
            "per-individual" | "per_individual" | "individual" => Ok(PerturbationMode::PerIndividual),
            other => Err(Error::InvalidArgument(format!("unknown perturbation mode {other:?}"))),
        }
    }
}

/// A base model with normally distributed per-cell deviations.
///
/// The stored deviation of a cell is the effective probability minus the base,
/// where the effective probability is `base + N(0, (relative_sd * base)^2)`
/// clipped into `[EFFECTIVE_MIN, EFFECTIVE_MAX]`. Cells whose drawn deviation
/// is exactly zero keep their base value unclipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedModel {
    base: FlatModel,
    relative_sd: f64,
    mode: PerturbationMode,
    seed: Seed,
    deviations: Vec<f64>,
}

pub fn perturb_parameters(
    model: &FlatModel,
    relative_sd: f64,
    mode: PerturbationMode,
    seed: Seed,
) -> Result<PerturbedModel> {
    if !(relative_sd >= 0.0) || !relative_sd.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "relative_sd must be finite and >= 0, got {relative_sd}"
        )));
    }
    let mut out = PerturbedModel {
        base: model.clone(),
        relative_sd,
        mode,
        seed,
        deviations: Vec::new(),
    };
    out.deviations = out.draw_deviations(seed.derive("perturbation", 0));
    Ok(out)
}

impl PerturbedModel {
    fn draw_deviations(&self, seed: Seed) -> Vec<f64> {
        let base = self.base.cell_probabilities();
        if self.relative_sd == 0.0 {
            return vec![0.0; base.len()];
        }
        let mut rng = seed.rng();
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        base.iter()
            .map(|&p| {
                let s = unit.sample(&mut rng) * self.relative_sd * p;
                if s == 0.0 {
                    0.0
                } else {
                    (p + s).clamp(EFFECTIVE_MIN, EFFECTIVE_MAX) - p
                }
            })
            .collect()
    }

    pub fn base(&self) -> &FlatModel {
        &self.base
    }

    pub fn mode(&self) -> PerturbationMode {
        self.mode
    }

    pub fn relative_sd(&self) -> f64 {
        self.relative_sd
    }

    /// Population deviations in cell index order. In per-individual mode
    /// these are the deviations of graph 0.
    pub fn deviations(&self) -> &[f64] {
        &self.deviations
    }

    /// Deviations applying to graph `graph_index` of a population.
    pub fn deviations_for(&self, graph_index: usize) -> Vec<f64> {
        match self.mode {
            PerturbationMode::Population => self.deviations.clone(),
            PerturbationMode::PerIndividual if graph_index == 0 => self.deviations.clone(),
            PerturbationMode::PerIndividual => {
                self.draw_deviations(self.seed.derive("perturbation", graph_index as u64))
            }
        }
    }

    /// The flat model that generates graph `graph_index`.
    pub fn realize(&self, graph_index: usize) -> FlatModel {
        let values = self
            .base
            .cell_probabilities()
            .iter()
            .zip(self.deviations_for(graph_index))
            .map(|(p, s)| p + s)
            .collect();
        self.base.with_cell_probabilities(values)
    }
}

/// Value of the hierarchy signal-to-noise ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalToNoise {
    Finite(f64),
    Infinite,
}

impl SignalToNoise {
    pub fn inverse(self) -> f64 {
        match self {
            SignalToNoise::Finite(v) => 1.0 / v,
            SignalToNoise::Infinite => 0.0,
        }
    }
}

/// `max_γ μ_γ / Σ_{cells of γ} n_cell (p_cell − μ_γ)²`, where `μ_γ` is the
/// dyad-weighted mean cell probability of `γ`.
///
/// Only groups with at least two cells take part, since a singleton has no
/// deviation from its own mean. A zero denominator gives `Infinite`.
pub fn signal_to_noise(model: &FlatModel, groups: &ParameterGroups) -> Result<SignalToNoise> {
    check_same_shape(model, groups)?;
    let sizes = model.block_sizes();
    let mut best: Option<f64> = None;
    for g in groups.groups().iter().filter(|g| g.is_testable()) {
        let weights: Vec<f64> = g.cells.iter().map(|&c| dyad_count(c, sizes) as f64).collect();
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            continue;
        }
        let mean = g
            .cells
            .iter()
            .zip(&weights)
            .map(|(&c, w)| w * model.probability(c))
            .sum::<f64>()
            / total;
        let spread: f64 = g
            .cells
            .iter()
            .zip(&weights)
            .map(|(&c, w)| w * (model.probability(c) - mean).powi(2))
            .sum();
        if spread == 0.0 {
            return Ok(SignalToNoise::Infinite);
        }
        let ratio = mean / spread;
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    Ok(best.map_or(SignalToNoise::Infinite, SignalToNoise::Finite))
}
