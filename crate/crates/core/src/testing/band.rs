use serde::{Deserialize, Serialize};

use crate::cell::dyad_count;
use crate::error::{Error, Result};
use crate::hierarchy::{FlatModel, ParameterGroups};

/// High-probability range of a group's likelihood-ratio statistic under fixed deviations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlrBand {
    pub lower: f64,
    pub upper: f64,
    pub epsilon_s: f64,
    pub delta: f64,
    pub n_gamma: u64,
    /// Lower bound on the probability of landing inside the band; may be negative
    /// (vacuous) for small groups.
    pub probability_bound: f64,
}

impl LlrBand {
    pub fn contains(&self, statistic: f64) -> bool {
        self.lower <= statistic && statistic <= self.upper
    }
}

/// `min over testable groups and their cells of |s_cell − mean of s over the group|`.
pub fn epsilon_s(deviations: &[f64], groups: &ParameterGroups) -> f64 {
    let k = groups.k_star();
    groups
        .groups()
        .iter()
        .filter(|g| g.is_testable())
        .flat_map(|g| {
            let s: Vec<f64> = g.cells.iter().map(|c| deviations[c.index(k)]).collect();
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            s.into_iter().map(move |v| (v - mean).abs())
        })
        .fold(f64::INFINITY, f64::min)
}

/// Band `[ε_S² n_γ / 9, 8 n_γ / δ]` for group `group_id`.
///
/// `base` holds the tied probabilities and `deviations` the fixed per-cell
/// offsets. `δ = min(q, 1 − q)` where `q` is the expected pooled estimate of
/// the group under the perturbed model.
pub fn llr_band(base: &FlatModel, deviations: &[f64], groups: &ParameterGroups, group_id: usize) -> Result<LlrBand> {
    if deviations.len() != base.cell_probabilities().len() || base.k_star() != groups.k_star() {
        return Err(Error::Dimension("deviations, model and groups disagree in size".into()));
    }
    let group = groups.group(group_id);
    let sizes = base.block_sizes();
    let k = base.k_star();
    let n: Vec<u64> = group.cells.iter().map(|&c| dyad_count(c, sizes)).collect();
    let n_gamma: u64 = n.iter().sum();
    if n_gamma == 0 {
        return Err(Error::Domain(format!("group {group_id} has no dyads")));
    }
    let q = group
        .cells
        .iter()
        .zip(&n)
        .map(|(&c, &w)| w as f64 * (base.probability(c) + deviations[c.index(k)]))
        .sum::<f64>()
        / n_gamma as f64;
    let delta = q.min(1.0 - q);
    let epsilon = epsilon_s(deviations, groups);
    let t = (epsilon / 3.0).min(delta / 2.0);
    let tail = |m: u64| (-2.0 * t * t * m as f64).exp();
    let probability_bound = 1.0 - 2.0 * tail(n_gamma) - 2.0 * n.iter().map(|&m| tail(m)).sum::<f64>();
    let ng = n_gamma as f64;
    Ok(LlrBand {
        lower: epsilon * epsilon * ng / 9.0,
        upper: 8.0 * ng / delta,
        epsilon_s: epsilon,
        delta,
        n_gamma,
        probability_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::Cell;
    use crate::hierarchy::SymMatrix;
    use approx::assert_relative_eq;

    #[test]
    fn band_for_two_cells() {
        let groups = ParameterGroups::from_cells(
            vec![10, 10],
            vec![vec![Cell::new(0, 0), Cell::new(1, 1)], vec![Cell::new(0, 1)]],
        )
        .unwrap();
        let base = FlatModel::new(SymMatrix::filled(2, 0.3), vec![10, 10]).unwrap();
        let dev = vec![0.02, 0.0, -0.02];
        assert_relative_eq!(epsilon_s(&dev, &groups), 0.02);
        let b = llr_band(&base, &dev, &groups, 0).unwrap();
        assert_eq!(b.n_gamma, 90);
        assert_relative_eq!(b.delta, 0.3, max_relative = 1e-12);
        assert_relative_eq!(b.lower, 0.0004 * 90.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(b.upper, 8.0 * 90.0 / 0.3, max_relative = 1e-12);
        assert!(b.probability_bound < 0.0);
        assert!(b.contains(1.0) && !b.contains(0.0));
    }
}
