use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::seed::Seed;
use crate::cell::{cells, dyad_count, Cell};
use crate::error::{Error, Result};
use crate::estimation::BlockSummary;
use crate::hierarchy::{FlatModel, Membership};

/// A simple undirected graph with a block label on every vertex.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSample {
    membership: Membership,
    edges: Vec<(usize, usize)>,
}

impl GraphSample {
    /// Normalizes edge orientation and sorts; rejects self-loops, duplicates
    /// and endpoints without a membership entry.
    pub fn new(membership: Membership, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = membership.vertex_count();
        for e in edges.iter_mut() {
            let (u, v) = *e;
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u.max(v) >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has an endpoint without membership (n = {n})"
                )));
            }
            *e = (u.min(v), u.max(v));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(GraphSample { membership, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.membership.vertex_count()
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn check_membership(model: &FlatModel, tau: &Membership) -> Result<()> {
    if tau.k_star() > model.k_star() {
        return Err(Error::Dimension(format!(
            "membership uses {} blocks, model has {}",
            tau.k_star(),
            model.k_star()
        )));
    }
    if let Some(v) = tau.labels().iter().position(|&b| b >= model.k_star()) {
        return Err(Error::Dimension(format!(
            "vertex {v} is in block {}, model has {} blocks",
            tau.block(v),
            model.k_star()
        )));
    }
    Ok(())
}

/// Samples every dyad independently with its block pair's probability.
pub fn sample_conditional_sbm(model: &FlatModel, tau: &Membership, seed: Seed) -> Result<GraphSample> {
    check_membership(model, tau)?;
    let k = model.k_star();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &b) in tau.labels().iter().enumerate() {
        members[b].push(v);
    }
    let mut rng = seed.derive("graph", 0).rng();
    let mut edges = Vec::new();
    for cell in cells(k) {
        let p = model.probability(cell);
        let (a, b) = (&members[cell.row], &members[cell.col]);
        if cell.is_diagonal() {
            for (i, &u) in a.iter().enumerate() {
                for &v in &a[i + 1..] {
                    if rng.random::<f64>() < p {
                        edges.push((u.min(v), u.max(v)));
                    }
                }
            }
        } else {
            for &u in a {
                for &v in b {
                    if rng.random::<f64>() < p {
                        edges.push((u.min(v), u.max(v)));
                    }
                }
            }
        }
    }
    GraphSample::new(tau.clone(), edges)
}

/// Samples the block summary of a graph from `model` without building the
/// graph: each cell's edge count is Binomial(n_cell, p_cell), which is the
/// exact distribution of the summary of [`sample_conditional_sbm`].
pub fn sample_block_summary(model: &FlatModel, seed: Seed) -> Result<BlockSummary> {
    let k = model.k_star();
    let sizes = model.block_sizes();
    let mut rng = seed.derive("summary", 0).rng();
    let mut dyads = Vec::with_capacity(crate::cell::cell_count(k));
    let mut edges = Vec::with_capacity(dyads.capacity());
    for cell in cells(k) {
        let n = dyad_count(cell, sizes);
        let p = model.probability(cell);
        let e = Binomial::new(n, p)
            .map_err(|e| Error::Numeric(format!("binomial({n}, {p}): {e}")))?
            .sample(&mut rng);
        dyads.push(n);
        edges.push(e);
    }
    BlockSummary::new(k, sizes.iter().sum(), dyads, edges)
}

/// Block pair of an edge under a membership.
pub fn edge_cell(tau: &Membership, u: usize, v: usize) -> Cell {
    Cell::new(tau.block(u), tau.block(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::SymMatrix;

    fn constant(k: usize, size: usize, p: f64) -> (FlatModel, Membership) {
        let sizes = vec![size; k];
        (
            FlatModel::new(SymMatrix::filled(k, p), sizes.clone()).unwrap(),
            Membership::contiguous(&sizes),
        )
    }

    #[test]
    fn degenerate_probabilities() {
        let (m, tau) = constant(3, 4, 0.0);
        assert_eq!(sample_conditional_sbm(&m, &tau, Seed::new(1)).unwrap().edge_count(), 0);
        let (m, tau) = constant(3, 4, 1.0);
        let g = sample_conditional_sbm(&m, &tau, Seed::new(1)).unwrap();
        assert_eq!(g.edge_count(), 12 * 11 / 2);
    }

    #[test]
    fn edge_count_concentrates() {
        let (m, tau) = constant(1, 200, 0.3);
        let dyads = 200.0 * 199.0 / 2.0;
        let (mean, sd) = (0.3 * dyads, (dyads * 0.3 * 0.7f64).sqrt());
        let inside = (0..100)
            .filter(|&r| {
                let g = sample_conditional_sbm(&m, &tau, Seed::new(5).derive("rep", r)).unwrap();
                (g.edge_count() as f64 - mean).abs() <= 4.0 * sd
            })
            .count();
        assert!(inside >= 99, "{inside}");
    }

    #[test]
    fn graph_invariants_and_determinism() {
        let (m, tau) = constant(2, 15, 0.4);
        let g = sample_conditional_sbm(&m, &tau, Seed::new(9)).unwrap();
        assert!(g.edges().iter().all(|&(u, v)| u < v && v < 30));
        assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g, sample_conditional_sbm(&m, &tau, Seed::new(9)).unwrap());
        assert_ne!(g, sample_conditional_sbm(&m, &tau, Seed::new(10)).unwrap());
    }

    #[test]
    fn membership_outside_model_rejected() {
        let (m, _) = constant(2, 3, 0.5);
        let tau = Membership::new(vec![0, 1, 2], 3).unwrap();
        assert!(matches!(sample_conditional_sbm(&m, &tau, Seed::new(1)), Err(Error::Dimension(_))));
    }

    #[test]
    fn graph_sample_validation() {
        let tau = Membership::contiguous(&[2, 2]);
        assert!(GraphSample::new(tau.clone(), vec![(1, 1)]).is_err());
        assert!(GraphSample::new(tau.clone(), vec![(0, 4)]).is_err());
        assert!(GraphSample::new(tau.clone(), vec![(0, 1), (1, 0)]).is_err());
        let g = GraphSample::new(tau, vec![(3, 0), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn summary_sampler_respects_bounds() {
        let (m, _) = constant(3, 10, 0.25);
        let s = sample_block_summary(&m, Seed::new(3)).unwrap();
        assert_eq!(s.total_dyads(), 30 * 29 / 2);
        let (m1, _) = constant(3, 10, 1.0);
        let full = sample_block_summary(&m1, Seed::new(3)).unwrap();
        assert_eq!(full.edges(), full.dyads());
    }
}
