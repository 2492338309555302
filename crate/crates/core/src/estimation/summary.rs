use serde::{Deserialize, Serialize};

use crate::cell::{cell_count, cells, dyad_count, Cell};
use crate::error::{Error, Result};
use crate::sampling::GraphSample;

/// Dyad and edge counts per cell, in cell index order.
///
/// A summary of one graph has `graph_count == 1` and `Σ dyads = C(n, 2)`.
/// Aggregated summaries add counts cell-wise, and `vertex_count` and
/// `graph_count` become population totals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    k_star: usize,
    vertex_count: usize,
    graph_count: usize,
    dyads: Vec<u64>,
    edges: Vec<u64>,
}

impl BlockSummary {
    /// A single-graph summary from raw counts.
    pub fn new(k_star: usize, vertex_count: usize, dyads: Vec<u64>, edges: Vec<u64>) -> Result<Self> {
        let want = cell_count(k_star);
        if dyads.len() != want || edges.len() != want {
            return Err(Error::Dimension(format!(
                "{} dyad and {} edge counts for {want} cells",
                dyads.len(),
                edges.len()
            )));
        }
        if let Some(i) = (0..want).find(|&i| edges[i] > dyads[i]) {
            let c = Cell::from_index(i, k_star);
            return Err(Error::InvalidArgument(format!(
                "cell {{{}, {}}} has {} edges but {} dyads",
                c.row, c.col, edges[i], dyads[i]
            )));
        }
        let n = vertex_count as u64;
        let total: u64 = dyads.iter().sum();
        if total != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "{total} dyads in total, but {vertex_count} vertices have {}",
                n * n.saturating_sub(1) / 2
            )));
        }
        Ok(BlockSummary {
            k_star,
            vertex_count,
            graph_count: 1,
            dyads,
            edges,
        })
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn graph_count(&self) -> usize {
        self.graph_count
    }

    pub fn dyads(&self) -> &[u64] {
        &self.dyads
    }

    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn dyads_of(&self, cell: Cell) -> u64 {
        self.dyads[cell.index(self.k_star)]
    }

    pub fn edges_of(&self, cell: Cell) -> u64 {
        self.edges[cell.index(self.k_star)]
    }

    pub fn total_dyads(&self) -> u64 {
        self.dyads.iter().sum()
    }

    pub fn total_edges(&self) -> u64 {
        self.edges.iter().sum()
    }

    /// Cell-wise sum with another summary over the same blocks.
    pub fn merge(&self, other: &BlockSummary) -> Result<BlockSummary> {
        if self.k_star != other.k_star {
            return Err(Error::Dimension(format!(
                "cannot merge summaries over {} and {} blocks",
                self.k_star, other.k_star
            )));
        }
        Ok(BlockSummary {
            k_star: self.k_star,
            vertex_count: self.vertex_count + other.vertex_count,
            graph_count: self.graph_count + other.graph_count,
            dyads: self.dyads.iter().zip(&other.dyads).map(|(a, b)| a + b).collect(),
            edges: self.edges.iter().zip(&other.edges).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Exact per-cell dyad and edge counts of a graph.
pub fn summarize(graph: &GraphSample) -> Result<BlockSummary> {
    let tau = graph.membership();
    let k = tau.k_star();
    let sizes = tau.block_sizes();
    let dyads: Vec<u64> = cells(k).map(|c| dyad_count(c, &sizes)).collect();
    let mut edges = vec![0u64; dyads.len()];
    for &(u, v) in graph.edges() {
        if u.max(v) >= tau.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) has an endpoint without membership"
            )));
        }
        edges[Cell::new(tau.block(u), tau.block(v)).index(k)] += 1;
    }
    BlockSummary::new(k, graph.vertex_count(), dyads, edges)
}

/// Cell-wise sums over a population.
pub fn aggregate_summaries(summaries: &[BlockSummary]) -> Result<BlockSummary> {
    let (first, rest) = summaries
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("no summaries to aggregate".into()))?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.merge(s))
}
