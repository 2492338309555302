use serde::{Deserialize, Serialize};

use crate::cell::{cell_count, cells, Cell};
use crate::error::{Error, Result};

/// Symmetric matrix stored as its upper triangle (cell index order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl SymMatrix {
    pub fn filled(dim: usize, value: f64) -> Self {
        SymMatrix {
            dim,
            values: vec![value; cell_count(dim)],
        }
    }

    pub fn from_upper(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != cell_count(dim) {
            return Err(Error::Dimension(format!(
                "{} upper-triangle values for a {dim}x{dim} matrix (expected {})",
                values.len(),
                cell_count(dim)
            )));
        }
        Ok(SymMatrix { dim, values })
    }

    /// Builds from a dense row-major matrix, requiring exact symmetry.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {dim}",
                    r.len()
                )));
            }
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Domain(format!(
                        "matrix not symmetric at ({i}, {j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        let values = cells(dim).map(|c| rows[c.row][c.col]).collect();
        Ok(SymMatrix { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[Cell::new(i, j).index(self.dim)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let idx = Cell::new(i, j).index(self.dim);
        self.values[idx] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub(crate) fn check_probabilities(&self, what: &str) -> Result<()> {
        for (idx, &v) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                let c = Cell::from_index(idx, self.dim);
                return Err(Error::ProbabilityOutOfRange {
                    location: format!("{what}[{}, {}]", c.row, c.col),
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// A flat stochastic blockmodel: `K*` blocks, a symmetric probability
/// matrix and the vertex count of every block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatModel {
    probabilities: SymMatrix,
    block_sizes: Vec<usize>,
}

impl FlatModel {
    pub fn new(probabilities: SymMatrix, block_sizes: Vec<usize>) -> Result<Self> {
        if probabilities.dim() != block_sizes.len() {
            return Err(Error::Dimension(format!(
                "{}x{} probability matrix for {} blocks",
                probabilities.dim(),
                probabilities.dim(),
                block_sizes.len()
            )));
        }
        probabilities.check_probabilities("B")?;
        Ok(FlatModel {
            probabilities,
            block_sizes,
        })
    }

    pub fn k_star(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.probabilities
    }

    pub fn probability(&self, cell: Cell) -> f64 {
        self.probabilities.get(cell.row, cell.col)
    }

    /// Probabilities in cell index order.
    pub fn cell_probabilities(&self) -> &[f64] {
        self.probabilities.values()
    }

    pub(crate) fn with_cell_probabilities(&self, values: Vec<f64>) -> Self {
        FlatModel {
            probabilities: SymMatrix::from_upper(self.k_star(), values).expect("same shape"),
            block_sizes: self.block_sizes.clone(),
        }
    }
}
