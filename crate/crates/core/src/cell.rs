//! Unordered block-pair cells `{l, k}` and their dense upper-triangular index.

use serde::{Deserialize, Serialize};

/// An unordered pair of flat block indices, stored with `row <= col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Cell { row: a, col: b }
        } else {
            Cell { row: b, col: a }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.row == self.col
    }

    /// Position in the row-major upper triangle of a `k_star`-block matrix.
    pub fn index(&self, k_star: usize) -> usize {
        debug_assert!(self.col < k_star);
        self.row * (2 * k_star - self.row + 1) / 2 + (self.col - self.row)
    }

    pub fn from_index(index: usize, k_star: usize) -> Self {
        let mut row = 0;
        let mut start = 0;
        loop {
            let len = k_star - row;
            if index < start + len {
                return Cell {
                    row,
                    col: row + (index - start),
                };
            }
            start += len;
            row += 1;
        }
    }
}

/// Number of unordered cells, `K(K+1)/2`.
pub fn cell_count(k_star: usize) -> usize {
    k_star * (k_star + 1) / 2
}

/// All cells in index order.
pub fn cells(k_star: usize) -> impl Iterator<Item = Cell> {
    (0..k_star).flat_map(move |row| (row..k_star).map(move |col| Cell { row, col }))
}

/// Dyads available to a cell given the block sizes.
pub fn dyad_count(cell: Cell, block_sizes: &[usize]) -> u64 {
    let a = block_sizes[cell.row] as u64;
    if cell.is_diagonal() {
        a * a.saturating_sub(1) / 2
    } else {
        a * block_sizes[cell.col] as u64
    }
}
