//! Derivation of the tied parameter groups Γ from a hierarchy spec.
//!
//! Every flat cell `{l, k}` is mapped to the hierarchy parameter that
//! generates it:
//!
//! * cells inside one metablock read the metablock's motif matrix, so they tie
//!   across every metablock carrying that motif (aligned by local leaf index);
//! * cells whose leaves split at the parent of two metablocks tie by the
//!   unordered pair of motifs involved, which is what sibling-exchangeability
//!   of same-motif metablocks forces;
//! * cells splitting higher up read a level matrix entry of the splitting node.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::spec::HierarchySpec;
use crate::cell::{cell_count, cells, Cell};
use crate::error::{Error, Result};

/// The hierarchy parameter shared by all cells of a group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// Entry `(row, col)` of a motif's internal matrix.
    Motif { motif: usize, row: usize, col: usize },
    /// Connection between sibling metablocks, keyed by their motifs.
    MotifPair {
        parent: usize,
        motifs: (usize, usize),
    },
    /// Entry of the level matrix at `node` between two child positions.
    Split {
        node: usize,
        children: (usize, usize),
    },
    /// Within-block probability of a leaf outside any metablock.
    Leaf { node: usize },
    /// User-supplied grouping.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub id: usize,
    pub kind: GroupKind,
    pub cells: Vec<Cell>,
}

impl Group {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Degrees of freedom freed by untying the group, `|γ_B| - 1`.
    pub fn df(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    /// Singleton groups carry no hypothesis to test.
    pub fn is_testable(&self) -> bool {
        self.cells.len() >= 2
    }
}

/// A partition Γ of all `K*(K*+1)/2` cells into tied groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterGroups {
    k_star: usize,
    block_sizes: Vec<usize>,
    groups: Vec<Group>,
    cell_group: Vec<usize>,
}

impl ParameterGroups {
    /// Builds groups from explicit cell lists, checking they partition all cells.
    pub fn from_cells(block_sizes: Vec<usize>, groups: Vec<Vec<Cell>>) -> Result<Self> {
        let k_star = block_sizes.len();
        let mut cell_group = vec![usize::MAX; cell_count(k_star)];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("group {g} is empty")));
            }
            for c in members {
                if c.col >= k_star {
                    return Err(Error::InvalidArgument(format!(
                        "cell {{{}, {}}} outside K* = {k_star}",
                        c.row, c.col
                    )));
                }
                let idx = c.index(k_star);
                if cell_group[idx] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "cell {{{}, {}}} belongs to groups {} and {g}",
                        c.row, c.col, cell_group[idx]
                    )));
                }
                cell_group[idx] = g;
            }
        }
        if let Some(idx) = cell_group.iter().position(|&g| g == usize::MAX) {
            let c = Cell::from_index(idx, k_star);
            return Err(Error::InvalidArgument(format!(
                "cell {{{}, {}}} is not covered by any group",
                c.row, c.col
            )));
        }
        let groups = groups
            .into_iter()
            .enumerate()
            .map(|(id, mut cells)| {
                cells.sort();
                Group {
                    id,
                    kind: GroupKind::Custom,
                    cells,
                }
            })
            .collect();
        Ok(ParameterGroups {
            k_star,
            block_sizes,
            groups,
            cell_group,
        })
    }

    /// Every cell in its own group.
    pub fn singletons(block_sizes: Vec<usize>) -> Self {
        let k = block_sizes.len();
        let groups = cells(k).map(|c| vec![c]).collect();
        Self::from_cells(block_sizes, groups).expect("singletons partition the cells")
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, id: usize) -> &Group {
        &self.groups[id]
    }

    pub fn group_of(&self, cell: Cell) -> usize {
        self.cell_group[cell.index(self.k_star)]
    }

    /// Group id of each cell in cell index order.
    pub fn cell_groups(&self) -> &[usize] {
        &self.cell_group
    }

    /// `Σ_γ (|γ_B| - 1)`, the parameter difference between the free SBM and the tied model.
    pub fn total_df(&self) -> usize {
        self.groups.iter().map(Group::df).sum()
    }

    /// Cells that share their parameter with at least one other cell.
    pub fn tied_cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self
            .groups
            .iter()
            .filter(|g| g.is_testable())
            .flat_map(|g| g.cells.iter().copied())
            .collect();
        out.sort();
        out
    }
}

/// The hierarchy parameter generating a flat cell.
pub fn cell_kind(spec: &HierarchySpec, cell: Cell) -> GroupKind {
    let tree = spec.tree();
    let v = spec.leaf_order()[cell.row];
    let w = spec.leaf_order()[cell.col];
    let ordered = |a: usize, b: usize| if a <= b { (a, b) } else { (b, a) };

    if v == w {
        return match spec.metablock_containing(v) {
            Some(mb) => {
                let i = spec.local_leaf_index(mb, v).unwrap();
                GroupKind::Motif {
                    motif: spec.motif_of(mb).unwrap(),
                    row: i,
                    col: i,
                }
            }
            None => GroupKind::Leaf { node: v },
        };
    }

    let u = tree.lca(v, w).expect("leaves are valid nodes");
    if let Some(mb) = spec.metablock_containing(u) {
        let (i, j) = ordered(
            spec.local_leaf_index(mb, v).unwrap(),
            spec.local_leaf_index(mb, w).unwrap(),
        );
        return GroupKind::Motif {
            motif: spec.motif_of(mb).unwrap(),
            row: i,
            col: j,
        };
    }
    let (a, b) = tree.lca_down(v, w).expect("distinct leaves");
    if tree.depth(u) + 1 == spec.motif_level() {
        let ma = spec.motif_of(a).expect("depth-L nodes are mapped");
        let mb = spec.motif_of(b).expect("depth-L nodes are mapped");
        GroupKind::MotifPair {
            parent: u,
            motifs: ordered(ma, mb),
        }
    } else {
        GroupKind::Split {
            node: u,
            children: ordered(
                tree.child_position(a).unwrap(),
                tree.child_position(b).unwrap(),
            ),
        }
    }
}

/// Partitions all flat cells into groups of stochastically identical cells.
///
/// Group ids follow the first appearance of a group in cell index order.
/// The spec's own validation already guarantees motif consistency, so this
/// cannot fail.
pub fn build_parameter_groups(spec: &HierarchySpec) -> ParameterGroups {
    let k = spec.k_star();
    let mut index: HashMap<GroupKind, usize> = HashMap::new();
    let mut groups: Vec<Group> = Vec::new();
    let mut cell_group = Vec::with_capacity(cell_count(k));
    for cell in cells(k) {
        let kind = cell_kind(spec, cell);
        let id = *index.entry(kind.clone()).or_insert_with(|| {
            groups.push(Group {
                id: groups.len(),
                kind,
                cells: Vec::new(),
            });
            groups.len() - 1
        });
        groups[id].cells.push(cell);
        cell_group.push(id);
    }
    ParameterGroups {
        k_star: k,
        block_sizes: spec.block_sizes().to_vec(),
        groups,
        cell_group,
    }
}
