//! Ready-made hierarchy specs used by the simulation studies.

use std::collections::BTreeMap;

use super::spec::{HierarchySpec, Motif};
use super::tree::RootedTree;

/// Depth-2 spec: a root over one metablock per entry of `sequence` (each
/// labelled with its motif), every metablock holding `blocks_per_metablock`
/// leaf blocks of `block_size` vertices. Motif level is 1.
pub fn motif_sequence(sequence: &[&str], blocks_per_metablock: usize, block_size: usize) -> HierarchySpec {
    let m = sequence.len();
    let mut parents = vec![-1i64];
    parents.extend(std::iter::repeat_n(0, m));
    for mb in 1..=m {
        parents.extend(std::iter::repeat_n(mb as i64, blocks_per_metablock));
    }
    let tree = RootedTree::from_parents(&parents).expect("preset tree is valid");

    let mut motifs: Vec<Motif> = Vec::new();
    let mut map = BTreeMap::new();
    for (i, &label) in sequence.iter().enumerate() {
        if !motifs.iter().any(|x| x.label == label) {
            motifs.push(Motif {
                label: label.to_string(),
                leaf_count: blocks_per_metablock,
            });
        }
        map.insert(i + 1, label.to_string());
    }
    HierarchySpec::new(tree, 1, motifs, &map, vec![block_size; m * blocks_per_metablock])
        .expect("preset spec is valid")
}

/// Like [`motif_sequence`], with each motif's copies placed consecutively.
pub fn repeated_motif(copies: &[(&str, usize)], blocks_per_metablock: usize, block_size: usize) -> HierarchySpec {
    let sequence: Vec<&str> = copies
        .iter()
        .flat_map(|&(label, n)| std::iter::repeat_n(label, n))
        .collect();
    motif_sequence(&sequence, blocks_per_metablock, block_size)
}

/// Two hemispheres, each an instance of one 35-region motif: 70 blocks.
pub fn bnu1(block_size: usize) -> HierarchySpec {
    repeated_motif(&[("hemisphere", 2)], 35, block_size)
}

/// The reduced two-hemisphere model: 2 x 7 = 14 blocks.
pub fn bnu1_desk(block_size: usize) -> HierarchySpec {
    repeated_motif(&[("hemisphere", 2)], 7, block_size)
}

/// Seven 10-block communities drawn from three motifs: `a` three times,
/// `b` and `c` twice each, interleaved as a b a c a b c.
pub fn three_motif(block_size: usize) -> HierarchySpec {
    motif_sequence(&["a", "b", "a", "c", "a", "b", "c"], 10, block_size)
}

/// A plain `k`-block SBM as a one-level tree without metablocks.
pub fn flat_sbm(k: usize, block_size: usize) -> HierarchySpec {
    let mut parents = vec![-1i64];
    parents.extend(std::iter::repeat_n(0, k));
    let tree = RootedTree::from_parents(&parents).expect("star tree is valid");
    HierarchySpec::new(tree, 2, Vec::new(), &BTreeMap::new(), vec![block_size; k])
        .expect("flat spec is valid")
}

/// Looks up a preset by name: `bnu1`, `bnu1-desk`, `three-motif`.
pub fn by_name(name: &str, block_size: usize) -> Option<HierarchySpec> {
    match name {
        "bnu1" => Some(bnu1(block_size)),
        "bnu1-desk" => Some(bnu1_desk(block_size)),
        "three-motif" => Some(three_motif(block_size)),
        _ => None,
    }
}
