use std::collections::BTreeMap;

use super::model::{FlatModel, SymMatrix};
use super::spec::HierarchySpec;
use crate::cell::cells;
use crate::error::{Error, Result};

/// Internal nodes that need a level matrix: every internal node outside the metablocks.
pub fn level_nodes(spec: &HierarchySpec) -> Vec<usize> {
    spec.tree()
        .internal_nodes()
        .into_iter()
        .filter(|&u| spec.metablock_containing(u).is_none())
        .collect()
}

/// Rewrites a hierarchical model as a flat SBM on the leaves.
///
/// `level_matrices` holds, for every node in [`level_nodes`], a matrix over
/// its children; its diagonal is read only for children that are leaves
/// outside any metablock. `motif_matrices` holds each motif's internal
/// `leaf_count x leaf_count` matrix keyed by label. Level matrices at the
/// parents of metablocks must give the same entry to every pair of children
/// with the same (unordered) motif pair.
pub fn flatten_model(
    spec: &HierarchySpec,
    level_matrices: &BTreeMap<usize, SymMatrix>,
    motif_matrices: &BTreeMap<String, SymMatrix>,
) -> Result<FlatModel> {
    let tree = spec.tree();

    for u in level_nodes(spec) {
        let m = level_matrices
            .get(&u)
            .ok_or_else(|| Error::Dimension(format!("no level matrix for node {u}")))?;
        let want = tree.children(u).len();
        if m.dim() != want {
            return Err(Error::Dimension(format!(
                "level matrix for node {u} is {}x{}, node has {want} children",
                m.dim(),
                m.dim()
            )));
        }
        m.check_probabilities(&format!("level[{u}]"))?;
        if tree.depth(u) + 1 == spec.motif_level() {
            check_motif_tying(spec, u, m)?;
        }
    }
    let root_leaf = tree.is_leaf(tree.root());
    if root_leaf {
        match level_matrices.get(&tree.root()) {
            Some(m) if m.dim() == 1 => m.check_probabilities("level[root]")?,
            _ => {
                return Err(Error::Dimension(
                    "a single-node tree needs a 1x1 level matrix at the root".into(),
                ))
            }
        }
    }
    let mut used = vec![false; spec.motifs().len()];
    for (_, m) in spec.metablocks() {
        used[m] = true;
    }
    for (mi, motif) in spec.motifs().iter().enumerate() {
        if !used[mi] {
            continue;
        }
        let m = motif_matrices.get(&motif.label).ok_or_else(|| {
            Error::Dimension(format!("no matrix for motif {:?}", motif.label))
        })?;
        if m.dim() != motif.leaf_count {
            return Err(Error::Dimension(format!(
                "motif {:?} matrix is {}x{}, motif has {} leaves",
                motif.label,
                m.dim(),
                m.dim(),
                motif.leaf_count
            )));
        }
        m.check_probabilities(&format!("motif[{:?}]", motif.label))?;
    }

    let k = spec.k_star();
    let motif_matrix = |mb: usize| &motif_matrices[&spec.motifs()[spec.motif_of(mb).unwrap()].label];
    let values = cells(k)
        .map(|cell| {
            let v = spec.leaf_order()[cell.row];
            let w = spec.leaf_order()[cell.col];
            if v == w {
                if let Some(mb) = spec.metablock_containing(v) {
                    let i = spec.local_leaf_index(mb, v).unwrap();
                    return motif_matrix(mb).get(i, i);
                }
                return match tree.parent(v) {
                    Some(p) => {
                        let i = tree.child_position(v).unwrap();
                        level_matrices[&p].get(i, i)
                    }
                    None => level_matrices[&v].get(0, 0),
                };
            }
            let u = tree.lca(v, w).unwrap();
            if let Some(mb) = spec.metablock_containing(u) {
                let i = spec.local_leaf_index(mb, v).unwrap();
                let j = spec.local_leaf_index(mb, w).unwrap();
                return motif_matrix(mb).get(i, j);
            }
            let (a, b) = tree.lca_down(v, w).unwrap();
            level_matrices[&u].get(
                tree.child_position(a).unwrap(),
                tree.child_position(b).unwrap(),
            )
        })
        .collect();
    FlatModel::new(SymMatrix::from_upper(k, values)?, spec.block_sizes().to_vec())
}

fn check_motif_tying(spec: &HierarchySpec, parent: usize, m: &SymMatrix) -> Result<()> {
    let children = spec.tree().children(parent);
    let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, &a) in children.iter().enumerate() {
        for (j, &b) in children.iter().enumerate().skip(i + 1) {
            let (ma, mb) = (spec.motif_of(a).unwrap(), spec.motif_of(b).unwrap());
            let key = (ma.min(mb), ma.max(mb));
            let value = m.get(i, j);
            match seen.get(&key) {
                Some(&first) if first != value => {
                    return Err(Error::Domain(format!(
                        "level matrix at node {parent}: entry ({i}, {j}) = {value} differs from {first} \
                         for the same motif pair"
                    )));
                }
                Some(_) => {}
                None => {
                    seen.insert(key, value);
                }
            }
        }
    }
    Ok(())
}

/// Overwrites entries of level matrices at metablock parents so that each
/// unordered motif pair takes the value of its first occurrence.
pub fn tie_motif_parents(spec: &HierarchySpec, level_matrices: &mut BTreeMap<usize, SymMatrix>) {
    for u in level_nodes(spec) {
        if spec.tree().depth(u) + 1 != spec.motif_level() {
            continue;
        }
        let Some(m) = level_matrices.get_mut(&u) else {
            continue;
        };
        let children = spec.tree().children(u).to_vec();
        let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for i in 0..children.len() {
            for j in i + 1..children.len() {
                let (ma, mb) = (
                    spec.motif_of(children[i]).unwrap(),
                    spec.motif_of(children[j]).unwrap(),
                );
                let key = (ma.min(mb), ma.max(mb));
                let v = *seen.entry(key).or_insert(m.get(i, j));
                m.set(i, j, v);
            }
        }
    }
}
