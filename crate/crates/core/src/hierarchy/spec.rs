use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::tree::RootedTree;
use crate::error::{Error, Result};

/// A motif: an order-independent metablock model shared by several metablocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motif {
    pub label: String,
    pub leaf_count: usize,
}

/// The full structural hypothesis of a repeated-motif hierarchical SBM:
/// tree, motif level, motif library, metablock-to-motif map and block sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchySpec {
    tree: RootedTree,
    motif_level: usize,
    motifs: Vec<Motif>,
    /// metablock node id -> index into `motifs`
    motif_map: BTreeMap<usize, usize>,
    leaf_order: Vec<usize>,
    block_of_node: HashMap<usize, usize>,
    block_sizes: Vec<usize>,
}

/// On-disk layout of a hierarchy spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecFile {
    pub nodes: Vec<i64>,
    pub motif_level: usize,
    pub motifs: Vec<Motif>,
    pub motif_map: BTreeMap<String, String>,
    pub block_sizes: Vec<usize>,
}

impl HierarchySpec {
    /// Validates and assembles a spec. `motif_map` maps metablock node ids to motif labels.
    pub fn new(
        tree: RootedTree,
        motif_level: usize,
        motifs: Vec<Motif>,
        motif_map: &BTreeMap<usize, String>,
        block_sizes: Vec<usize>,
    ) -> Result<Self> {
        if motif_level == 0 {
            return Err(Error::spec("motif_level", "must be at least 1"));
        }
        let mut label_index = HashMap::new();
        for (i, m) in motifs.iter().enumerate() {
            if m.leaf_count == 0 {
                return Err(Error::spec(
                    format!("motifs[{i}].leaf_count"),
                    "must be at least 1",
                ));
            }
            if label_index.insert(m.label.clone(), i).is_some() {
                return Err(Error::spec(
                    format!("motifs[{i}].label"),
                    format!("duplicate motif label {:?}", m.label),
                ));
            }
        }

        let mut mapped = BTreeMap::new();
        for (&node, label) in motif_map {
            let key = format!("motif_map[\"{node}\"]");
            if node >= tree.node_count() {
                return Err(Error::spec(key, format!("node {node} does not exist")));
            }
            if tree.depth(node) != motif_level {
                return Err(Error::spec(
                    key,
                    format!(
                        "node {node} has depth {}, expected motif_level {motif_level}",
                        tree.depth(node)
                    ),
                ));
            }
            let &mi = label_index
                .get(label)
                .ok_or_else(|| Error::spec(key.clone(), format!("unknown motif {label:?}")))?;
            mapped.insert(node, mi);
        }
        for node in tree.nodes_at_depth(motif_level) {
            if !mapped.contains_key(&node) {
                return Err(Error::spec(
                    format!("motif_map[\"{node}\"]"),
                    format!("metablock {node} at depth {motif_level} has no motif"),
                ));
            }
        }

        // Metablocks sharing a motif must have the motif's leaf count and one common shape.
        let mut shape_of_motif: HashMap<usize, (usize, String)> = HashMap::new();
        for (&node, &mi) in &mapped {
            let key = format!("motif_map[\"{node}\"]");
            let leaves = tree.leaves_under(node).len();
            if leaves != motifs[mi].leaf_count {
                return Err(Error::spec(
                    key,
                    format!(
                        "metablock {node} has {leaves} leaves but motif {:?} declares leaf_count {}",
                        motifs[mi].label, motifs[mi].leaf_count
                    ),
                ));
            }
            let shape = tree.shape(node);
            match shape_of_motif.get(&mi) {
                Some((first, s)) if *s != shape => {
                    return Err(Error::spec(
                        key,
                        format!(
                            "metablock {node} and metablock {first} share motif {:?} but differ in shape",
                            motifs[mi].label
                        ),
                    ));
                }
                Some(_) => {}
                None => {
                    shape_of_motif.insert(mi, (node, shape));
                }
            }
        }

        let leaf_order = tree.leaves();
        if block_sizes.len() != leaf_order.len() {
            return Err(Error::spec(
                "block_sizes",
                format!(
                    "has {} entries but the tree has {} leaves",
                    block_sizes.len(),
                    leaf_order.len()
                ),
            ));
        }
        if let Some(i) = block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::spec(format!("block_sizes[{i}]"), "must be at least 1"));
        }
        let block_of_node = leaf_order
            .iter()
            .enumerate()
            .map(|(b, &node)| (node, b))
            .collect();

        Ok(HierarchySpec {
            tree,
            motif_level,
            motifs,
            motif_map: mapped,
            leaf_order,
            block_of_node,
            block_sizes,
        })
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn motif_level(&self) -> usize {
        self.motif_level
    }

    pub fn motifs(&self) -> &[Motif] {
        &self.motifs
    }

    /// Metablock node ids with their motif index, in node order.
    pub fn metablocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.motif_map.iter().map(|(&n, &m)| (n, m))
    }

    pub fn motif_of(&self, metablock: usize) -> Option<usize> {
        self.motif_map.get(&metablock).copied()
    }

    pub fn motif_index(&self, label: &str) -> Option<usize> {
        self.motifs.iter().position(|m| m.label == label)
    }

    /// Number of flat blocks, `K*` (the leaf count).
    pub fn k_star(&self) -> usize {
        self.leaf_order.len()
    }

    /// Leaf node ids in flat block order.
    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    pub fn block_of_leaf(&self, leaf: usize) -> Option<usize> {
        self.block_of_node.get(&leaf).copied()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// The metablock containing `node` (itself included), if any.
    pub fn metablock_containing(&self, node: usize) -> Option<usize> {
        let mb = self.tree.ancestor_at_depth(node, self.motif_level)?;
        self.motif_map.contains_key(&mb).then_some(mb)
    }

    /// Position of `leaf` in its metablock's depth-first leaf order.
    pub fn local_leaf_index(&self, metablock: usize, leaf: usize) -> Option<usize> {
        self.tree
            .leaves_under(metablock)
            .iter()
            .position(|&l| l == leaf)
    }

    /// Same spec with every block resized to `size` vertices.
    pub fn with_uniform_block_size(&self, size: usize) -> Result<Self> {
        self.with_block_sizes(vec![size; self.k_star()])
    }

    pub fn with_block_sizes(&self, block_sizes: Vec<usize>) -> Result<Self> {
        let map = self.motif_label_map();
        HierarchySpec::new(
            self.tree.clone(),
            self.motif_level,
            self.motifs.clone(),
            &map,
            block_sizes,
        )
    }

    fn motif_label_map(&self) -> BTreeMap<usize, String> {
        self.motif_map
            .iter()
            .map(|(&n, &m)| (n, self.motifs[m].label.clone()))
            .collect()
    }

    pub fn to_file(&self) -> SpecFile {
        SpecFile {
            nodes: self.tree.to_parents(),
            motif_level: self.motif_level,
            motifs: self.motifs.clone(),
            motif_map: self
                .motif_label_map()
                .into_iter()
                .map(|(n, l)| (n.to_string(), l))
                .collect(),
            block_sizes: self.block_sizes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("spec serializes")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Parses the JSON spec format. Errors name the offending key and index.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::spec("<document>", format!("invalid JSON: {e}")))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::spec("<document>", "expected a JSON object"))?;
        let field = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::spec(key, "missing required key"))
        };

        let nodes_v = field("nodes")?
            .as_array()
            .ok_or_else(|| Error::spec("nodes", "expected an array of parent ids"))?;
        let mut nodes = Vec::with_capacity(nodes_v.len());
        for (i, v) in nodes_v.iter().enumerate() {
            let p = v
                .as_i64()
                .ok_or_else(|| Error::spec(format!("nodes[{i}]"), "expected an integer"))?;
            nodes.push(p);
        }
        let tree = RootedTree::from_parents(&nodes).map_err(|e| Error::spec("nodes", e.to_string()))?;
        if tree.root() != 0 {
            return Err(Error::spec(
                format!("nodes[{}]", tree.root()),
                "the root must be node 0",
            ));
        }

        let motif_level = field("motif_level")?
            .as_u64()
            .ok_or_else(|| Error::spec("motif_level", "expected a non-negative integer"))?
            as usize;

        let mut motifs = Vec::new();
        if let Some(v) = obj.get("motifs") {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::spec("motifs", "expected an array"))?;
            for (i, m) in arr.iter().enumerate() {
                let label = m
                    .get("label")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::spec(format!("motifs[{i}].label"), "expected a string"))?;
                let leaf_count = m.get("leaf_count").and_then(Value::as_u64).ok_or_else(|| {
                    Error::spec(format!("motifs[{i}].leaf_count"), "expected a positive integer")
                })?;
                motifs.push(Motif {
                    label: label.to_string(),
                    leaf_count: leaf_count as usize,
                });
            }
        }

        let mut motif_map = BTreeMap::new();
        if let Some(v) = obj.get("motif_map") {
            let map = v
                .as_object()
                .ok_or_else(|| Error::spec("motif_map", "expected an object of node id -> label"))?;
            for (k, v) in map {
                let key = format!("motif_map[\"{k}\"]");
                let node: usize = k
                    .parse()
                    .map_err(|_| Error::spec(key.clone(), "key is not a node id"))?;
                let label = v
                    .as_str()
                    .ok_or_else(|| Error::spec(key, "expected a motif label"))?;
                motif_map.insert(node, label.to_string());
            }
        }

        let sizes_v = field("block_sizes")?
            .as_array()
            .ok_or_else(|| Error::spec("block_sizes", "expected an array"))?;
        let mut block_sizes = Vec::with_capacity(sizes_v.len());
        for (i, v) in sizes_v.iter().enumerate() {
            let s = v.as_u64().ok_or_else(|| {
                Error::spec(format!("block_sizes[{i}]"), "expected a positive integer")
            })?;
            block_sizes.push(s as usize);
        }

        HierarchySpec::new(tree, motif_level, motifs, &motif_map, block_sizes)
    }
}

/// Flat block label per vertex, together with the number of blocks `K*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    tau: Vec<usize>,
    k_star: usize,
}

impl Membership {
    pub fn new(tau: Vec<usize>, k_star: usize) -> Result<Self> {
        if let Some(v) = tau.iter().position(|&b| b >= k_star) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} assigned to block {} but K* = {k_star}",
                tau[v]
            )));
        }
        Ok(Membership { tau, k_star })
    }

    /// Vertices `0..s0` in block 0, the next `s1` in block 1, and so on.
    pub fn contiguous(block_sizes: &[usize]) -> Self {
        let tau = block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect();
        Membership {
            tau,
            k_star: block_sizes.len(),
        }
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn vertex_count(&self) -> usize {
        self.tau.len()
    }

    pub fn block(&self, vertex: usize) -> usize {
        self.tau[vertex]
    }

    pub fn labels(&self) -> &[usize] {
        &self.tau
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_star];
        for &b in &self.tau {
            sizes[b] += 1;
        }
        sizes
    }
}

/// Assignment of each vertex to a leaf node of the hierarchy tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traversal {
    leaf_of_vertex: Vec<usize>,
}

impl Traversal {
    pub fn new(leaf_of_vertex: Vec<usize>) -> Self {
        Traversal { leaf_of_vertex }
    }

    /// The traversal implied by a spec: leaves in flat order, each taking a
    /// contiguous run of `block_sizes[b]` vertices.
    pub fn contiguous(spec: &HierarchySpec) -> Self {
        let leaf_of_vertex = spec
            .leaf_order()
            .iter()
            .zip(spec.block_sizes())
            .flat_map(|(&leaf, &s)| std::iter::repeat_n(leaf, s))
            .collect();
        Traversal { leaf_of_vertex }
    }

    pub fn leaf(&self, vertex: usize) -> usize {
        self.leaf_of_vertex[vertex]
    }

    pub fn vertex_count(&self) -> usize {
        self.leaf_of_vertex.len()
    }
}

/// True iff `tau` and the traversal induce the same vertex partition.
pub fn check_compatibility_with(tau: &Membership, traversal: &Traversal) -> bool {
    if tau.vertex_count() != traversal.vertex_count() {
        return false;
    }
    // Level sets agree iff the label correspondence is a bijection.
    let mut leaf_for_block: HashMap<usize, usize> = HashMap::new();
    let mut block_for_leaf: HashMap<usize, usize> = HashMap::new();
    for v in 0..tau.vertex_count() {
        let (b, l) = (tau.block(v), traversal.leaf(v));
        if *leaf_for_block.entry(b).or_insert(l) != l {
            return false;
        }
        if *block_for_leaf.entry(l).or_insert(b) != b {
            return false;
        }
    }
    true
}

/// Compatibility against the spec's own (contiguous) traversal.
pub fn check_compatibility(tau: &Membership, spec: &HierarchySpec) -> bool {
    check_compatibility_with(tau, &Traversal::contiguous(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::presets;

    const SMALL: &str = r#"{
        "nodes": [-1, 0, 0, 1, 1, 2, 2],
        "motif_level": 1,
        "motifs": [{"label": "m", "leaf_count": 2}],
        "motif_map": {"1": "m", "2": "m"},
        "block_sizes": [3, 2, 3, 2]
    }"#;

    #[test]
    fn parses_small_spec() {
        let spec = HierarchySpec::from_json_str(SMALL).unwrap();
        assert_eq!(spec.k_star(), 4);
        assert_eq!(spec.leaf_order(), &[3, 4, 5, 6]);
        assert_eq!(spec.vertex_count(), 10);
        assert_eq!(spec.metablock_containing(5), Some(2));
        assert_eq!(spec.local_leaf_index(2, 6), Some(1));
        let again = HierarchySpec::from_json_str(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
    }

    fn err_key(text: &str) -> String {
        match HierarchySpec::from_json_str(text) {
            Err(Error::Spec { key, .. }) => key,
            other => panic!("expected spec error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_key_and_index() {
        assert_eq!(err_key(&SMALL.replace("[3, 2, 3, 2]", "[3, 2, 0, 2]")), "block_sizes[2]");
        assert_eq!(err_key(&SMALL.replace("[3, 2, 3, 2]", "[3, 2, \"x\", 2]")), "block_sizes[2]");
        assert_eq!(err_key(&SMALL.replace("[-1, 0, 0,", "[-1, 0, \"a\",")), "nodes[2]");
        assert_eq!(err_key(&SMALL.replace("\"2\": \"m\"", "\"2\": \"q\"")), "motif_map[\"2\"]");
        assert_eq!(err_key(&SMALL.replace(", \"2\": \"m\"", "")), "motif_map[\"2\"]");
        assert_eq!(err_key(&SMALL.replace("\"leaf_count\": 2", "\"leaf_count\": 3")), "motif_map[\"1\"]");
        assert_eq!(err_key(&SMALL.replace("\"motif_level\": 1,", "")), "motif_level");
        assert_eq!(err_key("[1, 2]"), "<document>");
    }

    #[test]
    fn mismatched_motif_shapes_rejected() {
        // metablock 1 has leaves 3,4; metablock 2 has an internal child 5 with leaves 6,7.
        let text = r#"{
            "nodes": [-1, 0, 0, 1, 1, 2, 2, 5, 5],
            "motif_level": 1,
            "motifs": [{"label": "m", "leaf_count": 3}],
            "motif_map": {"1": "m", "2": "m"},
            "block_sizes": [1, 1, 1, 1, 1, 1]
        }"#;
        assert!(HierarchySpec::from_json_str(text).is_err());
    }

    #[test]
    fn compatibility_of_hemisphere_labelling() {
        let spec = presets::bnu1(3);
        // Left region k -> block k, right region k -> block 35 + k.
        let tau = Membership::contiguous(spec.block_sizes());
        assert_eq!(tau.block(3 * 35), 35);
        assert!(check_compatibility(&tau, &spec));
    }

    #[test]
    fn constant_labelling_is_incompatible() {
        let spec = presets::bnu1(2);
        let tau = Membership::new(vec![0; spec.vertex_count()], 70).unwrap();
        assert!(!check_compatibility(&tau, &spec));
    }

    #[test]
    fn compatibility_ignores_label_values() {
        let spec = HierarchySpec::from_json_str(SMALL).unwrap();
        let mut labels = Membership::contiguous(spec.block_sizes()).labels().to_vec();
        for l in labels.iter_mut() {
            *l = match *l {
                0 => 2,
                2 => 0,
                x => x,
            };
        }
        let swapped = Membership::new(labels.clone(), 4).unwrap();
        assert!(check_compatibility(&swapped, &spec));
        labels[0] = 1;
        assert!(!check_compatibility(&Membership::new(labels, 4).unwrap(), &spec));
    }

    #[test]
    fn membership_rejects_out_of_range_labels() {
        assert!(Membership::new(vec![0, 3], 3).is_err());
        assert_eq!(Membership::contiguous(&[2, 1]).block_sizes(), vec![2, 1]);
    }
}
