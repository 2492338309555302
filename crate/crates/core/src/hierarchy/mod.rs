//! Rooted trees, repeated-motif hierarchy specs, flattening to a flat SBM and
//! the tied parameter groups.

mod flatten;
mod groups;
mod model;
pub mod presets;
mod spec;
mod tree;

pub use flatten::{flatten_model, level_nodes, tie_motif_parents};
pub use groups::{build_parameter_groups, cell_kind, Group, GroupKind, ParameterGroups};
pub use model::{FlatModel, SymMatrix};
pub use spec::{
    check_compatibility, check_compatibility_with, HierarchySpec, Membership, Motif, SpecFile,
    Traversal,
};
pub use tree::RootedTree;
