//! Thinning, skeleton graph construction and branch pruning.

mod graph;
pub(crate) mod paths;
mod prune;
mod thin;

pub use graph::{
    build_graph, classify_points, path_length, step_cost, Branch, Node, NodeKind, PointKind,
    SkeletonGraph, SkeletonPoint,
};
pub use prune::prune;
pub use thin::{find_thick_block, thin};
