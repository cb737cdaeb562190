//! Length-ratio branch pruning.
//!
//! Spurious endpoint branches are removed when shorter than
//! `max(absolute_threshold, relative_threshold * L)` where `L` is the
//! geodesic length of the longest branch of the current skeleton. Scaling
//! by the longest branch rather than the full skeleton diameter keeps
//! short but structural limbs (a head above a long trunk) while still
//! sweeping thinning spurs, whose length does not grow with the figure.
//! The graph is rebuilt after every removal so dissolved forks merge
//! their surviving branches; the last remaining branch is never removed.

use super::graph::{build_graph, NodeKind, SkeletonGraph};

pub fn prune(graph: &SkeletonGraph, relative_threshold: f64, absolute_threshold: f64) -> SkeletonGraph {
    let mut mask = graph.to_mask();
    loop {
        let g = build_graph(&mask).expect("pruning never empties the skeleton");
        if g.branches.len() <= 1 {
            return g;
        }
        let longest = g
            .branches
            .iter()
            .map(|b| b.geodesic_length)
            .fold(0.0f64, f64::max);
        let threshold = absolute_threshold.max(relative_threshold * longest);
        let candidate = g
            .branches
            .iter()
            .filter(|b| {
                (g.nodes[b.a].kind == NodeKind::Endpoint || g.nodes[b.b].kind == NodeKind::Endpoint)
                    && b.geodesic_length < threshold
            })
            .min_by(|x, y| {
                x.geodesic_length
                    .partial_cmp(&y.geodesic_length)
                    .unwrap()
                    .then_with(|| x.path.cmp(&y.path))
            });
        let branch = match candidate {
            Some(b) => b.clone(),
            None => return g,
        };
        // Remove path pixels except those owned by surviving (non-endpoint)
        // terminal nodes.
        for &p in &branch.path {
            let keep = g
                .node_at(p)
                .map(|n| g.nodes[n].kind != NodeKind::Endpoint)
                .unwrap_or(false);
            if !keep {
                mask.set(p.0, p.1, false);
            }
        }
        // Kept cluster pixels may be left as redundant nubs; re-thinning is
        // a no-op elsewhere on an already-thin skeleton.
        mask = super::thin::thin(&mask).expect("pruned skeleton stays nonempty");
    }
}
