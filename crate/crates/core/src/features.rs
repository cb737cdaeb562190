//! Posture and shape features: extremal endpoints, V/H ratio, the T->B
//! geodesic and per-fork shape ratios.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::skeleton::paths::{dijkstra, reconstruct};
use crate::skeleton::{NodeKind, SkeletonGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalPoints {
    /// Topmost endpoint (head for an upright subject).
    pub top: (usize, usize),
    /// Bottommost endpoint.
    pub bottom: (usize, usize),
    pub left: (usize, usize),
    pub right: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForkRatio {
    pub fork: (usize, usize),
    /// Geodesic distance from T to the fork along the T->B path.
    pub shape1: f64,
    /// Geodesic distance from the fork to B.
    pub shape2: f64,
    /// shape2 / shape1.
    pub shape: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeFeatures {
    pub extremal: ExtremalPoints,
    pub v: f64,
    pub h: f64,
    /// V/H; infinite when H = 0.
    pub ratio: f64,
    pub fork_ratios: Vec<ForkRatio>,
    pub shapeneck: u8,
    pub shapewaist: u8,
    /// Forks on the path skipped because shape1 was zero.
    pub skipped_forks: usize,
}

/// T, B, L, R over the graph's endpoint nodes. Ties resolved toward the
/// smaller col, then smaller row.
pub fn extremal_points(graph: &SkeletonGraph) -> Result<ExtremalPoints> {
    let mut eps: Vec<(usize, usize)> = graph.endpoints().map(|n| n.pixel).collect();
    if eps.len() < 2 {
        return Err(Error::TooFewEndpoints(eps.len()));
    }
    eps.sort_unstable();
    let top = *eps.iter().min_by_key(|p| (p.0, p.1)).unwrap();
    let bottom = *eps.iter().max_by_key(|p| (p.0, usize::MAX - p.1)).unwrap();
    let left = *eps.iter().min_by_key(|p| (p.1, p.0)).unwrap();
    let right = *eps.iter().max_by_key(|p| (p.1, usize::MAX - p.0)).unwrap();
    Ok(ExtremalPoints { top, bottom, left, right })
}

/// Vertical shift, horizontal shift and their ratio. H = 0 yields
/// `f64::INFINITY`, which compares greater than any finite threshold.
pub fn posture_ratio(extremal: &ExtremalPoints) -> (f64, f64, f64) {
    let v = (extremal.bottom.0 - extremal.top.0) as f64;
    let h = (extremal.right.1 - extremal.left.1) as f64;
    let ratio = if h == 0.0 { f64::INFINITY } else { v / h };
    (v, h, ratio)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PixelPath {
    pub pixels: Vec<(usize, usize)>,
    pub geodesic_length: f64,
}

/// Minimum-geodesic path between two skeleton pixels, axial steps cost 1
/// and diagonal steps sqrt(2).
pub fn shortest_path(graph: &SkeletonGraph, from: (usize, usize), to: (usize, usize)) -> Result<PixelPath> {
    if !graph.contains(from) || !graph.contains(to) {
        return Err(Error::Unreachable(from, to));
    }
    let mask = graph.to_mask();
    let d = dijkstra(&mask, from);
    let cost = d.dist.get(&to).copied().ok_or(Error::Unreachable(from, to))?;
    let pixels = reconstruct(&d, from, to);
    Ok(PixelPath { pixels, geodesic_length: cost.value() })
}

/// Shape ratios for every fork node met along the path (first and last
/// pixels excluded). Cluster membership counts: any pixel of a merged fork
/// cluster on the path registers that fork, at its first occurrence.
/// A fork at geodesic distance zero from the path start is skipped; the
/// second tuple element counts such skips.
pub fn fork_ratios(graph: &SkeletonGraph, path: &PixelPath) -> (Vec<ForkRatio>, usize) {
    let total = path.geodesic_length;
    // Cumulative geodesic distance at every path pixel.
    let mut cum = vec![0.0f64; path.pixels.len()];
    for i in 1..path.pixels.len() {
        cum[i] = cum[i - 1] + crate::skeleton::step_cost(path.pixels[i - 1], path.pixels[i]);
    }
    // A merged cluster may contribute several consecutive path pixels;
    // measure at the representative when it is on the path, otherwise at
    // the member pixel nearest the representative.
    let mut occurrences: Vec<(usize, Vec<usize>)> = Vec::new(); // (node, path indices)
    for (i, &p) in path.pixels.iter().enumerate() {
        if i == 0 || i + 1 == path.pixels.len() {
            continue;
        }
        if let Some(n) = graph.node_at(p) {
            if graph.nodes[n].kind == NodeKind::Fork {
                match occurrences.iter_mut().find(|(id, _)| *id == n) {
                    Some((_, idxs)) => idxs.push(i),
                    None => occurrences.push((n, vec![i])),
                }
            }
        }
    }
    let mut out: Vec<ForkRatio> = Vec::new();
    let mut skipped = 0usize;
    for (node_id, idxs) in occurrences {
        let rep = graph.nodes[node_id].pixel;
        let i = *idxs
            .iter()
            .min_by(|&&a, &&b| {
                let da = sq_dist(path.pixels[a], rep);
                let db = sq_dist(path.pixels[b], rep);
                da.cmp(&db).then(a.cmp(&b))
            })
            .unwrap();
        let shape1 = cum[i];
        if shape1 <= 0.0 {
            skipped += 1;
            continue;
        }
        out.push(ForkRatio {
            fork: rep,
            shape1,
            shape2: total - shape1,
            shape: (total - shape1) / shape1,
        });
    }
    out.sort_by(|a, b| a.shape1.partial_cmp(&b.shape1).unwrap());
    (out, skipped)
}

fn sq_dist(a: (usize, usize), b: (usize, usize)) -> i64 {
    let dr = a.0 as i64 - b.0 as i64;
    let dc = a.1 as i64 - b.1 as i64;
    dr * dr + dc * dc
}

/// Neck/waist flags: a flag is 1 iff any fork's shape falls inside the
/// corresponding closed interval.
pub fn shape_flags(
    ratios: &[ForkRatio],
    neck_range: (f64, f64),
    waist_range: (f64, f64),
) -> Result<(u8, u8)> {
    for (lo, hi) in [neck_range, waist_range] {
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::Config(format!("invalid shape range [{lo}, {hi}]")));
        }
    }
    let in_range = |r: (f64, f64)| ratios.iter().any(|f| f.shape >= r.0 && f.shape <= r.1);
    Ok((in_range(neck_range) as u8, in_range(waist_range) as u8))
}

/// Full feature extraction over a pruned skeleton graph.
pub fn shape_features(
    graph: &SkeletonGraph,
    neck_range: (f64, f64),
    waist_range: (f64, f64),
) -> Result<ShapeFeatures> {
    let extremal = extremal_points(graph)?;
    let (v, h, ratio) = posture_ratio(&extremal);
    let path = shortest_path(graph, extremal.top, extremal.bottom)?;
    let (ratios, skipped) = fork_ratios(graph, &path);
    let (shapeneck, shapewaist) = shape_flags(&ratios, neck_range, waist_range)?;
    Ok(ShapeFeatures {
        extremal,
        v,
        h,
        ratio,
        fork_ratios: ratios,
        shapeneck,
        shapewaist,
        skipped_forks: skipped,
    })
}
