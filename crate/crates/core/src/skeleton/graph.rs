//! Labeled skeleton graph: endpoints, fork clusters and traced branches.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

use super::thin::find_thick_block;

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointKind {
    Endpoint,
    Regular,
    Fork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SkeletonPoint {
    pub position: (usize, usize),
    pub degree: u8,
    pub kind: PointKind,
}

/// A terminal of the graph: an endpoint pixel, a merged cluster of fork
/// pixels, or the anchor pixel of an isolated cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub kind: NodeKind,
    /// Representative pixel; for fork clusters the member nearest the
    /// cluster centroid.
    pub pixel: (usize, usize),
    /// All member pixels (singleton except for merged fork clusters).
    pub pixels: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Endpoint,
    Fork,
    CycleAnchor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub a: usize,
    pub b: usize,
    /// Pixels from a terminal pixel of `a` to a terminal pixel of `b`,
    /// consecutive entries 8-adjacent, interior pixels Regular.
    pub path: Vec<(usize, usize)>,
    /// Axial steps cost 1, diagonal steps sqrt(2).
    pub geodesic_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonGraph {
    pub width: usize,
    pub height: usize,
    pub points: Vec<SkeletonPoint>,
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    /// Branch indices incident to each node, parallel to `nodes`.
    pub adjacency: Vec<Vec<usize>>,
    #[serde(skip)]
    point_index: HashMap<(usize, usize), usize>,
    #[serde(skip)]
    node_of_pixel: HashMap<(usize, usize), usize>,
}

impl SkeletonGraph {
    pub fn contains(&self, p: (usize, usize)) -> bool {
        self.point_index.contains_key(&p)
    }

    pub fn point(&self, p: (usize, usize)) -> Option<&SkeletonPoint> {
        self.point_index.get(&p).map(|&i| &self.points[i])
    }

    /// Node owning a terminal pixel (endpoint / fork-cluster member).
    pub fn node_at(&self, p: (usize, usize)) -> Option<usize> {
        self.node_of_pixel.get(&p).copied()
    }

    pub fn endpoints(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Endpoint)
    }

    pub fn to_mask(&self) -> BinaryMask {
        let mut m = BinaryMask::new(self.width, self.height);
        for p in &self.points {
            m.set(p.position.0, p.position.1, true);
        }
        m
    }
}

pub fn step_cost(a: (usize, usize), b: (usize, usize)) -> f64 {
    if a.0 != b.0 && a.1 != b.1 {
        SQRT_2
    } else {
        1.0
    }
}

pub fn path_length(path: &[(usize, usize)]) -> f64 {
    path.windows(2).map(|w| step_cost(w[0], w[1])).sum()
}

fn neighbors(mask: &BinaryMask, p: (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(8);
    for (dr, dc) in NEIGHBORS_8 {
        let (nr, nc) = (p.0 as isize + dr, p.1 as isize + dc);
        if mask.get_checked(nr, nc) {
            out.push((nr as usize, nc as usize));
        }
    }
    out
}

/// Classify every skeleton pixel by its 8-neighborhood degree.
/// An isolated pixel (degree 0) is treated as an endpoint.
pub fn classify_points(skeleton: &BinaryMask) -> Result<Vec<SkeletonPoint>> {
    if let Some((r, c)) = find_thick_block(skeleton) {
        return Err(Error::NotThin(r, c));
    }
    Ok(skeleton
        .iter_foreground()
        .map(|p| {
            let degree = neighbors(skeleton, p).len() as u8;
            let kind = match degree {
                0 | 1 => PointKind::Endpoint,
                2 => PointKind::Regular,
                _ => PointKind::Fork,
            };
            SkeletonPoint { position: p, degree, kind }
        })
        .collect())
}

/// Build the labeled graph from a thin skeleton mask.
///
/// 8-adjacent fork pixels merge into one Fork node; isolated cycles become
/// a single self-loop branch anchored at their lexicographically smallest
/// pixel.
pub fn build_graph(skeleton: &BinaryMask) -> Result<SkeletonGraph> {
    let points = classify_points(skeleton)?;
    if points.is_empty() {
        return Err(Error::EmptyMask);
    }
    let point_index: HashMap<_, _> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.position, i))
        .collect();
    let kind_of = |p: (usize, usize)| points[point_index[&p]].kind;

    // Terminal nodes: endpoints as singletons, fork pixels clustered.
    let mut nodes: Vec<Node> = Vec::new();
    let mut node_of_pixel: HashMap<(usize, usize), usize> = HashMap::new();
    for pt in &points {
        if pt.kind == PointKind::Endpoint {
            node_of_pixel.insert(pt.position, nodes.len());
            nodes.push(Node {
                kind: NodeKind::Endpoint,
                pixel: pt.position,
                pixels: vec![pt.position],
            });
        }
    }
    for pt in &points {
        if pt.kind != PointKind::Fork || node_of_pixel.contains_key(&pt.position) {
            continue;
        }
        // Flood the fork cluster.
        let mut cluster = vec![pt.position];
        let mut stack = vec![pt.position];
        while let Some(p) = stack.pop() {
            for n in neighbors(skeleton, p) {
                if kind_of(n) == PointKind::Fork && !cluster.contains(&n) {
                    cluster.push(n);
                    stack.push(n);
                }
            }
        }
        cluster.sort_unstable();
        let centroid = (
            cluster.iter().map(|p| p.0 as f64).sum::<f64>() / cluster.len() as f64,
            cluster.iter().map(|p| p.1 as f64).sum::<f64>() / cluster.len() as f64,
        );
        let rep = *cluster
            .iter()
            .min_by(|a, b| {
                let da = (a.0 as f64 - centroid.0).powi(2) + (a.1 as f64 - centroid.1).powi(2);
                let db = (b.0 as f64 - centroid.0).powi(2) + (b.1 as f64 - centroid.1).powi(2);
                da.partial_cmp(&db).unwrap().then(a.cmp(b))
            })
            .unwrap();
        let id = nodes.len();
        for &p in &cluster {
            node_of_pixel.insert(p, id);
        }
        nodes.push(Node { kind: NodeKind::Fork, pixel: rep, pixels: cluster });
    }

    // Trace branches outward from every terminal pixel.
    let mut branches: Vec<Branch> = Vec::new();
    let mut interior_used: HashMap<(usize, usize), ()> = HashMap::new();
    let mut direct_edges: BTreeMap<((usize, usize), (usize, usize)), ()> = BTreeMap::new();
    let mut terminal_pixels: Vec<(usize, usize)> = node_of_pixel.keys().copied().collect();
    terminal_pixels.sort_unstable();
    for &start in &terminal_pixels {
        let start_node = node_of_pixel[&start];
        for next in neighbors(skeleton, start) {
            if let Some(&n_node) = node_of_pixel.get(&next) {
                // Zero-interior branch between two adjacent terminals.
                if n_node == start_node {
                    continue; // same cluster
                }
                let key = if start < next { (start, next) } else { (next, start) };
                if direct_edges.insert(key, ()).is_none() {
                    let path = vec![start, next];
                    let geodesic_length = path_length(&path);
                    push_branch(&mut branches, start_node, n_node, path, geodesic_length);
                }
                continue;
            }
            if interior_used.contains_key(&next) {
                continue;
            }
            // Walk the regular chain.
            let mut path = vec![start, next];
            let mut prev = start;
            let mut cur = next;
            loop {
                interior_used.insert(cur, ());
                let nbrs = neighbors(skeleton, cur);
                // A regular pixel has exactly two neighbors; continue away
                // from where we came. Terminal-cluster neighbors end the walk.
                let mut next_px = None;
                for n in &nbrs {
                    if *n == prev {
                        continue;
                    }
                    if node_of_pixel.contains_key(n) {
                        next_px = Some(*n);
                        break;
                    }
                    if next_px.is_none() {
                        next_px = Some(*n);
                    }
                }
                let n = match next_px {
                    Some(n) => n,
                    None => break, // dead end: degenerate chain, treated below
                };
                path.push(n);
                if node_of_pixel.contains_key(&n) {
                    break;
                }
                prev = cur;
                cur = n;
            }
            let end = *path.last().unwrap();
            if let Some(&end_node) = node_of_pixel.get(&end) {
                let geodesic_length = path_length(&path);
                push_branch(&mut branches, start_node, end_node, path, geodesic_length);
            }
        }
        // Isolated single pixel: zero-length self branch.
        if neighbors(skeleton, start).is_empty() {
            push_branch(&mut branches, start_node, start_node, vec![start], 0.0);
        }
    }

    // Remaining regular pixels belong to terminal-free cycles.
    let mut visited_cycle: HashMap<(usize, usize), ()> = HashMap::new();
    let mut cycle_starts: Vec<(usize, usize)> = points
        .iter()
        .filter(|p| p.kind == PointKind::Regular)
        .map(|p| p.position)
        .filter(|p| !interior_used.contains_key(p))
        .collect();
    cycle_starts.sort_unstable();
    for anchor in cycle_starts {
        if visited_cycle.contains_key(&anchor) {
            continue;
        }
        let mut path = vec![anchor];
        visited_cycle.insert(anchor, ());
        let mut prev = anchor;
        let mut cur = *neighbors(skeleton, anchor).first().unwrap();
        while cur != anchor {
            visited_cycle.insert(cur, ());
            path.push(cur);
            let n = neighbors(skeleton, cur)
                .into_iter()
                .find(|&n| n != prev)
                .unwrap();
            prev = cur;
            cur = n;
        }
        path.push(anchor);
        let id = nodes.len();
        node_of_pixel.insert(anchor, id);
        nodes.push(Node { kind: NodeKind::CycleAnchor, pixel: anchor, pixels: vec![anchor] });
        let geodesic_length = path_length(&path);
        push_branch(&mut branches, id, id, path, geodesic_length);
    }

    let mut adjacency = vec![Vec::new(); nodes.len()];
    for (i, b) in branches.iter().enumerate() {
        adjacency[b.a].push(i);
        if b.b != b.a {
            adjacency[b.b].push(i);
        }
    }

    Ok(SkeletonGraph {
        width: skeleton.width(),
        height: skeleton.height(),
        points,
        nodes,
        branches,
        adjacency,
        point_index,
        node_of_pixel,
    })
}

fn push_branch(
    branches: &mut Vec<Branch>,
    a: usize,
    b: usize,
    path: Vec<(usize, usize)>,
    geodesic_length: f64,
) {
    branches.push(Branch { a, b, path, geodesic_length });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let mut m = BinaryMask::new(w, h);
        for (r, row) in rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                if ch == '#' {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[test]
    fn straight_line_classification() {
        let m = mask_from(&["#####"]);
        let pts = classify_points(&m).unwrap();
        let endpoints = pts.iter().filter(|p| p.kind == PointKind::Endpoint).count();
        let regular = pts.iter().filter(|p| p.kind == PointKind::Regular).count();
        assert_eq!((endpoints, regular), (2, 3));
    }

    #[test]
    fn y_junction_single_fork_degree_3() {
        // Diagonal arms meet at one pixel: junction degree is exactly 3.
        let m = mask_from(&[
            "#...#",
            ".#.#.",
            "..#..",
            "..#..",
            "..#..",
        ]);
        let pts = classify_points(&m).unwrap();
        assert_eq!(pts.iter().filter(|p| p.kind == PointKind::Endpoint).count(), 3);
        let forks: Vec<_> = pts.iter().filter(|p| p.kind == PointKind::Fork).collect();
        assert_eq!(forks.len(), 1);
        assert_eq!(forks[0].degree, 3);
    }

    #[test]
    fn x_junction_single_fork_degree_4() {
        let m = mask_from(&[
            "#...#",
            ".#.#.",
            "..#..",
            ".#.#.",
            "#...#",
        ]);
        let pts = classify_points(&m).unwrap();
        assert_eq!(pts.iter().filter(|p| p.kind == PointKind::Endpoint).count(), 4);
        let forks: Vec<_> = pts.iter().filter(|p| p.kind == PointKind::Fork).collect();
        assert_eq!(forks.len(), 1);
        assert_eq!(forks[0].degree, 4);
        assert_eq!(forks[0].position, (2, 2));
    }

    #[test]
    fn axial_t_junction_merges_into_one_fork_node() {
        // An axial T creates a cluster of degree>=3 pixels under
        // 8-adjacency; graph construction merges it into one Fork node.
        let m = mask_from(&[
            "#####",
            "..#..",
            "..#..",
            "..#..",
        ]);
        let g = build_graph(&m).unwrap();
        let forks: Vec<_> = g.nodes.iter().filter(|n| n.kind == NodeKind::Fork).collect();
        assert_eq!(forks.len(), 1);
        assert_eq!(g.endpoints().count(), 3);
        assert_eq!(g.branches.len(), 3);
    }

    #[test]
    fn not_thin_rejected() {
        let m = mask_from(&["##", "##"]);
        assert!(matches!(classify_points(&m), Err(Error::NotThin(0, 0))));
    }

    #[test]
    fn line_graph_single_branch() {
        let m = mask_from(&["########"]);
        let g = build_graph(&m).unwrap();
        assert_eq!(g.branches.len(), 1);
        assert_eq!(g.endpoints().count(), 2);
        let b = &g.branches[0];
        assert_eq!(b.path.len(), 8);
        assert!((b.geodesic_length - 7.0).abs() < 1e-9);
    }

    #[test]
    fn t_shape_graph_three_branches() {
        // arms 10, 10 along the bar, 20 down the stem
        let mut rows = vec!["#####################".to_string()];
        for _ in 0..20 {
            rows.push(format!("{}#{}", ".".repeat(10), ".".repeat(10)));
        }
        let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
        let g = build_graph(&mask_from(&refs)).unwrap();
        assert_eq!(g.branches.len(), 3);
        assert_eq!(g.endpoints().count(), 3);
        let fork_nodes: Vec<_> = g.nodes.iter().filter(|n| n.kind == NodeKind::Fork).collect();
        assert_eq!(fork_nodes.len(), 1);
        let mut lens: Vec<f64> = g.branches.iter().map(|b| b.geodesic_length).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((lens[0] - 10.0).abs() <= 1.0);
        assert!((lens[1] - 10.0).abs() <= 1.0);
        assert!((lens[2] - 20.0).abs() <= 1.0);
    }

    #[test]
    fn ring_is_single_self_loop() {
        let m = mask_from(&[
            ".##.",
            "#..#",
            "#..#",
            ".##.",
        ]);
        let g = build_graph(&m).unwrap();
        assert_eq!(g.branches.len(), 1);
        assert_eq!(g.endpoints().count(), 0);
        let b = &g.branches[0];
        assert_eq!(b.a, b.b);
        assert_eq!(b.path.first(), b.path.last());
    }

    #[test]
    fn branch_partition_reconstructs_pixels() {
        let mut rows = vec!["#########".to_string()];
        for _ in 0..6 {
            rows.push(format!("{}#{}", ".".repeat(4), ".".repeat(4)));
        }
        let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
        let m = mask_from(&refs);
        let g = build_graph(&m).unwrap();
        let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
        for b in &g.branches {
            for &p in &b.path {
                seen.insert(p);
            }
        }
        for n in &g.nodes {
            for &p in &n.pixels {
                seen.insert(p);
            }
        }
        let all: std::collections::HashSet<(usize, usize)> = m.iter_foreground().collect();
        assert_eq!(seen, all);
        // interiors exclusive
        let mut interior_count: HashMap<(usize, usize), usize> = HashMap::new();
        for b in &g.branches {
            if b.path.len() > 2 {
                for &p in &b.path[1..b.path.len() - 1] {
                    if g.node_at(p).is_none() {
                        *interior_count.entry(p).or_default() += 1;
                    }
                }
            }
        }
        assert!(interior_count.values().all(|&n| n == 1));
    }
}
