//! Geodesic shortest paths over the skeleton pixel graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::imaging::BinaryMask;

use super::graph::{step_cost, SQRT_2};

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

// Exact geodesic cost as (axial, diagonal) step counts; avoids float
// comparison ambiguity and makes tie-breaking well defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Cost {
    pub axial: u32,
    pub diagonal: u32,
}

impl Cost {
    pub const ZERO: Cost = Cost { axial: 0, diagonal: 0 };

    pub fn value(self) -> f64 {
        self.axial as f64 + self.diagonal as f64 * SQRT_2
    }

    fn step(self, diagonal: bool) -> Cost {
        if diagonal {
            Cost { axial: self.axial, diagonal: self.diagonal + 1 }
        } else {
            Cost { axial: self.axial + 1, diagonal: self.diagonal }
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        // a1 + d1*sqrt2 vs a2 + d2*sqrt2, exactly.
        let da = self.axial as i64 - other.axial as i64;
        let dd = other.diagonal as i64 - self.diagonal as i64;
        // compare da vs dd*sqrt2
        if da == dd && da == 0 {
            return Ordering::Equal;
        }
        let lhs = da as f64;
        let rhs = dd as f64 * SQRT_2;
        lhs.partial_cmp(&rhs).unwrap()
    }
}

struct HeapEntry {
    cost: Cost,
    pixel: (usize, usize),
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: invert cost, break ties by lexicographically smaller pixel.
        other
            .cost
            .cmp(&self.cost)
            .then_with(|| other.pixel.cmp(&self.pixel))
    }
}

pub(crate) struct Distances {
    pub dist: HashMap<(usize, usize), Cost>,
    pub parent: HashMap<(usize, usize), (usize, usize)>,
}

/// Dijkstra from `from` over foreground pixels, axial cost 1, diagonal
/// sqrt(2). Deterministic: equal-cost pixels settle in lexicographic order
/// and a settled pixel's parent is the first relaxation that achieved its
/// final cost.
pub(crate) fn dijkstra(mask: &BinaryMask, from: (usize, usize)) -> Distances {
    let mut dist: HashMap<(usize, usize), Cost> = HashMap::new();
    let mut parent = HashMap::new();
    let mut settled: HashMap<(usize, usize), ()> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(from, Cost::ZERO);
    heap.push(HeapEntry { cost: Cost::ZERO, pixel: from });
    while let Some(HeapEntry { cost, pixel }) = heap.pop() {
        if settled.contains_key(&pixel) {
            continue;
        }
        settled.insert(pixel, ());
        for (dr, dc) in NEIGHBORS_8 {
            let (nr, nc) = (pixel.0 as isize + dr, pixel.1 as isize + dc);
            if !mask.get_checked(nr, nc) {
                continue;
            }
            let n = (nr as usize, nc as usize);
            let ncost = cost.step(dr != 0 && dc != 0);
            let better = match dist.get(&n) {
                None => true,
                Some(&d) => ncost < d,
            };
            if better {
                dist.insert(n, ncost);
                parent.insert(n, pixel);
                heap.push(HeapEntry { cost: ncost, pixel: n });
            }
        }
    }
    Distances { dist, parent }
}

pub(crate) fn reconstruct(d: &Distances, from: (usize, usize), to: (usize, usize)) -> Vec<(usize, usize)> {
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = d.parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Consistency check used in tests: path cost recomputed from steps.
#[allow(dead_code)]
pub(crate) fn recost(path: &[(usize, usize)]) -> f64 {
    path.windows(2).map(|w| step_cost(w[0], w[1])).sum()
}
