//! Iterative thinning to a one-pixel-wide skeleton.
//!
//! Sequential raster-order variant with two directional subiterations per
//! round (north/west borders first, then south/east). A pixel is removed
//! only if it is a simple point (its removal preserves both foreground
//! 8-connectivity and background 4-connectivity in the 3x3 neighborhood)
//! and it is not an endpoint, so component count and topology are
//! preserved by construction. The result is deterministic for any input.

use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// Ring neighbors in clockwise order starting at north: used by the
/// simple-point test, which needs the circular adjacency of the 3x3 ring.
const RING: [(isize, isize); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

fn ring_bits(mask: &BinaryMask, r: usize, c: usize) -> u8 {
    let mut bits = 0u8;
    for (i, (dr, dc)) in RING.iter().enumerate() {
        if mask.get_checked(r as isize + dr, c as isize + dc) {
            bits |= 1 << i;
        }
    }
    bits
}

fn degree(bits: u8) -> u32 {
    bits.count_ones()
}

/// Number of 8-connected groups of foreground pixels around the ring.
fn foreground_groups(bits: u8) -> u32 {
    if bits == 0 {
        return 0;
    }
    // Two ring cells are 8-adjacent iff they are circularly consecutive,
    // or they are the two axial cells flanking a diagonal (e.g. N and E
    // are diagonal neighbors of each other even when NE is background).
    // Union-find over the eight cells captures both cases; counting ring
    // transitions alone would miss the flanking-axial bridges.
    let mut parent: [u8; 8] = [0, 1, 2, 3, 4, 5, 6, 7];
    fn find(parent: &mut [u8; 8], i: u8) -> u8 {
        let mut i = i;
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    let union = |parent: &mut [u8; 8], a: u8, b: u8| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        parent[ra as usize] = rb;
    };
    for i in 0..8u8 {
        if bits >> i & 1 == 0 {
            continue;
        }
        let next = (i + 1) % 8;
        if bits >> next & 1 == 1 {
            union(&mut parent, i, next);
        }
        if i % 2 == 0 {
            let axial = (i + 2) % 8;
            if bits >> axial & 1 == 1 {
                union(&mut parent, i, axial);
            }
        }
    }
    (0..8u8)
        .filter(|&i| bits >> i & 1 == 1 && find(&mut parent, i) == i)
        .count() as u32
}

/// Number of 4-connected background groups touching the center 4-adjacently.
fn background_4_groups(bits: u8) -> u32 {
    // Background pixels on the ring are 4-connected to each other only
    // through axial positions or via a shared axial-diagonal step; within a
    // 3x3 ring two background cells are 4-adjacent iff they are circularly
    // consecutive and one of them is axial... walk runs of consecutive
    // background cells; each run containing at least one axial cell (even
    // index) counts as one group.
    let bg = !bits;
    let axial = 0b01010101u8; // indices 0,2,4,6
    if bg & axial == 0 {
        return 0;
    }
    if bg == 0xff {
        return 1;
    }
    let mut groups = 0;
    let mut in_run = false;
    let mut run_has_axial = false;
    // Start the circular walk at a foreground cell so runs are not split.
    let start = (0..8).find(|&i| bits >> i & 1 == 1).unwrap();
    for k in 0..8 {
        let i = (start + k) % 8;
        if bg >> i & 1 == 1 {
            in_run = true;
            if i % 2 == 0 {
                run_has_axial = true;
            }
        } else {
            if in_run && run_has_axial {
                groups += 1;
            }
            in_run = false;
            run_has_axial = false;
        }
    }
    if in_run && run_has_axial {
        groups += 1;
    }
    groups
}

/// Simple-point test on the 3x3 ring.
pub(crate) fn is_simple(bits: u8) -> bool {
    foreground_groups(bits) == 1 && background_4_groups(bits) == 1
}

/// Thin the mask until no further pixel can be removed.
///
/// Each round runs four directional subiterations (north, south, west,
/// east borders). Border membership is frozen at the start of a
/// subiteration so only one boundary layer peels per direction and the
/// skeleton stays centered; the simple-point test is re-evaluated on the
/// live image before each deletion so topology is never broken.
pub fn thin(mask: &BinaryMask) -> Result<BinaryMask> {
    if mask.foreground_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let mut m = mask.clone();
    let (w, h) = (m.width(), m.height());
    const DIRS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut changed = false;
        for (dr, dc) in DIRS {
            candidates.clear();
            for r in 0..h {
                for c in 0..w {
                    if m.get(r, c) && !m.get_checked(r as isize + dr, c as isize + dc) {
                        candidates.push((r, c));
                    }
                }
            }
            // Process the layer outermost-first along the peel direction;
            // otherwise a protrusion tip loses its flanking neighbors
            // before its own turn and gets frozen as a spurious endpoint.
            candidates.sort_unstable_by_key(|&(r, c)| {
                let depth = r as isize * dr + c as isize * dc;
                (std::cmp::Reverse(depth), r, c)
            });
            for &(r, c) in &candidates {
                let bits = ring_bits(&m, r, c);
                if degree(bits) <= 1 {
                    continue; // endpoint or isolated pixel
                }
                if is_simple(bits) {
                    m.set(r, c, false);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(m)
}

/// Location of the first 2x2 all-foreground block, if any.
pub fn find_thick_block(mask: &BinaryMask) -> Option<(usize, usize)> {
    for r in 0..mask.height().saturating_sub(1) {
        for c in 0..mask.width().saturating_sub(1) {
            if mask.get(r, c) && mask.get(r, c + 1) && mask.get(r + 1, c) && mask.get(r + 1, c + 1)
            {
                return Some((r, c));
            }
        }
    }
    None
}
