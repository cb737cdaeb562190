//! Property tests for the module-level invariants: correlation algebra,
//! DIFF monotonicity, component partitioning, thinning topology, prune
//! idempotence, classification locality and feature translation
//! invariance.

use proptest::prelude::*;

use skelscan_core::features::{shape_features, shape_flags};
use skelscan_core::imaging::{
    clean_mask, connected_components, correlation, diff_mask, BinaryMask, GrayImage,
};
use skelscan_core::skeleton::{build_graph, find_thick_block, prune, thin};
use skelscan_core::synthgen::{render_humanoid, translate, HumanoidSpec};
use skelscan_core::ForkRatio;

fn gray(width: usize, height: usize) -> impl Strategy<Value = GrayImage> {
    proptest::collection::vec(any::<u8>(), width * height)
        .prop_map(move |data| GrayImage::new(width, height, data).unwrap())
}

/// Random blob: union of disks along a random walk, always 8-connected.
fn blob(seed: u64, size: usize) -> BinaryMask {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = BinaryMask::new(size, size);
    let (mut r, mut c) = (size as f64 / 2.0, size as f64 / 2.0);
    for _ in 0..rng.gen_range(3..12) {
        let radius = rng.gen_range(2.0..size as f64 / 6.0);
        for dr in -(radius as isize)..=radius as isize {
            for dc in -(radius as isize)..=radius as isize {
                if (dr * dr + dc * dc) as f64 <= radius * radius {
                    let (rr, cc) = (r as isize + dr, c as isize + dc);
                    if rr > 0 && cc > 0 && (rr as usize) < size - 1 && (cc as usize) < size - 1 {
                        m.set(rr as usize, cc as usize, true);
                    }
                }
            }
        }
        // Step less than the disk radius so consecutive disks overlap.
        r = (r + rng.gen_range(-radius..radius)).clamp(2.0, size as f64 - 3.0);
        c = (c + rng.gen_range(-radius..radius)).clamp(2.0, size as f64 - 3.0);
    }
    m
}

proptest! {
    #[test]
    fn correlation_is_symmetric(a in gray(9, 7), b in gray(9, 7)) {
        let ab = correlation(&a, &b);
        let ba = correlation(&b, &a);
        match (ab, ba) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).abs() < 1e-12),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "symmetry broken by error on one side only"),
        }
    }

    #[test]
    fn correlation_shift_invariant(
        data in proptest::collection::vec(0u8..=150, 64),
        shift in 1u8..100,
    ) {
        // b = a + shift is an exact positive-affine transform of a.
        prop_assume!(data.iter().any(|&p| p != data[0]));
        let a = GrayImage::new(8, 8, data.clone()).unwrap();
        let b = GrayImage::new(8, 8, data.iter().map(|&p| p + shift).collect()).unwrap();
        let r = correlation(&a, &b).unwrap();
        prop_assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_bounded(a in gray(6, 6), b in gray(6, 6)) {
        if let Ok(r) = correlation(&a, &b) {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn diff_mask_monotone_in_tolerance(a in gray(12, 10), b in gray(12, 10), t in 0u8..80) {
        let loose = diff_mask(&a, &b, t.saturating_add(20)).unwrap();
        let tight = diff_mask(&a, &b, t).unwrap();
        for (r, c) in loose.iter_foreground() {
            prop_assert!(tight.get(r, c), "pixel ({r},{c}) marked at high tolerance only");
        }
    }

    #[test]
    fn components_partition_foreground(seed in any::<u64>()) {
        let m = blob(seed, 48);
        prop_assume!(m.foreground_count() > 0);
        let comps = connected_components(&m);
        let total: usize = comps.iter().map(|s| s.area).sum();
        prop_assert_eq!(total, m.foreground_count());
        // Sorted largest-first.
        prop_assert!(comps.windows(2).all(|w| w[0].area >= w[1].area));
    }

    #[test]
    fn clean_mask_never_panics(seed in any::<u64>(), open in 0usize..3, close in 0usize..3) {
        let m = blob(seed, 40);
        let _ = clean_mask(&m, open, close);
    }

    #[test]
    fn thin_preserves_component_count(seed in any::<u64>()) {
        let m = blob(seed, 56);
        prop_assume!(m.foreground_count() > 0);
        let before = connected_components(&m).len();
        let t = thin(&m).unwrap();
        prop_assert_eq!(connected_components(&t).len(), before);
        prop_assert!(find_thick_block(&t).is_none(), "2x2 block survived thinning");
    }

    #[test]
    fn prune_idempotent_and_nonempty(seed in any::<u64>()) {
        let m = blob(seed, 56);
        prop_assume!(m.foreground_count() > 0);
        let g = build_graph(&thin(&m).unwrap()).unwrap();
        let once = prune(&g, 0.15, 5.0);
        prop_assert!(once.to_mask().foreground_count() > 0);
        let twice = prune(&once, 0.15, 5.0);
        prop_assert_eq!(once.to_mask(), twice.to_mask());
    }

    #[test]
    fn features_translation_invariant(dr in 0usize..25, dc in 0usize..25) {
        let fig = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
        let base = measure(&fig.mask);
        let moved = measure(&translate(&fig.mask, dr, dc));
        prop_assert_eq!(base.0, moved.0);
        prop_assert_eq!(base.1, moved.1);
        prop_assert_eq!(base.2, moved.2);
    }

    #[test]
    fn shape_flags_monotone_in_ranges(shape in 0.1f64..10.0, widen in 0.0f64..3.0) {
        let ratios = vec![ForkRatio { fork: (0, 0), shape1: 1.0, shape2: shape, shape }];
        let (n1, w1) = shape_flags(&ratios, (5.0, 8.0), (1.0, 2.0)).unwrap();
        let (n2, w2) =
            shape_flags(&ratios, (5.0 - widen, 8.0 + widen), (1.0 - widen.min(0.9), 2.0 + widen))
                .unwrap();
        prop_assert!(n2 >= n1, "widening the neck range cleared the flag");
        prop_assert!(w2 >= w1, "widening the waist range cleared the flag");
    }
}

/// (V, H, fork shapes) through thin -> graph -> prune -> features.
fn measure(mask: &BinaryMask) -> (f64, f64, Vec<f64>) {
    let g = build_graph(&thin(mask).unwrap()).unwrap();
    let p = prune(&g, 0.15, 5.0);
    let f = shape_features(&p, (5.0, 8.0), (1.0, 2.0)).unwrap();
    (f.v, f.h, f.fork_ratios.iter().map(|r| r.shape).collect())
}

/// Classification kind is a function of the 3x3 neighborhood only.
#[test]
fn classify_kind_is_local() {
    use skelscan_core::skeleton::classify_points;
    let fig = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
    let skel = thin(&fig.mask).unwrap();
    let kinds: std::collections::HashMap<_, _> = classify_points(&skel)
        .unwrap()
        .into_iter()
        .map(|p| (p.position, p.kind))
        .collect();
    // Deleting a far-away pixel never changes a point's kind.
    let probe = *kinds.keys().min().unwrap();
    let victim = kinds
        .keys()
        .find(|&&(r, c)| r.abs_diff(probe.0).max(c.abs_diff(probe.1)) > 5)
        .copied()
        .unwrap();
    let mut edited = skel.clone();
    edited.set(victim.0, victim.1, false);
    let after: std::collections::HashMap<_, _> = classify_points(&edited)
        .unwrap()
        .into_iter()
        .map(|p| (p.position, p.kind))
        .collect();
    assert_eq!(kinds[&probe], after[&probe]);
}
