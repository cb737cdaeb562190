//! Deterministic synthetic figure generator: humanoid stick figures with
//! parametric proportions, a quadruped and rigid shapes, each with
//! closed-form ground-truth landmarks and expected feature values.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pose {
    ArmsDown,
    ArmsOut,
    SlightBend,
}

#[derive(Debug, Clone, Serialize)]
pub struct HumanoidSpec {
    pub height_px: usize,
    /// Neck joint depth as a fraction of height; expected neck shape is
    /// (1 - f) / f (= 7 at the default 0.125).
    pub neck_fraction: f64,
    /// Waist joint depth fraction; expected waist shape (1 - f) / f
    /// (~1.38 at the default 0.42).
    pub waist_fraction: f64,
    /// Total arm span as a fraction of height.
    pub arm_span_fraction: f64,
    pub limb_thickness: usize,
    pub pose: Pose,
    /// Landmark jitter amplitude in pixels; 0 disables the seed entirely.
    pub jitter_px: f64,
}

impl Default for HumanoidSpec {
    fn default() -> Self {
        Self {
            height_px: 160,
            neck_fraction: 0.125,
            waist_fraction: 0.42,
            arm_span_fraction: 0.30,
            limb_thickness: 3,
            pose: Pose::ArmsDown,
            jitter_px: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureGroundTruth {
    pub mask: BinaryMask,
    pub landmarks: BTreeMap<String, (usize, usize)>,
    pub expected_ratio_vh: f64,
    pub expected_fork_shapes: Vec<f64>,
}

impl Serialize for BinaryMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BinaryMask", 3)?;
        st.serialize_field("width", &self.width())?;
        st.serialize_field("height", &self.height())?;
        let rows: Vec<String> = (0..self.height())
            .map(|r| {
                (0..self.width())
                    .map(|c| if self.get(r, c) { '#' } else { '.' })
                    .collect()
            })
            .collect();
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

type Pt = (f64, f64); // (row, col)

struct Canvas {
    segments: Vec<(Pt, Pt, f64)>,
    disks: Vec<(Pt, f64)>,
}

impl Canvas {
    fn new() -> Self {
        Self { segments: Vec::new(), disks: Vec::new() }
    }

    fn stroke(&mut self, a: Pt, b: Pt, thickness: f64) {
        self.segments.push((a, b, thickness));
    }

    fn disk(&mut self, center: Pt, radius: f64) {
        self.disks.push((center, radius));
    }

    fn rasterize(&self, margin: f64) -> (BinaryMask, f64, f64) {
        let mut min = (f64::MAX, f64::MAX);
        let mut max = (f64::MIN, f64::MIN);
        let mut grow = |p: Pt, r: f64| {
            min.0 = min.0.min(p.0 - r);
            min.1 = min.1.min(p.1 - r);
            max.0 = max.0.max(p.0 + r);
            max.1 = max.1.max(p.1 + r);
        };
        for &(a, b, t) in &self.segments {
            grow(a, t / 2.0);
            grow(b, t / 2.0);
        }
        for &(c, r) in &self.disks {
            grow(c, r);
        }
        let off = (margin - min.0, margin - min.1);
        let height = (max.0 - min.0 + 2.0 * margin).ceil() as usize + 1;
        let width = (max.1 - min.1 + 2.0 * margin).ceil() as usize + 1;
        let mut mask = BinaryMask::new(width, height);
        for r in 0..height {
            for c in 0..width {
                let p = (r as f64 - off.0, c as f64 - off.1);
                let hit = self
                    .segments
                    .iter()
                    .any(|&(a, b, t)| dist_to_segment(p, a, b) <= t / 2.0)
                    || self.disks.iter().any(|&(ctr, rad)| dist(p, ctr) <= rad);
                if hit {
                    mask.set(r, c, true);
                }
            }
        }
        (mask, off.0, off.1)
    }
}

fn dist(a: Pt, b: Pt) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn dist_to_segment(p: Pt, a: Pt, b: Pt) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1);
    let ap = (p.0 - a.0, p.1 - a.1);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = ((ap.0 * ab.0 + ap.1 * ab.1) / len2).clamp(0.0, 1.0);
    dist(p, (a.0 + t * ab.0, a.1 + t * ab.1))
}

fn to_pixel(p: Pt, off: (f64, f64)) -> (usize, usize) {
    ((p.0 + off.0).round() as usize, (p.1 + off.1).round() as usize)
}

/// Render a humanoid stick figure. Deterministic for a given (spec, seed);
/// the seed matters only when `jitter_px > 0`.
pub fn render_humanoid(spec: &HumanoidSpec, seed: u64) -> Result<FigureGroundTruth> {
    if spec.height_px < 60 {
        return Err(Error::SpecTooSmall(format!("height {} < 60", spec.height_px)));
    }
    if spec.limb_thickness < 3 {
        return Err(Error::SpecTooSmall(format!(
            "limb thickness {} < 3",
            spec.limb_thickness
        )));
    }
    if !(spec.neck_fraction > 0.0
        && spec.neck_fraction < spec.waist_fraction
        && spec.waist_fraction < 1.0)
    {
        return Err(Error::Config(format!(
            "need 0 < neck_fraction {} < waist_fraction {} < 1",
            spec.neck_fraction, spec.waist_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |amp: f64| -> f64 {
        if spec.jitter_px > 0.0 {
            rng.gen_range(-amp..=amp)
        } else {
            0.0
        }
    };

    let h = (spec.height_px - 1) as f64;
    let t = spec.limb_thickness as f64;
    let cx = 0.0;
    let neck_row = spec.neck_fraction * h;
    let waist_row = spec.waist_fraction * h;

    let bend = match spec.pose {
        Pose::SlightBend => 0.06 * h,
        _ => 0.0,
    };
    let head_tip = (0.0 + jitter(spec.jitter_px), cx + bend + jitter(spec.jitter_px));
    let neck = (neck_row, cx + bend * 0.5);
    let waist = (waist_row, cx);

    let mut canvas = Canvas::new();
    // Trunk with a small head disk at the tip.
    canvas.stroke(head_tip, neck, t);
    canvas.stroke(neck, waist, t);
    canvas.disk(head_tip, t / 2.0 + 1.0);

    // Arms from the neck joint.
    let half_span = spec.arm_span_fraction * h / 2.0;
    let hand_row = match spec.pose {
        Pose::ArmsOut => neck_row,
        // Mostly outward with a slight drop: junctions separate quickly so
        // the thinned fork stays near the nominal neck row.
        _ => neck_row + half_span * 0.45,
    };
    let hand_l = (hand_row + jitter(spec.jitter_px), cx - half_span + jitter(spec.jitter_px));
    let hand_r = (hand_row + jitter(spec.jitter_px), cx + half_span + jitter(spec.jitter_px));
    canvas.stroke(neck, hand_l, t);
    canvas.stroke(neck, hand_r, t);

    // Legs from the waist joint to the bottom row, splayed enough that the
    // strokes separate promptly below the joint.
    let leg_drop = h - waist_row;
    let leg_spread = leg_drop * 0.25;
    let foot_l = (h + jitter(spec.jitter_px), cx - leg_spread + jitter(spec.jitter_px));
    let foot_r = (h + jitter(spec.jitter_px), cx + leg_spread + jitter(spec.jitter_px));
    canvas.stroke(waist, foot_l, t);
    canvas.stroke(waist, foot_r, t);

    let margin = t + 6.0;
    let (mask, or, oc) = canvas.rasterize(margin);
    let off = (or, oc);

    let mut landmarks = BTreeMap::new();
    landmarks.insert("head_tip".into(), to_pixel(head_tip, off));
    landmarks.insert("neck_joint".into(), to_pixel(neck, off));
    landmarks.insert("waist_joint".into(), to_pixel(waist, off));
    landmarks.insert("foot_tip".into(), to_pixel(foot_l, off));
    landmarks.insert("hand_tip_left".into(), to_pixel(hand_l, off));
    landmarks.insert("hand_tip_right".into(), to_pixel(hand_r, off));

    let expected_ratio_vh = match spec.pose {
        Pose::ArmsOut => 1.0 / spec.arm_span_fraction,
        _ => {
            let width = (2.0 * half_span).max(2.0 * leg_spread);
            h / width
        }
    };
    let expected_fork_shapes = vec![
        (1.0 - spec.neck_fraction) / spec.neck_fraction,
        (1.0 - spec.waist_fraction) / spec.waist_fraction,
    ];

    Ok(FigureGroundTruth { mask, landmarks, expected_ratio_vh, expected_fork_shapes })
}

/// Horizontal body, four legs and a raised head; V/H is well below the
/// humanoid regime by construction.
pub fn render_quadruped(body_length_px: usize, leg_length_px: usize) -> Result<FigureGroundTruth> {
    if leg_length_px < 10 || body_length_px <= leg_length_px {
        return Err(Error::SpecTooSmall(format!(
            "need body {} > legs {} >= 10",
            body_length_px, leg_length_px
        )));
    }
    let t = 3.0;
    let body = body_length_px as f64;
    let leg = leg_length_px as f64;
    let body_row = 0.0;
    let mut canvas = Canvas::new();
    canvas.stroke((body_row, 0.0), (body_row, body), t);
    // Slightly splayed leg pairs at both ends.
    for (frac, lean) in [(0.08, -0.2), (0.22, 0.2), (0.78, -0.2), (0.92, 0.2)] {
        let top = (body_row, body * frac);
        let foot = (body_row + leg, body * frac + leg * lean);
        canvas.stroke(top, foot, t);
    }
    // Head rises forward off the body.
    let head_rise = leg * 0.5;
    let head = (body_row - head_rise, body + head_rise);
    canvas.stroke((body_row, body), head, t);
    canvas.disk(head, t / 2.0 + 1.0);

    let margin = t + 6.0;
    let (mask, or, oc) = canvas.rasterize(margin);
    let off = (or, oc);
    let mut landmarks = BTreeMap::new();
    landmarks.insert("head_tip".into(), to_pixel(head, off));
    landmarks.insert("tail_tip".into(), to_pixel((body_row, 0.0), off));
    landmarks.insert("foot_tip".into(), to_pixel((body_row + leg, body * 0.08 - leg * 0.2), off));

    let expected_ratio_vh = (leg + head_rise + t) / (body + head_rise + leg * 0.2);
    Ok(FigureGroundTruth {
        mask,
        landmarks,
        expected_ratio_vh,
        expected_fork_shapes: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RigidKind {
    Box,
    CarLike,
}

/// Solid rectangle or a rectangle-with-wheels silhouette.
pub fn render_rigid(kind: RigidKind, w: usize, h: usize) -> FigureGroundTruth {
    let margin = 6usize;
    let (width, height) = match kind {
        RigidKind::Box => (w + 2 * margin, h + 2 * margin),
        RigidKind::CarLike => (w + 2 * margin, h + h / 4 + 2 * margin),
    };
    let mut mask = BinaryMask::new(width, height);
    for r in 0..h {
        for c in 0..w {
            mask.set(margin + r, margin + c, true);
        }
    }
    if kind == RigidKind::CarLike {
        let radius = (h / 4).max(2) as f64;
        for wheel_c in [margin + w / 5, margin + w - w / 5] {
            let center = ((margin + h) as f64, wheel_c as f64);
            for r in 0..height {
                for c in 0..width {
                    if dist((r as f64, c as f64), center) <= radius {
                        mask.set(r, c, true);
                    }
                }
            }
        }
    }
    let mut landmarks = BTreeMap::new();
    landmarks.insert("top_left".into(), (margin, margin));
    landmarks.insert("bottom_right".into(), (margin + h - 1, margin + w - 1));
    FigureGroundTruth {
        mask,
        landmarks,
        expected_ratio_vh: h as f64 / w as f64,
        expected_fork_shapes: Vec::new(),
    }
}

/// Integer upscale by pixel replication; used by scale-invariance checks.
pub fn upscale(mask: &BinaryMask, factor: usize) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width() * factor, mask.height() * factor);
    for (r, c) in mask.iter_foreground() {
        for dr in 0..factor {
            for dc in 0..factor {
                out.set(r * factor + dr, c * factor + dc, true);
            }
        }
    }
    out
}

/// Translate the figure inside a larger canvas.
pub fn translate(mask: &BinaryMask, dr: usize, dc: usize) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width() + dc, mask.height() + dr);
    for (r, c) in mask.iter_foreground() {
        out.set(r + dr, c + dc, true);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::connected_components;

    #[test]
    fn humanoid_is_single_component_and_deterministic() {
        let spec = HumanoidSpec::default();
        let a = render_humanoid(&spec, 1).unwrap();
        let b = render_humanoid(&spec, 99).unwrap();
        assert_eq!(a.mask, b.mask); // jitter off: seed irrelevant
        assert_eq!(connected_components(&a.mask).len(), 1);
        for &(r, c) in a.landmarks.values() {
            assert!(a.mask.get(r, c), "landmark ({r},{c}) outside foreground");
        }
    }

    #[test]
    fn humanoid_expected_values() {
        let g = render_humanoid(&HumanoidSpec::default(), 0).unwrap();
        assert!((g.expected_fork_shapes[0] - 7.0).abs() < 1e-9);
        assert!((g.expected_fork_shapes[1] - 0.58 / 0.42).abs() < 1e-9);
        assert!(g.expected_ratio_vh > 2.3);
    }

    #[test]
    fn arms_out_lowers_ratio() {
        let spec = HumanoidSpec {
            pose: Pose::ArmsOut,
            arm_span_fraction: 0.8,
            ..HumanoidSpec::default()
        };
        let g = render_humanoid(&spec, 0).unwrap();
        assert!((g.expected_ratio_vh - 1.25).abs() < 1e-9);
    }

    #[test]
    fn too_small_rejected() {
        let spec = HumanoidSpec { height_px: 40, ..HumanoidSpec::default() };
        assert!(matches!(render_humanoid(&spec, 0), Err(Error::SpecTooSmall(_))));
    }

    #[test]
    fn quadruped_low_ratio_and_preconditions() {
        let g = render_quadruped(120, 40).unwrap();
        assert!(g.expected_ratio_vh < 1.5);
        assert_eq!(connected_components(&g.mask).len(), 1);
        assert!(matches!(render_quadruped(40, 40), Err(Error::SpecTooSmall(_))));
        assert!(matches!(render_quadruped(30, 9), Err(Error::SpecTooSmall(_))));
    }

    #[test]
    fn rigid_shapes() {
        let b = render_rigid(RigidKind::Box, 100, 40);
        assert_eq!(b.mask.foreground_count(), 4000);
        let tiny = render_rigid(RigidKind::Box, 10, 10);
        assert_eq!(tiny.mask.foreground_count(), 100);
        let car = render_rigid(RigidKind::CarLike, 100, 40);
        assert!(car.mask.foreground_count() > 4000);
        assert_eq!(connected_components(&car.mask).len(), 1);
    }

    #[test]
    fn jitter_uses_seed() {
        let spec = HumanoidSpec { jitter_px: 1.5, ..HumanoidSpec::default() };
        let a = render_humanoid(&spec, 1).unwrap();
        let b = render_humanoid(&spec, 2).unwrap();
        let same = render_humanoid(&spec, 1).unwrap();
        assert_eq!(a.mask, same.mask);
        assert_ne!(a.mask, b.mask);
    }
}
