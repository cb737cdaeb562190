//! End-to-end per-frame analysis and the frame-stream pipeline.
//!
//! `analyze_frame` is pure and safe to run on frames in parallel; the
//! movement tracker is applied afterwards in strict frame order by
//! `finish_report`, so parallel and sequential schedules produce
//! identical report streams.

use serde::Serialize;

use crate::classify::{
    final_score, map_category, possibility_flag, shape_pos_score, Category, Movement, Score,
    TrackParams, TrackState,
};
use crate::config::PipelineConfig;
use crate::error::Result;
use crate::features::shape_features;
use crate::imaging::{
    change_detected, clean_mask, correlation, diff_mask, largest_object, GrayImage,
};
use crate::skeleton::{build_graph, prune, thin};

#[derive(Debug, Clone, Serialize, Default)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub background: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_area: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_components: Option<usize>,
    /// V/H ratio when finite; an H of zero is reported via `ratio_infinite`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_vh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_infinite: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fork_shapes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_forks: Option<usize>,
    /// Set when change was detected but no component reached min_area.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_object: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movement_alert: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_ms: Option<Vec<(String, f64)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub frame_id: u64,
    pub changed: bool,
    pub possibility: u8,
    pub shapeneck: u8,
    pub shapewaist: u8,
    pub shape_pos: Score,
    pub final_score: Score,
    pub category: Category,
    pub centroid: Option<(f64, f64)>,
    pub bbox: Option<(usize, usize, usize, usize)>,
    pub movement: Movement,
    pub diagnostics: Diagnostics,
}

/// One output line of the stream: a report or a per-frame error record.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ReportLine {
    Report(DetectionReport),
    Error { frame_id: u64, error: String },
}

/// Per-frame analysis before tracking: everything except `movement`.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub report: DetectionReport,
    /// Present when an object was isolated; feeds the tracker.
    pub track_obs: Option<((f64, f64), f64)>,
}

/// Analyze one frame against the backgrounds. The best-correlating
/// background gates the change decision. Movement is left as `None`.
pub fn analyze_frame(
    backgrounds: &[GrayImage],
    frame: &GrayImage,
    frame_id: u64,
    cfg: &PipelineConfig,
    timing: bool,
) -> Result<FrameAnalysis> {
    cfg.validate()?;
    let mut diag = Diagnostics::default();
    let mut stages: Vec<(String, f64)> = Vec::new();
    let clock = std::time::Instant::now();
    let mark = |stages: &mut Vec<(String, f64)>, name: &str, t0: f64| -> f64 {
        let now = clock.elapsed().as_secs_f64() * 1e3;
        if timing {
            stages.push((name.to_string(), now - t0));
        }
        now
    };
    let mut t0 = 0.0;

    // Pick the background with the highest correlation to this frame.
    let mut best = 0usize;
    let mut best_r = f64::NEG_INFINITY;
    for (i, bg) in backgrounds.iter().enumerate() {
        match correlation(bg, frame) {
            Ok(r) if r > best_r => {
                best_r = r;
                best = i;
            }
            _ => {}
        }
    }
    let background = &backgrounds[best];
    diag.background = Some(best);
    if best_r.is_finite() {
        diag.correlation = Some(best_r);
    }
    let changed = change_detected(background, frame, cfg.r_threshold)?;
    t0 = mark(&mut stages, "change_gate", t0);

    let no_change = |mut diag: Diagnostics, stages: Vec<(String, f64)>| {
        if timing {
            diag.stage_ms = Some(stages);
        }
        FrameAnalysis {
            report: DetectionReport {
                frame_id,
                changed,
                possibility: 0,
                shapeneck: 0,
                shapewaist: 0,
                shape_pos: Score(0),
                final_score: Score(0),
                category: Category::NoChange,
                centroid: None,
                bbox: None,
                movement: Movement::None,
                diagnostics: diag,
            },
            track_obs: None,
        }
    };

    if !changed {
        return Ok(no_change(diag, stages));
    }

    let raw = diff_mask(background, frame, cfg.intensity_tolerance)?;
    let cleaned = clean_mask(&raw, cfg.open_radius, cfg.close_radius);
    t0 = mark(&mut stages, "diff", t0);
    let (object, stats, extra) = match largest_object(&cleaned, cfg.min_area) {
        Some(x) => x,
        None => {
            diag.no_object = Some(true);
            return Ok(no_change(diag, stages));
        }
    };
    diag.object_area = Some(stats.area);
    diag.extra_components = Some(extra);
    t0 = mark(&mut stages, "object", t0);

    let skeleton = thin(&object)?;
    let graph = build_graph(&skeleton)?;
    let pruned = prune(&graph, cfg.prune_relative, cfg.prune_absolute);
    t0 = mark(&mut stages, "skeleton", t0);

    let features = shape_features(&pruned, cfg.neck_range, cfg.waist_range)?;
    if features.ratio.is_finite() {
        diag.ratio_vh = Some(features.ratio);
    } else {
        diag.ratio_infinite = Some(true);
    }
    diag.fork_shapes = Some(features.fork_ratios.iter().map(|f| f.shape).collect());
    if features.skipped_forks > 0 {
        diag.skipped_forks = Some(features.skipped_forks);
    }
    let in_upper = cfg.ratio_upper.map_or(true, |hi| features.ratio <= hi);
    let possibility = if in_upper {
        possibility_flag(features.ratio, cfg.ratio_threshold)
    } else {
        0
    };
    let shape_pos = shape_pos_score(features.shapeneck, features.shapewaist);
    let score = final_score(possibility, shape_pos);
    let category = map_category(score)?;
    mark(&mut stages, "features", t0);
    if timing {
        diag.stage_ms = Some(stages);
    }

    Ok(FrameAnalysis {
        report: DetectionReport {
            frame_id,
            changed,
            possibility,
            shapeneck: features.shapeneck,
            shapewaist: features.shapewaist,
            shape_pos,
            final_score: score,
            category,
            centroid: Some(stats.centroid),
            bbox: Some(stats.bbox),
            movement: Movement::None,
            diagnostics: diag,
        },
        track_obs: Some((stats.centroid, stats.bbox_area() as f64)),
    })
}

/// Apply the tracker to an analysis, in frame order.
pub fn finish_report(
    analysis: FrameAnalysis,
    tracker: &mut TrackState,
    cfg: &PipelineConfig,
) -> Result<DetectionReport> {
    let mut report = analysis.report;
    if let Some((centroid, area)) = analysis.track_obs {
        report.movement = tracker.update(report.frame_id, centroid, area)?;
        let alert = cfg.alert_directions.contains(&report.movement);
        if alert {
            report.diagnostics.movement_alert = Some(true);
        }
    }
    Ok(report)
}

pub fn tracker(cfg: &PipelineConfig) -> TrackState {
    TrackState::new(TrackParams {
        window: cfg.track_window,
        epsilon_col: cfg.epsilon_col,
        epsilon_area: cfg.epsilon_area,
    })
}

/// Sequential pipeline over decoded frames. Frame decode errors become
/// in-stream error records and do not stop the run.
pub fn run_pipeline(
    backgrounds: &[GrayImage],
    frames: impl IntoIterator<Item = (u64, Result<GrayImage>)>,
    cfg: &PipelineConfig,
) -> Vec<ReportLine> {
    let mut track = tracker(cfg);
    let mut out = Vec::new();
    for (frame_id, frame) in frames {
        let line = match frame.and_then(|f| analyze_frame(backgrounds, &f, frame_id, cfg, false)) {
            Ok(analysis) => match finish_report(analysis, &mut track, cfg) {
                Ok(report) => ReportLine::Report(report),
                Err(e) => ReportLine::Error { frame_id, error: e.to_string() },
            },
            Err(e) => ReportLine::Error { frame_id, error: e.to_string() },
        };
        out.push(line);
    }
    out
}
