//! Skeleton-based human-shape detection.
//!
//! Given a static background and a stream of frames, the pipeline detects
//! a foreground object by correlation-gated differencing, thins it to a
//! one-pixel skeleton, extracts posture (V/H) and fork-ratio shape
//! features along the top-to-bottom geodesic, and maps the combined score
//! to one of six alert categories, plus a movement direction across
//! frames.
//!
//! Modules follow the pipeline stages:
//! - [`imaging`]: grayscale images, correlation gate, DIFF masks,
//!   morphological cleanup, connected components.
//! - [`skeleton`]: thinning, the labeled skeleton graph, branch pruning.
//! - [`features`]: extremal endpoints, V/H, shortest paths, fork ratios.
//! - [`classify`]: scores, alert categories, movement tracking.
//! - [`synthgen`]: deterministic synthetic figures with ground truth.
//! - [`pipeline`]: per-frame orchestration and the report stream.

pub mod classify;
pub mod config;
pub mod error;
pub mod features;
pub mod imaging;
pub mod pipeline;
pub mod skeleton;
pub mod synthgen;

pub use classify::{Category, Movement, Score, TrackState};
pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use features::{ExtremalPoints, ForkRatio, ShapeFeatures};
pub use imaging::{BinaryMask, ComponentStats, GrayImage};
pub use pipeline::{DetectionReport, ReportLine};
pub use skeleton::SkeletonGraph;
