//! Final score assembly, alert categories and movement tracking.

use std::collections::VecDeque;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Score in integer tenths so table lookups are exact: legal final values
/// are {0, 4, 8, 10, 14, 18} tenths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Score(pub u32);

impl Score {
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

/// possibility = 1 iff the V/H ratio strictly exceeds the threshold.
/// The infinite sentinel (H = 0) always passes.
pub fn possibility_flag(ratio: f64, threshold: f64) -> u8 {
    (ratio > threshold) as u8
}

/// 0 if neither flag set, 0.4 if exactly one, 0.8 if both.
pub fn shape_pos_score(shapeneck: u8, shapewaist: u8) -> Score {
    Score(4 * (shapeneck + shapewaist) as u32)
}

pub fn final_score(possibility: u8, shape_pos: Score) -> Score {
    Score(10 * possibility as u32 + shape_pos.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Category {
    NoChange,
    ChangeNotHuman,
    AlertProbablyNotHuman,
    AlertMostProbablyHuman,
    AlertHuman,
    AlertDefiniteHuman,
}

impl Category {
    /// Alerts are generated from 0.8 upward.
    pub fn is_alert(self) -> bool {
        !matches!(self, Category::NoChange | Category::ChangeNotHuman)
    }
}

pub fn map_category(score: Score) -> Result<Category> {
    Ok(match score.0 {
        0 => Category::NoChange,
        4 => Category::ChangeNotHuman,
        8 => Category::AlertProbablyNotHuman,
        10 => Category::AlertMostProbablyHuman,
        14 => Category::AlertHuman,
        18 => Category::AlertDefiniteHuman,
        other => return Err(Error::InvalidScore(other)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Movement {
    None,
    Left,
    Right,
    Approaching,
    Receding,
    Stationary,
}

#[derive(Debug, Clone, Copy)]
pub struct TrackParams {
    /// Observations kept (frames of context).
    pub window: usize,
    /// Mean column velocity (px/frame) beyond which Left/Right fires.
    pub epsilon_col: f64,
    /// Relative bbox-area growth rate (per frame) beyond which
    /// Approaching/Receding fires.
    pub epsilon_area: f64,
}

impl Default for TrackParams {
    fn default() -> Self {
        Self { window: 10, epsilon_col: 2.0, epsilon_area: 0.05 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Observation {
    frame_id: u64,
    centroid_col: f64,
    bbox_area: f64,
}

/// Movement tracker over a bounded history of object observations.
/// Strictly one object stream; frame ids must increase.
#[derive(Debug, Clone)]
pub struct TrackState {
    params: TrackParams,
    history: VecDeque<Observation>,
}

impl TrackState {
    pub fn new(params: TrackParams) -> Self {
        Self { params, history: VecDeque::new() }
    }

    pub fn update(&mut self, frame_id: u64, centroid: (f64, f64), bbox_area: f64) -> Result<Movement> {
        if let Some(last) = self.history.back() {
            if frame_id <= last.frame_id {
                return Err(Error::NonMonotoneFrameId(frame_id, last.frame_id));
            }
        }
        self.history.push_back(Observation { frame_id, centroid_col: centroid.1, bbox_area });
        while self.history.len() > self.params.window {
            self.history.pop_front();
        }
        Ok(self.movement())
    }

    fn movement(&self) -> Movement {
        if self.history.len() < 2 {
            return Movement::None;
        }
        let first = self.history.front().unwrap();
        let last = self.history.back().unwrap();
        let frames = (last.frame_id - first.frame_id) as f64;
        let col_velocity = (last.centroid_col - first.centroid_col) / frames;
        if col_velocity <= -self.params.epsilon_col {
            return Movement::Left;
        }
        if col_velocity >= self.params.epsilon_col {
            return Movement::Right;
        }
        if first.bbox_area > 0.0 && last.bbox_area > 0.0 {
            // Geometric mean growth per frame.
            let growth = (last.bbox_area / first.bbox_area).powf(1.0 / frames) - 1.0;
            if growth >= self.params.epsilon_area {
                return Movement::Approaching;
            }
            if growth <= -self.params.epsilon_area {
                return Movement::Receding;
            }
        }
        Movement::Stationary
    }
}
