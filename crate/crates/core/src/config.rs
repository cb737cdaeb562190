//! Pipeline configuration with the method's constants as defaults.

use serde::{Deserialize, Serialize};

use crate::classify::Movement;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Correlation gate: a frame counts as changed below this value.
    pub r_threshold: f64,
    /// DIFF tolerance; 0 marks every non-zero pixel difference.
    pub intensity_tolerance: u8,
    pub open_radius: usize,
    pub close_radius: usize,
    /// Smallest component area accepted as an object.
    pub min_area: usize,
    pub prune_relative: f64,
    pub prune_absolute: f64,
    /// V/H ratio above which possibility = 1.
    pub ratio_threshold: f64,
    /// Optional upper bound on the V/H ratio (none by default).
    pub ratio_upper: Option<f64>,
    pub neck_range: (f64, f64),
    pub waist_range: (f64, f64),
    pub track_window: usize,
    pub epsilon_col: f64,
    pub epsilon_area: f64,
    /// Movement directions that raise a movement alert.
    pub alert_directions: Vec<Movement>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            r_threshold: 0.95,
            intensity_tolerance: 25,
            open_radius: 1,
            close_radius: 2,
            min_area: 200,
            prune_relative: 0.15,
            prune_absolute: 5.0,
            ratio_threshold: 2.3,
            ratio_upper: None,
            neck_range: (5.0, 8.0),
            waist_range: (1.0, 2.0),
            track_window: 10,
            epsilon_col: 2.0,
            epsilon_area: 0.05,
            alert_directions: vec![Movement::Approaching],
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0 < self.r_threshold && self.r_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "r_threshold {} outside (-1, 1]",
                self.r_threshold
            )));
        }
        for (name, (lo, hi)) in [("neck_range", self.neck_range), ("waist_range", self.waist_range)]
        {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::Config(format!("{name} [{lo}, {hi}] invalid")));
            }
        }
        if self.ratio_threshold <= 0.0 {
            return Err(Error::Config("ratio_threshold must be positive".into()));
        }
        if let Some(hi) = self.ratio_upper {
            if hi <= self.ratio_threshold {
                return Err(Error::Config("ratio_upper must exceed ratio_threshold".into()));
            }
        }
        if self.min_area == 0 || self.track_window == 0 {
            return Err(Error::Config("min_area and track_window must be >= 1".into()));
        }
        if self.prune_relative < 0.0 || self.prune_absolute < 0.0 {
            return Err(Error::Config("prune thresholds must be >= 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_ranges_rejected() {
        let mut c = PipelineConfig::default();
        c.neck_range = (8.0, 5.0);
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.r_threshold = 1.5;
        assert!(c.validate().is_err());
    }
}
