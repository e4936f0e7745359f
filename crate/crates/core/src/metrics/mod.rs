//! Per-trial timings, trajectory quantities, gaze profiles and the movement
//! time delay split.
//!
//! A trial's completion time (TCT) is cut into the acquisition time (AT,
//! until the first detected move), the movement time (MT, until the cursor
//! reaches the target for the last time) and the keystroke time (KT, until
//! the click). Timestamps stay integral so `at + mt + kt == tct` holds
//! exactly.

mod delay;
mod gaze;
mod trajectory;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ScreenGeometry, TARGET_RADIUS_DEG};
use crate::par::{self, Execution};
use crate::session::SessionLog;

pub use delay::{delay_decomposition, vf_idt_ratio, DelayDecomposition};
pub use gaze::{classify_gaze, gaze_profile, gaze_profile_pooled, GazeCategory, GazeProfile, GazeProportions};
pub use trajectory::{
    decompose_times, mean_velocity, overshoot_along, overshoot_path, path_length, trial_metrics, TimeSplit,
    TrialMetrics,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    pub first_move_threshold_px: f64,
    pub target_radius_deg: f64,
    pub gaze_radius_deg: f64,
    pub gaze_bins: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { first_move_threshold_px: 10.0, target_radius_deg: TARGET_RADIUS_DEG, gaze_radius_deg: 2.0, gaze_bins: 100 }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.first_move_threshold_px) {
            return Err(MetricsError::Config("first_move_threshold_px"));
        }
        if !positive(self.target_radius_deg) {
            return Err(MetricsError::Config("target_radius_deg"));
        }
        if !positive(self.gaze_radius_deg) {
            return Err(MetricsError::Config("gaze_radius_deg"));
        }
        if self.gaze_bins == 0 {
            return Err(MetricsError::Config("gaze_bins"));
        }
        Ok(())
    }

    /// The first-move threshold in degrees for a log recorded on `g`.
    pub fn threshold_deg(&self, g: &ScreenGeometry) -> f64 {
        g.px_to_deg_len(self.first_move_threshold_px)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("config field {0} must be positive")]
    Config(&'static str),
    #[error("trial was aborted")]
    NotCompleted,
    #[error("estimation trials have no pointing metrics")]
    NotPointing,
    #[error("trial has no click")]
    MissingClick,
    #[error("trial needs at least 2 pointer samples up to the click")]
    TooFewSamples,
    #[error("final click is {distance_deg:.4} deg from the target")]
    ClickOffTarget { distance_deg: f64 },
    #[error("cursor never left the first-move threshold")]
    NoMove,
    #[error("cursor is not inside the target when the trial ends")]
    NeverReachedTarget,
    #[error("last target reach at {reach_ms} ms precedes the first move at {at_ms} ms")]
    ReachBeforeMove { at_ms: u64, reach_ms: u64 },
    #[error("movement time is zero")]
    ZeroMovementTime,
    #[error("no usable gaze samples")]
    NoGazeData,
    #[error("participant profile has no visual field radius")]
    MissingVisualField,
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
}

/// Metrics for every trial of a session, in trial order.
pub fn session_metrics(log: &SessionLog, cfg: &MetricsConfig, exec: Execution) -> Vec<Result<TrialMetrics, MetricsError>> {
    par::map_slice(exec, &log.trials, |t| trial_metrics(t, &log.geometry, cfg))
}
