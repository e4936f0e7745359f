use serde::{Deserialize, Serialize};

use super::{MetricsConfig, MetricsError};
use crate::geometry::{initial_cursor_position, PointDeg, ScreenGeometry};
use crate::session::{Outcome, TrialRecord};

/// The four durations of a trial, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSplit {
    pub at_ms: u64,
    pub mt_ms: u64,
    pub kt_ms: u64,
    pub tct_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub tct_ms: u64,
    pub at_ms: u64,
    pub mt_ms: u64,
    pub kt_ms: u64,
    pub path_length_deg: f64,
    pub trajectory_excess_deg: f64,
    pub overshoot_path_deg: f64,
    /// `None` when the movement time is zero.
    pub mean_velocity_deg_per_s: Option<f64>,
    pub initial_distance_deg: f64,
}

/// Pointer trace cut at the final click, with the indices that bound the
/// movement.
struct Trace {
    points: Vec<(u64, PointDeg)>,
    at_idx: usize,
    reach_idx: usize,
    tct_ms: u64,
}

impl Trace {
    fn build(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<Self, MetricsError> {
        if trial.outcome != Outcome::Completed {
            return Err(MetricsError::NotCompleted);
        }
        if !trial.spec.condition.is_pointing() {
            return Err(MetricsError::NotPointing);
        }
        let click = trial.final_click().ok_or(MetricsError::MissingClick)?;
        let tct_ms = click.t_ms;
        let radius = cfg.target_radius_deg;
        let inside = |p: PointDeg| p.norm() <= radius;
        if !inside(click.pos) {
            return Err(MetricsError::ClickOffTarget { distance_deg: click.pos.norm() });
        }
        let mut points: Vec<(u64, PointDeg)> =
            trial.pointer_samples.iter().take_while(|s| s.t_ms <= tct_ms).map(|s| (s.t_ms, s.pos)).collect();
        // A click inside the target after the last sample stands in for the
        // sample the logger would have taken there.
        match points.last() {
            Some(&(t, p)) if !inside(p) && t < tct_ms => points.push((tct_ms, click.pos)),
            Some(&(_, p)) if !inside(p) => return Err(MetricsError::NeverReachedTarget),
            _ => {}
        }
        if points.len() < 2 {
            return Err(MetricsError::TooFewSamples);
        }
        let threshold = cfg.threshold_deg(g);
        let origin = points[0].1;
        let at_idx = points.iter().position(|&(_, p)| p.distance(origin) > threshold).ok_or(MetricsError::NoMove)?;
        let mut reach_idx = points.len() - 1;
        while reach_idx > 0 && inside(points[reach_idx - 1].1) {
            reach_idx -= 1;
        }
        if reach_idx < at_idx {
            return Err(MetricsError::ReachBeforeMove { at_ms: points[at_idx].0, reach_ms: points[reach_idx].0 });
        }
        Ok(Self { points, at_idx, reach_idx, tct_ms })
    }

    fn split(&self) -> TimeSplit {
        let at_ms = self.points[self.at_idx].0;
        let reach_ms = self.points[self.reach_idx].0;
        TimeSplit { at_ms, mt_ms: reach_ms - at_ms, kt_ms: self.tct_ms - reach_ms, tct_ms: self.tct_ms }
    }

    /// Points from the start of the trial up to the last target reach.
    fn moving_part(&self) -> impl Iterator<Item = PointDeg> + '_ {
        self.points[..=self.reach_idx].iter().map(|&(_, p)| p)
    }

    fn path_length(&self) -> f64 {
        let pts: Vec<PointDeg> = self.moving_part().collect();
        pts.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

/// AT, MT, KT and TCT of a completed pointing trial.
pub fn decompose_times(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<TimeSplit, MetricsError> {
    Trace::build(trial, g, cfg).map(|t| t.split())
}

/// Length of the pointer path up to the last target reach.
pub fn path_length(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<f64, MetricsError> {
    Trace::build(trial, g, cfg).map(|t| t.path_length())
}

/// Summed length of the segments that end behind the line through the
/// target perpendicular to the approach axis. `start` fixes the approach
/// direction; the target sits at the origin.
pub fn overshoot_along(points: impl IntoIterator<Item = PointDeg>, start: PointDeg) -> f64 {
    let norm = start.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let u = start * (1.0 / norm);
    let mut total = 0.0;
    let mut prev: Option<PointDeg> = None;
    for p in points {
        if let Some(q) = prev {
            if p.dot(u) < 0.0 {
                total += q.distance(p);
            }
        }
        prev = Some(p);
    }
    total
}

/// Overshoot path of a trial, over the same stretch as [`path_length`].
pub fn overshoot_path(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<f64, MetricsError> {
    let trace = Trace::build(trial, g, cfg)?;
    Ok(overshoot_along(trace.moving_part(), initial_cursor_position(&trial.spec)))
}

/// Path length over movement time, in degrees per second.
pub fn mean_velocity(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<f64, MetricsError> {
    let trace = Trace::build(trial, g, cfg)?;
    let split = trace.split();
    if split.mt_ms == 0 {
        return Err(MetricsError::ZeroMovementTime);
    }
    Ok(trace.path_length() * 1000.0 / split.mt_ms as f64)
}

/// Every per-trial metric in one pass.
pub fn trial_metrics(trial: &TrialRecord, g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<TrialMetrics, MetricsError> {
    let trace = Trace::build(trial, g, cfg)?;
    let split = trace.split();
    let path = trace.path_length();
    let initial_distance = trial.spec.distance_deg;
    Ok(TrialMetrics {
        tct_ms: split.tct_ms,
        at_ms: split.at_ms,
        mt_ms: split.mt_ms,
        kt_ms: split.kt_ms,
        path_length_deg: path,
        trajectory_excess_deg: path - initial_distance,
        overshoot_path_deg: overshoot_along(trace.moving_part(), initial_cursor_position(&trial.spec)),
        mean_velocity_deg_per_s: (split.mt_ms > 0).then(|| path * 1000.0 / split.mt_ms as f64),
        initial_distance_deg: initial_distance,
    })
}
