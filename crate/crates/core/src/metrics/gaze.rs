use serde::{Deserialize, Serialize};

use super::{decompose_times, MetricsConfig, MetricsError};
use crate::geometry::{PointDeg, ScreenGeometry};
use crate::session::{GazeSample, Outcome, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazeCategory {
    OnTarget,
    OnCursor,
    Elsewhere,
}

/// Target first, then cursor; the target sits at the origin.
pub fn classify_gaze(sample: &GazeSample, cursor: PointDeg, cfg: &MetricsConfig) -> GazeCategory {
    if sample.pos.norm() < cfg.gaze_radius_deg {
        GazeCategory::OnTarget
    } else if sample.pos.distance(cursor) < cfg.gaze_radius_deg {
        GazeCategory::OnCursor
    } else {
        GazeCategory::Elsewhere
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeProportions {
    pub on_target: f64,
    pub on_cursor: f64,
    pub elsewhere: f64,
}

impl GazeProportions {
    fn from_counts(c: [usize; 3]) -> Option<Self> {
        let n = (c[0] + c[1] + c[2]) as f64;
        (n > 0.0).then(|| Self { on_target: c[0] as f64 / n, on_cursor: c[1] as f64 / n, elsewhere: c[2] as f64 / n })
    }
}

/// Gaze categories over time normalized to 0 at display and 1 at the click.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeProfile {
    /// One entry per bin; `None` where no trial has a valid sample.
    pub bins: Vec<Option<GazeProportions>>,
    pub n_trials: usize,
    /// Mean of AT/TCT over the contributing trials whose AT is defined.
    pub mean_first_move: Option<f64>,
}

/// Per-bin category proportions, computed within each trial and then
/// averaged over the trials that have samples in the bin.
pub fn gaze_profile(trials: &[TrialRecord], g: &ScreenGeometry, cfg: &MetricsConfig) -> Result<GazeProfile, MetricsError> {
    gaze_profile_pooled(trials.iter().map(|t| (t, g)), cfg)
}

/// [`gaze_profile`] over trials from several sessions, each paired with the
/// geometry of its own log.
pub fn gaze_profile_pooled<'a>(
    trials: impl IntoIterator<Item = (&'a TrialRecord, &'a ScreenGeometry)>,
    cfg: &MetricsConfig,
) -> Result<GazeProfile, MetricsError> {
    let bins = cfg.gaze_bins;
    let mut sums = vec![[0.0f64; 3]; bins];
    let mut contributors = vec![0usize; bins];
    let mut n_trials = 0;
    let mut first_moves = Vec::new();
    for (trial, g) in trials {
        let Some(gaze) = trial.gaze_samples.as_deref() else { continue };
        let Some(click) = trial.final_click() else { continue };
        if trial.outcome != Outcome::Completed || click.t_ms == 0 {
            continue;
        }
        let tct = click.t_ms as f64;
        let mut counts = vec![[0usize; 3]; bins];
        let mut any = false;
        for s in gaze.iter().filter(|s| s.valid && s.t_ms <= click.t_ms) {
            let Some(cursor) = trial.cursor_at(s.t_ms as f64) else { continue };
            let bin = ((s.t_ms as f64 / tct * bins as f64) as usize).min(bins - 1);
            counts[bin][classify_gaze(s, cursor, cfg) as usize] += 1;
            any = true;
        }
        if !any {
            continue;
        }
        n_trials += 1;
        for (bin, c) in counts.into_iter().enumerate() {
            if let Some(p) = GazeProportions::from_counts(c) {
                sums[bin][0] += p.on_target;
                sums[bin][1] += p.on_cursor;
                sums[bin][2] += p.elsewhere;
                contributors[bin] += 1;
            }
        }
        if let Ok(split) = decompose_times(trial, g, cfg) {
            first_moves.push(split.at_ms as f64 / tct);
        }
    }
    if n_trials == 0 {
        return Err(MetricsError::NoGazeData);
    }
    let bins = sums
        .into_iter()
        .zip(contributors)
        .map(|(s, n)| {
            (n > 0).then(|| {
                let n = n as f64;
                GazeProportions { on_target: s[0] / n, on_cursor: s[1] / n, elsewhere: s[2] / n }
            })
        })
        .collect();
    let mean_first_move = (!first_moves.is_empty()).then(|| first_moves.iter().sum::<f64>() / first_moves.len() as f64);
    Ok(GazeProfile { bins, n_trials, mean_first_move })
}
