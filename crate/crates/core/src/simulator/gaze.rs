use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{AgentModel, GazeScript};
use crate::geometry::PointDeg;
use crate::rng::{self, Purpose};
use crate::session::{GazeSample, TrialRecord};

/// Phase boundaries, in ms, of a scripted search without rays: proximity
/// spiral, wide scan, dwell on the found cursor, then tracking it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPhaseTimeline {
    pub spiral_end_ms: f64,
    pub scan_end_ms: f64,
    /// Movement onset; the dwell runs from `scan_end_ms` to here.
    pub dwell_end_ms: f64,
    pub click_ms: f64,
}

impl FourPhaseTimeline {
    const DWELL_MS: f64 = 250.0;
    const SPIRAL_CAP_MS: f64 = 800.0;

    pub fn new(onset_ms: f64, click_ms: f64) -> Self {
        let dwell = Self::DWELL_MS.min(onset_ms / 4.0);
        let searching = onset_ms - dwell;
        let spiral = Self::SPIRAL_CAP_MS.min(0.4 * searching);
        Self { spiral_end_ms: spiral, scan_end_ms: searching, dwell_end_ms: onset_ms, click_ms }
    }

    /// Share of the trial spent in the wide scan.
    pub fn scan_fraction(&self) -> f64 {
        (self.scan_end_ms - self.spiral_end_ms) / self.click_ms
    }
}

/// Time of the first pointer sample that differs from the initial position.
fn movement_onset(trial: &TrialRecord) -> Option<u64> {
    let first = trial.pointer_samples.first()?.pos;
    trial.pointer_samples.iter().find(|s| s.pos != first).map(|s| s.t_ms)
}

/// Gaze trace for a simulated trial, on the pointer sample times up to the
/// click. `None` for agents without a gaze script.
pub fn emit_gaze(agent: &AgentModel, trial: &TrialRecord) -> Option<Vec<GazeSample>> {
    let click_ms = trial.final_click().map_or(u64::MAX, |c| c.t_ms);
    let times = trial.pointer_samples.iter().map(|s| s.t_ms).take_while(|&t| t <= click_ms);
    match agent.gaze_script {
        GazeScript::None => None,
        GazeScript::TargetLocked => Some(times.map(|t_ms| GazeSample { t_ms, pos: PointDeg::ORIGIN, valid: true }).collect()),
        GazeScript::FourPhaseSearch => {
            let mut rng = rng::stream(agent.seed, Purpose::Gaze, u64::from(trial.spec.trial_id));
            let end = trial.pointer_samples.last()?.t_ms.min(click_ms);
            let onset = movement_onset(trial).unwrap_or(end);
            let timeline = FourPhaseTimeline::new(onset as f64, click_ms.min(end) as f64);
            let spiral_phase = rng.random_range(0.0..TAU);
            let mut fixation = PointDeg::ORIGIN;
            let mut next_saccade = timeline.spiral_end_ms;
            let mut out = Vec::new();
            for t_ms in times {
                let t = t_ms as f64;
                let pos = if t < timeline.spiral_end_ms {
                    let frac = t / timeline.spiral_end_ms;
                    PointDeg::from_polar(2.5 + 2.5 * frac, spiral_phase + TAU * t / 400.0)
                } else if t < timeline.scan_end_ms {
                    if t >= next_saccade {
                        fixation = PointDeg::from_polar(rng.random_range(5.0..14.0), rng.random_range(0.0..TAU));
                        next_saccade = t + 300.0;
                    }
                    fixation
                } else {
                    trial.cursor_at(t)?
                };
                out.push(GazeSample { t_ms, pos, valid: true });
            }
            Some(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ScreenGeometry, TrialSpec};
    use crate::metrics::{gaze_profile, MetricsConfig};
    use crate::simulator::simulate_trial;

    fn trial(agent: &AgentModel, d: f64, id: u32) -> TrialRecord {
        let spec = TrialSpec { trial_id: id, condition: agent.condition, distance_deg: d, angle_rad: 0.4, seed: 0 };
        let mut tr = simulate_trial(agent, &spec);
        tr.gaze_samples = emit_gaze(agent, &tr);
        tr
    }

    #[test]
    fn locked_script_is_all_target() {
        let agent = AgentModel::preset("sp-simpvl").unwrap().with_seed(1);
        let trials: Vec<TrialRecord> = (0..8).map(|i| trial(&agent, 7.0, i)).collect();
        let p = gaze_profile(&trials, &ScreenGeometry::default(), &MetricsConfig::default()).unwrap();
        assert!(p.bins.iter().all(|b| b.unwrap().on_target == 1.0));
    }

    #[test]
    fn crosshair_with_full_field_has_no_gaze() {
        let agent = AgentModel::preset("cp-fvf").unwrap();
        assert_eq!(trial(&agent, 7.0, 0).gaze_samples, None);
    }

    #[test]
    fn far_targets_scan_longer() {
        let agent = AgentModel::preset("cp-pvl").unwrap().noiseless();
        let timeline = |d| {
            let tr = trial(&agent, d, 0);
            let onset = movement_onset(&tr).unwrap() as f64;
            FourPhaseTimeline::new(onset, tr.final_click().unwrap().t_ms as f64)
        };
        assert!(timeline(14.0).scan_fraction() > timeline(3.5).scan_fraction());
    }

    #[test]
    fn search_phases_show_in_the_profile() {
        let agent = AgentModel::preset("cp-pvl").unwrap().with_seed(9);
        let trials: Vec<TrialRecord> = (0..24).map(|i| trial(&agent, 14.0, i)).collect();
        let cfg = MetricsConfig { gaze_bins: 10, ..Default::default() };
        let p = gaze_profile(&trials, &ScreenGeometry::default(), &cfg).unwrap();
        let early = p.bins[2].unwrap();
        let late = p.bins[9].unwrap();
        // the wide scan dominates the search; the last bin watches the cursor
        // arrive on the target
        assert!(early.elsewhere > 0.7, "{early:?}");
        assert!(late.on_target + late.on_cursor > 0.9, "{late:?}");
        let mt = p.mean_first_move.unwrap();
        assert!(mt > 0.5 && mt < 1.0);
    }
}
