use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::model::AgentModel;
use super::trial::{draw_acquisition, draw_keystroke, SampleGrid};
use crate::geometry::{initial_cursor_position, PointDeg, TrialSpec};
use crate::rng::{self, Purpose};
use crate::session::{ClickEvent, MouseButton, Outcome, PointerSample, TrialRecord};

/// One convergence-point judgement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationDraw {
    pub true_pos: PointDeg,
    pub estimated_pos: PointDeg,
}

fn normal<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    if sd == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sd).expect("sd validated").sample(rng)
    }
}

/// Where the agent believes the rays converge for the cursor position of
/// `spec`: `(D + E(D) + noise)` along the true direction plus angular noise.
pub fn simulate_estimation_trial(agent: &AgentModel, spec: &TrialSpec) -> EstimationDraw {
    let mut rng = rng::stream(agent.seed, Purpose::Estimation, u64::from(spec.trial_id));
    draw_estimate(agent, spec, &mut rng)
}

fn draw_estimate<R: Rng + ?Sized>(agent: &AgentModel, spec: &TrialSpec, rng: &mut R) -> EstimationDraw {
    let p = &agent.perception;
    let d = spec.distance_deg;
    let radius = p.mean_estimate(d) + normal(p.distance_sd(d), rng);
    let angle = spec.angle_rad + normal(p.direction_noise.sd_at(d), rng);
    EstimationDraw { true_pos: initial_cursor_position(spec), estimated_pos: PointDeg::from_polar(radius, angle) }
}

/// An estimation trial as it appears in a log: the cursor stays where it
/// was displayed, then the participant clicks the estimated point.
pub(crate) fn estimation_record(agent: &AgentModel, spec: &TrialSpec) -> TrialRecord {
    let mut rng = rng::stream(agent.seed, Purpose::Estimation, u64::from(spec.trial_id));
    let draw = draw_estimate(agent, spec, &mut rng);
    let decide = draw_acquisition(agent, spec, &mut rng).round() as u64 + draw_keystroke(agent, &mut rng);
    let grid = SampleGrid::new(agent.sample_rate_hz);
    let pointer_samples = (0..)
        .map(|k| grid.t(k))
        .take_while(|&t| t <= decide)
        .map(|t_ms| PointerSample { t_ms, pos: draw.true_pos })
        .collect();
    TrialRecord {
        spec: *spec,
        pointer_samples,
        gaze_samples: None,
        click_events: vec![ClickEvent { t_ms: decide, pos: draw.estimated_pos, button: MouseButton::Left }],
        outcome: Outcome::Completed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Condition;

    fn spec(d: f64, id: u32) -> TrialSpec {
        TrialSpec { trial_id: id, condition: Condition::Estimation, distance_deg: d, angle_rad: 1.1, seed: 0 }
    }

    #[test]
    fn noiseless_estimates_follow_the_bias_formula() {
        let agent = AgentModel::preset("estimation").unwrap().noiseless();
        let far = simulate_estimation_trial(&agent, &spec(14.0, 0));
        assert!((far.estimated_pos.norm() - 10.37).abs() < 1e-9);
        assert!((far.estimated_pos.angle() - 1.1).abs() < 1e-12);
        let near = simulate_estimation_trial(&agent, &spec(3.5, 1));
        assert!((near.estimated_pos.norm() - 4.805).abs() < 1e-9);
        assert!((near.true_pos.norm() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn distance_spread_at_seven_degrees() {
        let agent = AgentModel::preset("estimation").unwrap().with_seed(12);
        let xs: Vec<f64> = (0..10_000).map(|i| simulate_estimation_trial(&agent, &spec(7.0, i)).estimated_pos.norm()).collect();
        let sd = crate::stats::sample_sd(&xs).unwrap();
        assert!((sd - 2.4).abs() < 0.1, "sd {sd}");
    }

    #[test]
    fn record_clicks_the_estimate() {
        let agent = AgentModel::preset("estimation").unwrap().with_seed(4);
        let r = estimation_record(&agent, &spec(7.0, 3));
        let draw = simulate_estimation_trial(&agent, &spec(7.0, 3));
        assert_eq!(r.final_click().unwrap().pos, draw.estimated_pos);
        assert!(r.pointer_samples.iter().all(|s| s.pos == draw.true_pos));
        assert!(r.final_click().unwrap().t_ms >= r.pointer_samples.last().unwrap().t_ms);
    }
}
