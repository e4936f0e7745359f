use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::model::{AgentModel, PerceptionSource};
use crate::geometry::{clamp_to_area, initial_cursor_position, ClipRegion, PointDeg, TrialSpec, TARGET_RADIUS_DEG};
use crate::rng::{self, Purpose};
use crate::session::{ClickEvent, MouseButton, Outcome, PointerSample, TrialRecord};

/// Simulated trials give up after this long without reaching the target.
pub const ABORT_AFTER_MS: u64 = 60_000;

/// Sample times `round(k·1000/rate)` in whole milliseconds, computed in
/// integers so the grid never drifts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SampleGrid {
    rate_hz: u64,
}

impl SampleGrid {
    pub(crate) fn new(rate_hz: u32) -> Self {
        Self { rate_hz: u64::from(rate_hz) }
    }

    pub(crate) fn t(&self, k: u64) -> u64 {
        (2000 * k + self.rate_hz) / (2 * self.rate_hz)
    }

    pub(crate) fn dt_s(&self) -> f64 {
        1.0 / self.rate_hz as f64
    }
}

/// Commanded speed whose grid measurement reads back as `v_law`.
///
/// Movement starts on the first displaced sample and ends on the first
/// sample inside the target, so the measured movement time misses one step
/// and the path overruns the entry point by half a step on average. Solving
/// `(L + vΔt/2)/(L/v − Δt/2) = V` for `v` cancels both.
pub(crate) fn compensated_speed(v_law: f64, path_deg: f64, dt_s: f64) -> f64 {
    let l = path_deg.max(1e-9);
    let b = l + v_law * dt_s / 2.0;
    (-b + (b * b + 2.0 * dt_s * v_law * l).sqrt()) / dt_s
}

/// Current motor plan: a straight run of `travel` degrees from `from`.
struct Plan {
    from: PointDeg,
    heading: f64,
    travel: f64,
    traveled: f64,
    speed: f64,
    at_ms: u64,
    exact: bool,
}

fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

fn normal<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    if sd == 0.0 {
        0.0
    } else {
        Normal::new(0.0, sd).expect("sd validated").sample(rng)
    }
}

/// Acquisition time in ms for one trial.
pub(crate) fn draw_acquisition<R: Rng + ?Sized>(agent: &AgentModel, spec: &TrialSpec, rng: &mut R) -> f64 {
    match (agent.latency.search, agent.visual_field_deg) {
        (Some(s), Some(vf)) => {
            let mean = s.base_ms + s.per_ratio_ms * spec.distance_deg / vf;
            let factor = (normal(s.log_sd, rng) - s.log_sd * s.log_sd / 2.0).exp();
            mean * factor
        }
        _ => agent.latency.acquisition_ms.draw(rng),
    }
}

fn perceive<R: Rng + ?Sized>(agent: &AgentModel, p: PointDeg, previous: Option<f64>, speed: f64, t_ms: u64, rng: &mut R) -> Plan {
    let perception = &agent.perception;
    let d = p.norm();
    let true_heading = (-p.y).atan2(-p.x);
    let exact = perception.source == PerceptionSource::Direct || d <= perception.exact_radius_deg;
    let (perceived, travel) = if exact {
        (true_heading, d)
    } else {
        let dir = true_heading + normal(perception.direction_noise.sd_at(d), rng);
        let dist = perception.mean_estimate(d) + normal(perception.distance_sd(d), rng);
        (dir, dist.max(0.0))
    };
    let perceived = perceived + normal(agent.movement.heading_noise_sd_rad, rng);
    let heading = match previous {
        Some(old) => old + agent.movement.heading_gain * wrap_angle(perceived - old),
        None => perceived,
    };
    let jitter = 1.0 + normal(agent.movement.velocity_jitter_sd, rng);
    Plan { from: p, heading, travel, traveled: 0.0, speed: speed * jitter.max(0.2), at_ms: t_ms, exact }
}

/// One pointing trial on the agent's sample grid, deterministic in
/// `(agent.seed, spec.trial_id)`.
pub fn simulate_trial(agent: &AgentModel, spec: &TrialSpec) -> TrialRecord {
    simulate_trial_in(agent, spec, &ClipRegion::for_condition(spec.condition))
}

pub(crate) fn simulate_trial_in(agent: &AgentModel, spec: &TrialSpec, clip: &ClipRegion) -> TrialRecord {
    let mut rng = rng::stream(agent.seed, Purpose::Trial, u64::from(spec.trial_id));
    let grid = SampleGrid::new(agent.sample_rate_hz);
    let start = initial_cursor_position(spec);
    let acquisition = draw_acquisition(agent, spec, &mut rng);
    let keystroke = draw_keystroke(agent, &mut rng);

    // hold so the first displaced sample lands at the drawn acquisition time
    let step_ms = 1000.0 / f64::from(agent.sample_rate_hz);
    let hold = ((acquisition / step_ms).round() as u64).saturating_sub(1);
    let mut samples: Vec<PointerSample> = (0..=hold).map(|k| PointerSample { t_ms: grid.t(k), pos: start }).collect();

    let v_law = agent.movement.velocity_law.speed(spec.distance_deg);
    let speed = if agent.movement.sampling_compensation {
        compensated_speed(v_law, spec.distance_deg - TARGET_RADIUS_DEG, grid.dt_s())
    } else {
        v_law
    };
    let interval = agent.perception.reperception_interval_ms;
    let rays = agent.perception.source == PerceptionSource::Rays;

    let mut p = start;
    let mut k = hold;
    let mut plan: Option<Plan> = None;
    let reached = loop {
        let t_now = grid.t(k);
        if t_now >= ABORT_AFTER_MS {
            break false;
        }
        let stale = match &plan {
            None => true,
            Some(pl) => {
                (t_now - pl.at_ms) as f64 >= interval || (rays
                        && agent.perception.reperceive_on_entry
                        && !pl.exact
                        && p.norm() <= agent.perception.exact_radius_deg)
            }
        };
        if stale {
            let previous = plan.as_ref().map(|pl| pl.heading);
            plan = Some(perceive(agent, p, previous, speed, t_now, &mut rng));
        }
        let pl = plan.as_mut().expect("plan set above");
        let step = (pl.speed * grid.dt_s()).min(pl.travel - pl.traveled).max(0.0);
        pl.traveled += step;
        let next = pl.from + PointDeg::from_polar(pl.traveled, pl.heading);
        p = clamp_to_area(next, clip);
        k += 1;
        samples.push(PointerSample { t_ms: grid.t(k), pos: p });
        if p.norm() <= TARGET_RADIUS_DEG {
            break true;
        }
    };

    if !reached {
        return TrialRecord {
            spec: *spec,
            pointer_samples: samples,
            gaze_samples: None,
            click_events: Vec::new(),
            outcome: Outcome::Aborted,
        };
    }
    let click_ms = grid.t(k) + keystroke;
    loop {
        k += 1;
        let t = grid.t(k);
        if t > click_ms {
            break;
        }
        samples.push(PointerSample { t_ms: t, pos: p });
    }
    TrialRecord {
        spec: *spec,
        pointer_samples: samples,
        gaze_samples: None,
        click_events: vec![ClickEvent { t_ms: click_ms, pos: p, button: MouseButton::Left }],
        outcome: Outcome::Completed,
    }
}

/// Keystroke time in whole ms, at least 1.
pub(crate) fn draw_keystroke<R: Rng + ?Sized>(agent: &AgentModel, rng: &mut R) -> u64 {
    agent.latency.keystroke_ms.draw(rng).round().max(1.0) as u64
}
