//! Synthetic participants.
//!
//! An agent holds still for its acquisition time, then moves in straight
//! chunks toward where it believes the target is, re-perceiving every
//! 150 ms. With rays it reads the cursor offset through the ray field with
//! a distance bias `E(D) = −0.47·D + 2.95` and distance-dependent noise;
//! without rays it sees the cursor directly. Once the cursor is inside the
//! target it waits its keystroke time and clicks.
//!
//! Every trial draws from its own stream keyed by the agent seed and the
//! trial id, so trials can run in any order or in parallel.

mod estimation;
mod gaze;
mod model;
mod trial;

use thiserror::Error;

use crate::geometry::{generate_schedule, ClipRegion, Condition, TrialSchedule};
use crate::par::{self, Execution};
use crate::rng::{self, Purpose};
use crate::session::{ParticipantKind, ParticipantProfile, SessionLog};

pub use estimation::{simulate_estimation_trial, EstimationDraw};
pub use gaze::{emit_gaze, FourPhaseTimeline};
pub use model::{
    AffineBias, AgentModel, BiasReading, DirectionNoise, Gaussian, GazeScript, LatencyModel, MovementModel,
    PerceptionModel, PerceptionSource, SearchModel, VelocityLaw, PRESETS,
};
pub use trial::{simulate_trial, ABORT_AFTER_MS};

/// `created_at` stamped on simulated sessions so reruns are byte-identical.
pub const SIMULATED_AT: &str = "2000-01-01T00:00:00Z";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("unknown agent preset {0:?}; expected one of {list}", list = PRESETS.join(", "))]
    UnknownPreset(String),
    #[error("invalid agent model: {0}")]
    InvalidModel(String),
    #[error("schedule is for {schedule} but the agent simulates {agent}")]
    ConditionMismatch { agent: Condition, schedule: Condition },
}

/// Runs every trial of `schedule`. Estimation schedules produce clicks on
/// the estimated convergence points instead of pointing movements.
pub fn simulate_session(agent: &AgentModel, schedule: &TrialSchedule, profile: ParticipantProfile) -> Result<SessionLog, SimError> {
    agent.validate()?;
    if agent.condition != schedule.condition {
        return Err(SimError::ConditionMismatch { agent: agent.condition, schedule: schedule.condition });
    }
    let clip = ClipRegion::for_condition(schedule.condition);
    let mut log = SessionLog::new(profile, clip, schedule.seed, SIMULATED_AT);
    log.trials = schedule
        .trials
        .iter()
        .map(|spec| {
            if spec.condition == Condition::Estimation {
                estimation::estimation_record(agent, spec)
            } else {
                let mut tr = trial::simulate_trial_in(agent, spec, &clip);
                tr.gaze_samples = emit_gaze(agent, &tr);
                tr
            }
        })
        .collect();
    Ok(log)
}

/// Seeds of participant `index` in a corpus: `(agent seed, schedule seed)`,
/// both below 2^53.
pub fn participant_seeds(corpus_seed: u64, index: usize) -> (u64, u64) {
    use rand::RngCore;
    let mut r = rng::stream(corpus_seed, Purpose::Corpus, index as u64);
    (r.next_u64() >> 11, r.next_u64() >> 11)
}

/// Participant id used for synthetic corpora, e.g. `cp-fvf-p07`.
pub fn participant_id(label: &str, index: usize) -> String {
    format!("{label}-p{:02}", index + 1)
}

/// `participants` synthetic sessions of the same agent model, each with
/// its own agent seed and schedule.
pub fn simulate_corpus(
    agent: &AgentModel,
    label: &str,
    participants: usize,
    corpus_seed: u64,
    exec: Execution,
) -> Result<Vec<SessionLog>, SimError> {
    agent.validate()?;
    par::map_range(exec, participants, |i| {
        let (agent_seed, schedule_seed) = participant_seeds(corpus_seed, i);
        let a = agent.clone().with_seed(agent_seed);
        let schedule = generate_schedule(a.condition, schedule_seed);
        let profile = ParticipantProfile {
            participant_id: participant_id(label, i),
            vf_radius_deg: a.visual_field_deg,
            kind: ParticipantKind::Synthetic,
            ..Default::default()
        };
        simulate_session(&a, &schedule, profile)
    })
    .into_iter()
    .collect()
}
