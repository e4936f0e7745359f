use std::collections::HashSet;

use thiserror::Error;

use super::{Outcome, SessionLog, TrialRecord, SCHEMA_VERSION};
use crate::geometry::{generate_schedule, initial_cursor_position, GeometryError, TrialSchedule, TARGET_RADIUS_DEG};

/// First invariant a session log violates, with the JSON path of the element.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {violation}")]
pub struct ValidationError {
    pub path: String,
    pub violation: Violation,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("unsupported schema_version `{0}`")]
    SchemaVersion(String),
    #[error("invalid geometry: {0}")]
    Geometry(GeometryError),
    #[error("invalid profile: {0}")]
    Profile(&'static str),
    #[error("trials mix conditions")]
    MixedConditions,
    #[error("trial_id {0} appears more than once")]
    DuplicateTrial(u32),
    #[error("trial spec does not match the schedule regenerated from (condition, schedule_seed)")]
    ScheduleMismatch,
    #[error("trial has no pointer samples")]
    NoPointerSamples,
    #[error("first pointer sample must be at t=0, found {0} ms")]
    FirstSampleTime(u64),
    #[error("first pointer sample is {0:.6}° away from the initial cursor position")]
    InitialPosition(f64),
    #[error("timestamps must strictly increase ({previous} ms then {current} ms)")]
    NonMonotonicTime { previous: u64, current: u64 },
    #[error("position is not finite or exceeds 90°")]
    PositionOutOfRange,
    #[error("completed trial has no click")]
    MissingFinalClick,
    #[error("click off target: final click at {0:.4}° from the target center")]
    ClickOffTarget(f64),
}

fn err(path: impl Into<String>, violation: Violation) -> ValidationError {
    ValidationError { path: path.into(), violation }
}

const POSITION_TOLERANCE_DEG: f64 = 1e-6;
const SPEC_TOLERANCE: f64 = 1e-9;

pub(super) fn validate(log: &SessionLog) -> Result<(), ValidationError> {
    if log.schema_version != SCHEMA_VERSION {
        return Err(err("$.schema_version", Violation::SchemaVersion(log.schema_version.clone())));
    }
    validate_profile(log)?;
    log.geometry.validate().map_err(|e| err("$.geometry", Violation::Geometry(e)))?;
    log.ray_config.validate().map_err(|e| err("$.ray_config", Violation::Geometry(e)))?;
    log.clip.validate().map_err(|e| err("$.clip", Violation::Geometry(e)))?;

    let Some(condition) = log.condition() else {
        return Ok(());
    };
    let schedule = generate_schedule(condition, log.schedule_seed);
    let mut seen = HashSet::new();
    for (i, trial) in log.trials.iter().enumerate() {
        let base = format!("$.trials[{i}]");
        if trial.spec.condition != condition {
            return Err(err(format!("{base}.spec.condition"), Violation::MixedConditions));
        }
        if !seen.insert(trial.spec.trial_id) {
            return Err(err(format!("{base}.spec.trial_id"), Violation::DuplicateTrial(trial.spec.trial_id)));
        }
        check_spec(trial, &schedule).map_err(|v| err(format!("{base}.spec"), v))?;
        validate_trial(&base, trial)?;
    }
    Ok(())
}

fn validate_profile(log: &SessionLog) -> Result<(), ValidationError> {
    let p = &log.profile;
    if p.participant_id.trim().is_empty() {
        return Err(err("$.profile.participant_id", Violation::Profile("participant_id must not be empty")));
    }
    if let Some(vf) = p.vf_radius_deg {
        if !(vf > 0.0 && vf <= 90.0) {
            return Err(err("$.profile.vf_radius_deg", Violation::Profile("vf_radius_deg must lie in (0, 90]")));
        }
    }
    if let Some(a) = p.acuity {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(err("$.profile.acuity", Violation::Profile("acuity must be a non-negative fraction")));
        }
    }
    if let Some(s) = p.self_rated_mouse_skill {
        if !(0.0..=10.0).contains(&s) {
            return Err(err("$.profile.self_rated_mouse_skill", Violation::Profile("self rating must lie in [0, 10]")));
        }
    }
    Ok(())
}

fn check_spec(trial: &TrialRecord, schedule: &TrialSchedule) -> Result<(), Violation> {
    let spec = &trial.spec;
    let planned = schedule.trial(spec.trial_id).ok_or(Violation::ScheduleMismatch)?;
    let same = planned.condition == spec.condition
        && planned.seed == spec.seed
        && (planned.distance_deg - spec.distance_deg).abs() <= SPEC_TOLERANCE
        && (planned.angle_rad - spec.angle_rad).abs() <= SPEC_TOLERANCE;
    if same {
        Ok(())
    } else {
        Err(Violation::ScheduleMismatch)
    }
}

fn validate_trial(base: &str, trial: &TrialRecord) -> Result<(), ValidationError> {
    let samples = &trial.pointer_samples;
    let Some(first) = samples.first() else {
        return Err(err(format!("{base}.pointer_samples"), Violation::NoPointerSamples));
    };
    if first.t_ms != 0 {
        return Err(err(format!("{base}.pointer_samples[0].t_ms"), Violation::FirstSampleTime(first.t_ms)));
    }
    let off = first.pos.distance(initial_cursor_position(&trial.spec));
    if !(off <= POSITION_TOLERANCE_DEG) {
        return Err(err(format!("{base}.pointer_samples[0].pos"), Violation::InitialPosition(off)));
    }
    check_stream(base, "pointer_samples", samples.iter().map(|s| (s.t_ms, s.pos)))?;
    if let Some(gaze) = &trial.gaze_samples {
        check_stream(base, "gaze_samples", gaze.iter().map(|s| (s.t_ms, s.pos)))?;
    }
    for (j, c) in trial.click_events.iter().enumerate() {
        if !c.pos.is_valid() {
            return Err(err(format!("{base}.click_events[{j}].pos"), Violation::PositionOutOfRange));
        }
        if j > 0 && c.t_ms < trial.click_events[j - 1].t_ms {
            let previous = trial.click_events[j - 1].t_ms;
            return Err(err(format!("{base}.click_events[{j}].t_ms"), Violation::NonMonotonicTime { previous, current: c.t_ms }));
        }
    }
    if trial.outcome == Outcome::Completed {
        let last = trial.click_events.len().checked_sub(1);
        let Some(j) = last else {
            return Err(err(format!("{base}.click_events"), Violation::MissingFinalClick));
        };
        let r = trial.click_events[j].pos.norm();
        if trial.spec.condition.is_pointing() && r > TARGET_RADIUS_DEG {
            return Err(err(format!("{base}.click_events[{j}].pos"), Violation::ClickOffTarget(r)));
        }
    }
    Ok(())
}

fn check_stream(
    base: &str,
    field: &str,
    items: impl Iterator<Item = (u64, crate::geometry::PointDeg)>,
) -> Result<(), ValidationError> {
    let mut previous: Option<u64> = None;
    for (j, (t, pos)) in items.enumerate() {
        if let Some(prev) = previous {
            if t <= prev {
                return Err(err(format!("{base}.{field}[{j}].t_ms"), Violation::NonMonotonicTime { previous: prev, current: t }));
            }
        }
        if !pos.is_valid() {
            return Err(err(format!("{base}.{field}[{j}].pos"), Violation::PositionOutOfRange));
        }
        previous = Some(t);
    }
    Ok(())
}
