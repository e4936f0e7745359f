//! Session logs: the document exchanged between the browser experiment,
//! the simulator and the analysis.
//!
//! One session is one exercise of one participant. Positions are stored in
//! degrees; the screen geometry travels along so pixel-based thresholds can
//! be converted per log. Timestamps are integer milliseconds since the trial
//! was displayed.

mod resample;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ClipRegion, PointDeg, RayConfig, ScreenGeometry, TrialSpec};

pub use resample::{resample_uniform, ResampleError};
pub use validate::{ValidationError, Violation};

pub const SCHEMA_VERSION: &str = "1";
/// Conventional suffix of a single-session file.
pub const SESSION_SUFFIX: &str = ".session.json";
/// Conventional suffix of a newline-delimited corpus file.
pub const CORPUS_SUFFIX: &str = ".sessions.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Laterality {
    Right,
    Left,
    Ambidextrous,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VisionDisorder {
    /// Retinitis pigmentosa.
    Rp,
    /// Glaucoma.
    Gl,
    #[default]
    None,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticipantKind {
    #[default]
    Human,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParticipantProfile {
    pub participant_id: String,
    /// Radius of the binocular visual field, when measured.
    pub vf_radius_deg: Option<f64>,
    pub acuity: Option<f64>,
    pub laterality: Laterality,
    pub vision_disorder: VisionDisorder,
    /// Self-assessed mouse skill on a 0–10 scale.
    pub self_rated_mouse_skill: Option<f64>,
    pub kind: ParticipantKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerSample {
    pub t_ms: u64,
    pub pos: PointDeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t_ms: u64,
    pub pos: PointDeg,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MouseButton {
    #[default]
    Left,
    Right,
    Middle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub t_ms: u64,
    pub pos: PointDeg,
    pub button: MouseButton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Completed,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub spec: TrialSpec,
    pub pointer_samples: Vec<PointerSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaze_samples: Option<Vec<GazeSample>>,
    pub click_events: Vec<ClickEvent>,
    pub outcome: Outcome,
}

impl TrialRecord {
    /// The click that ended the trial.
    pub fn final_click(&self) -> Option<&ClickEvent> {
        self.click_events.last()
    }

    /// Cursor position at `t_ms`, linearly interpolated between samples and
    /// held constant outside the sampled range.
    pub fn cursor_at(&self, t_ms: f64) -> Option<PointDeg> {
        let samples = &self.pointer_samples;
        let first = samples.first()?;
        if t_ms <= first.t_ms as f64 {
            return Some(first.pos);
        }
        let idx = samples.partition_point(|s| (s.t_ms as f64) <= t_ms);
        if idx >= samples.len() {
            return samples.last().map(|s| s.pos);
        }
        let (a, b) = (samples[idx - 1], samples[idx]);
        let s = (t_ms - a.t_ms as f64) / (b.t_ms - a.t_ms) as f64;
        Some(a.pos + (b.pos - a.pos) * s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub schema_version: String,
    pub profile: ParticipantProfile,
    pub geometry: ScreenGeometry,
    pub ray_config: RayConfig,
    pub clip: ClipRegion,
    pub schedule_seed: u64,
    pub trials: Vec<TrialRecord>,
    /// RFC 3339 timestamp of session creation.
    pub created_at: String,
}

impl SessionLog {
    /// Empty session with default apparatus settings.
    pub fn new(profile: ParticipantProfile, clip: ClipRegion, schedule_seed: u64, created_at: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            profile,
            geometry: ScreenGeometry::default(),
            ray_config: RayConfig::default(),
            clip,
            schedule_seed,
            trials: Vec::new(),
            created_at: created_at.into(),
        }
    }

    pub fn condition(&self) -> Option<crate::geometry::Condition> {
        self.trials.first().map(|t| t.spec.condition)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        validate::validate(self)
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schema_version `{0}` (expected \"{SCHEMA_VERSION}\")")]
    UnknownVersion(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

impl SessionError {
    /// JSON path of the offending element, when known.
    pub fn path(&self) -> Option<&str> {
        match self {
            SessionError::Json(_) => None,
            SessionError::Schema { path, .. } => Some(path),
            SessionError::UnknownVersion(_) => Some("$.schema_version"),
            SessionError::Invalid(v) => Some(&v.path),
        }
    }
}

/// Serializes a session to pretty-printed UTF-8 JSON in declaration order.
pub fn serialize(log: &SessionLog) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(log).expect("session logs are always representable as JSON");
    out.push(b'\n');
    out
}

/// Parses and fully validates one session document.
pub fn parse(bytes: &[u8]) -> Result<SessionLog, SessionError> {
    let value: serde_json::Value = serde_json::from_slice(bytes)?;
    let version = match value.get("schema_version") {
        None => {
            return Err(SessionError::Schema {
                path: "$.schema_version".into(),
                message: "missing field".into(),
            })
        }
        Some(v) => v.as_str().ok_or_else(|| SessionError::Schema {
            path: "$.schema_version".into(),
            message: "expected a string".into(),
        })?,
    };
    if version != SCHEMA_VERSION {
        return Err(SessionError::UnknownVersion(version.to_string()));
    }
    let log: SessionLog = serde_path_to_error::deserialize(value).map_err(|e| SessionError::Schema {
        path: format!("$.{}", e.path()),
        message: e.into_inner().to_string(),
    })?;
    log.validate()?;
    Ok(log)
}

/// One compact JSON document per line.
pub fn serialize_corpus<'a>(logs: impl IntoIterator<Item = &'a SessionLog>) -> String {
    let mut out = String::new();
    for log in logs {
        out.push_str(&serde_json::to_string(log).expect("session logs are always representable as JSON"));
        out.push('\n');
    }
    out
}

/// Parses a newline-delimited corpus. Blank lines are skipped; each entry
/// carries its 1-based line number.
pub fn parse_corpus(text: &str) -> Vec<(usize, Result<SessionLog, SessionError>)> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| (i + 1, parse(line.as_bytes())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_schedule, initial_cursor_position, Condition};

    pub(crate) fn straight_trial(spec: TrialSpec) -> TrialRecord {
        let start = initial_cursor_position(&spec);
        let mut samples = Vec::new();
        for k in 0..=10u64 {
            let frac = k as f64 / 10.0;
            samples.push(PointerSample { t_ms: 100 * k, pos: start * (1.0 - frac) });
        }
        TrialRecord {
            spec,
            pointer_samples: samples,
            gaze_samples: None,
            click_events: vec![ClickEvent { t_ms: 1200, pos: PointDeg::ORIGIN, button: MouseButton::Left }],
            outcome: Outcome::Completed,
        }
    }

    pub(crate) fn sample_log(n_trials: usize) -> SessionLog {
        let schedule = generate_schedule(Condition::CpFvf, 11);
        let mut log = SessionLog::new(
            ParticipantProfile { participant_id: "p01".into(), ..Default::default() },
            ClipRegion::default(),
            11,
            "2026-01-01T00:00:00Z",
        );
        log.trials = schedule.trials.iter().take(n_trials).map(|s| straight_trial(*s)).collect();
        log
    }

    #[test]
    fn empty_log_serializes_with_empty_trials() {
        let log = sample_log(0);
        let bytes = serialize(&log);
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["trials"], serde_json::json!([]));
        assert_eq!(parse(&bytes).unwrap(), log);
    }

    #[test]
    fn full_log_round_trips() {
        let log = sample_log(24);
        let back = parse(&serialize(&log)).unwrap();
        assert_eq!(back, log);
        assert_eq!(serialize(&back), serialize(&log));
    }

    #[test]
    fn field_order_is_canonical() {
        let text = String::from_utf8(serialize(&sample_log(1))).unwrap();
        let keys = ["\"schema_version\"", "\"profile\"", "\"geometry\"", "\"ray_config\"", "\"clip\"", "\"schedule_seed\"", "\"trials\"", "\"created_at\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn missing_version_is_a_schema_error() {
        let mut v = serde_json::to_value(sample_log(0)).unwrap();
        v.as_object_mut().unwrap().remove("schema_version");
        let err = parse(v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, SessionError::Schema { .. }));
        assert_eq!(err.path(), Some("$.schema_version"));
    }

    #[test]
    fn unknown_version_rejected() {
        let mut v = serde_json::to_value(sample_log(0)).unwrap();
        v["schema_version"] = "2".into();
        assert!(matches!(parse(v.to_string().as_bytes()), Err(SessionError::UnknownVersion(s)) if s == "2"));
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(matches!(parse(b"{\"schema_version\": "), Err(SessionError::Json(_))));
    }

    #[test]
    fn type_errors_carry_a_path() {
        let mut v = serde_json::to_value(sample_log(2)).unwrap();
        v["trials"][1]["pointer_samples"][3]["t_ms"] = "soon".into();
        let err = parse(v.to_string().as_bytes()).unwrap_err();
        assert_eq!(err.path(), Some("$.trials[1].pointer_samples[3].t_ms"));
    }

    #[test]
    fn corpus_round_trip_reports_bad_lines() {
        let logs = vec![sample_log(2), sample_log(3)];
        let mut text = serialize_corpus(&logs);
        text.push_str("\n{not json}\n");
        let parsed = parse_corpus(&text);
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0].1.as_ref().unwrap(), &logs[0]);
        assert_eq!(parsed[1].1.as_ref().unwrap(), &logs[1]);
        assert_eq!(parsed[2].0, 4);
        assert!(parsed[2].1.is_err());
    }

    #[test]
    fn cursor_interpolation() {
        let trial = sample_log(1).trials.remove(0);
        let start = trial.pointer_samples[0].pos;
        assert_eq!(trial.cursor_at(-5.0), Some(start));
        let mid = trial.cursor_at(50.0).unwrap();
        assert!(mid.distance(start * 0.95) < 1e-12);
        assert_eq!(trial.cursor_at(5000.0), Some(PointDeg::ORIGIN));
    }
}
