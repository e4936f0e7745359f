//! Session sets to report bundles.
//!
//! The bundle holds the per-trial table and everything derived from it:
//! aggregates by condition and distance, condition-pair Mann–Whitney tests
//! per distance, Fitts and velocity fits, the movement time delay split,
//! gaze profiles, the estimation summary and plot-ready series. Every list
//! is sorted, so identical inputs give byte-identical JSON apart from
//! `generated_at`.

mod tables;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::geometry::{Condition, DISTANCES_DEG};
use crate::geometry::ScreenGeometry;
use crate::metrics::{self, delay_decomposition, gaze_profile_pooled, DelayDecomposition, GazeProfile, MetricsConfig};
use crate::par::{self, Execution};
use crate::session::{Outcome, SessionError, SessionLog, TrialRecord};
use crate::stats::{self, fitts_fit, index_of_difficulty, linear_fit, mann_whitney, MwMethod};

pub use tables::{metric_columns, write_csv_tables, CSV_TABLES};

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub metrics: MetricsConfig,
    pub include_aborted: bool,
    pub exact_threshold: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            metrics: MetricsConfig::default(),
            include_aborted: false,
            exact_threshold: stats::DEFAULT_EXACT_THRESHOLD,
            execution: Execution::default(),
        }
    }
}

/// Per-trial quantities, one column per metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TctMs,
    AtMs,
    MtMs,
    KtMs,
    PathLengthDeg,
    TrajectoryExcessDeg,
    OvershootPathDeg,
    MeanVelocityDegPerS,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::TctMs,
        Metric::AtMs,
        Metric::MtMs,
        Metric::KtMs,
        Metric::PathLengthDeg,
        Metric::TrajectoryExcessDeg,
        Metric::OvershootPathDeg,
        Metric::MeanVelocityDegPerS,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::TctMs => "tct_ms",
            Metric::AtMs => "at_ms",
            Metric::MtMs => "mt_ms",
            Metric::KtMs => "kt_ms",
            Metric::PathLengthDeg => "path_length_deg",
            Metric::TrajectoryExcessDeg => "trajectory_excess_deg",
            Metric::OvershootPathDeg => "overshoot_path_deg",
            Metric::MeanVelocityDegPerS => "mean_velocity_deg_per_s",
        }
    }
}

/// One row of the per-trial table. Metric cells are empty for aborted
/// trials kept with `include_aborted`, except the elapsed time in `tct_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub participant_id: String,
    pub condition: Condition,
    pub distance_deg: f64,
    pub trial_id: u32,
    pub outcome: Outcome,
    pub tct_ms: Option<u64>,
    pub at_ms: Option<u64>,
    pub mt_ms: Option<u64>,
    pub kt_ms: Option<u64>,
    pub path_length_deg: Option<f64>,
    pub trajectory_excess_deg: Option<f64>,
    pub overshoot_path_deg: Option<f64>,
    pub mean_velocity_deg_per_s: Option<f64>,
}

impl TrialRow {
    pub fn value(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::TctMs => self.tct_ms.map(|v| v as f64),
            Metric::AtMs => self.at_ms.map(|v| v as f64),
            Metric::MtMs => self.mt_ms.map(|v| v as f64),
            Metric::KtMs => self.kt_ms.map(|v| v as f64),
            Metric::PathLengthDeg => self.path_length_deg,
            Metric::TrajectoryExcessDeg => self.trajectory_excess_deg,
            Metric::OvershootPathDeg => self.overshoot_path_deg,
            Metric::MeanVelocityDegPerS => self.mean_velocity_deg_per_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub condition: Condition,
    pub distance_deg: f64,
    pub metric: Metric,
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub condition_a: Condition,
    pub condition_b: Condition,
    pub distance: f64,
    pub metric: Metric,
    pub u: f64,
    pub p: f64,
    pub method: MwMethod,
    pub n_a: usize,
    pub n_b: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittsEntry {
    pub condition: Condition,
    pub n: usize,
    /// Seconds per bit; `None` when the fit is undefined.
    pub b: Option<f64>,
    pub ip: Option<f64>,
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityFitEntry {
    pub condition: Condition,
    pub n: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub grand_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayRow {
    pub baseline: Condition,
    pub condition: Condition,
    pub distance_deg: f64,
    #[serde(flatten)]
    pub split: DelayDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeEntry {
    pub condition: Condition,
    pub profile: GazeProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationRow {
    pub distance_deg: f64,
    pub n: usize,
    pub mean_estimated_deg: f64,
    pub bias_deg: f64,
    pub sd_deg: Option<f64>,
    pub direction_error_mean_rad: f64,
    pub direction_error_sd_rad: Option<f64>,
}

/// Mean ± SD of one metric across distances, ready to plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub condition: Condition,
    pub metric: Metric,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub err: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvalidInput {
    pub source: String,
    pub error: String,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricIssue {
    pub participant_id: String,
    pub condition: Condition,
    pub trial_id: u32,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub report_version: String,
    /// Set by the caller; left out of determinism checks.
    pub generated_at: Option<String>,
    pub n_sessions: usize,
    pub invalid_inputs: Vec<InvalidInput>,
    pub metric_issues: Vec<MetricIssue>,
    pub trials: Vec<TrialRow>,
    pub aggregates: Vec<AggregateRow>,
    pub comparisons: Vec<Comparison>,
    pub fitts: Vec<FittsEntry>,
    pub velocity_fits: Vec<VelocityFitEntry>,
    pub delay: Vec<DelayRow>,
    pub gaze_profiles: Vec<GazeEntry>,
    pub estimation: Vec<EstimationRow>,
    pub series: Vec<PlotSeries>,
}

impl ReportBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle is always representable as JSON");
        s.push('\n');
        s
    }
}

/// A parsed (or rejected) session together with where it came from.
pub type SessionInput = (String, Result<SessionLog, SessionError>);

/// Builds the report for a set of sessions. Rejected inputs are listed in
/// `invalid_inputs` and otherwise ignored.
pub fn analyze(inputs: Vec<SessionInput>, cfg: &AnalysisConfig) -> ReportBundle {
    let mut invalid_inputs = Vec::new();
    let mut sessions = Vec::new();
    for (source, result) in inputs {
        match result {
            Ok(log) => sessions.push(log),
            Err(e) => invalid_inputs.push(InvalidInput { path: e.path().map(str::to_string), error: e.to_string(), source }),
        }
    }
    invalid_inputs.sort_by(|a, b| a.source.cmp(&b.source));
    analyze_sessions(&sessions, invalid_inputs, cfg)
}

fn analyze_sessions(sessions: &[SessionLog], invalid_inputs: Vec<InvalidInput>, cfg: &AnalysisConfig) -> ReportBundle {
    let per_session = par::map_slice(cfg.execution, sessions, |log| session_rows(log, cfg));
    let mut trials = Vec::new();
    let mut metric_issues = Vec::new();
    for (rows, issues) in per_session {
        trials.extend(rows);
        metric_issues.extend(issues);
    }
    trials.sort_by(|a, b| {
        (&a.participant_id, a.condition, a.trial_id).cmp(&(&b.participant_id, b.condition, b.trial_id))
    });
    metric_issues.sort_by(|a, b| {
        (&a.participant_id, a.condition, a.trial_id).cmp(&(&b.participant_id, b.condition, b.trial_id))
    });

    let groups = group_values(&trials);
    let aggregates = aggregate(&groups);
    let comparisons = compare(&groups, cfg);
    let conditions: BTreeSet<Condition> =
        trials.iter().map(|r| r.condition).filter(|c| c.is_pointing()).collect();
    let fitts = conditions.iter().map(|&c| fitts_entry(&trials, c)).collect();
    let velocity_fits = conditions.iter().map(|&c| velocity_entry(&trials, c)).collect();
    let delay = delay_rows(&aggregates);
    let gaze_profiles = gaze_entries(sessions, cfg);
    let estimation = estimation_rows(sessions);
    let series = plot_series(&aggregates);
    ReportBundle {
        report_version: REPORT_VERSION.into(),
        generated_at: None,
        n_sessions: sessions.len(),
        invalid_inputs,
        metric_issues,
        trials,
        aggregates,
        comparisons,
        fitts,
        velocity_fits,
        delay,
        gaze_profiles,
        estimation,
        series,
    }
}

fn session_rows(log: &SessionLog, cfg: &AnalysisConfig) -> (Vec<TrialRow>, Vec<MetricIssue>) {
    let mut rows = Vec::new();
    let mut issues = Vec::new();
    let participant = &log.profile.participant_id;
    for trial in &log.trials {
        let spec = &trial.spec;
        if !spec.condition.is_pointing() {
            continue;
        }
        let empty = TrialRow {
            participant_id: participant.clone(),
            condition: spec.condition,
            distance_deg: spec.distance_deg,
            trial_id: spec.trial_id,
            outcome: trial.outcome,
            tct_ms: None,
            at_ms: None,
            mt_ms: None,
            kt_ms: None,
            path_length_deg: None,
            trajectory_excess_deg: None,
            overshoot_path_deg: None,
            mean_velocity_deg_per_s: None,
        };
        if trial.outcome == Outcome::Aborted {
            if cfg.include_aborted {
                let elapsed = trial.pointer_samples.last().map(|s| s.t_ms);
                rows.push(TrialRow { tct_ms: elapsed, ..empty });
            }
            continue;
        }
        match metrics::trial_metrics(trial, &log.geometry, &cfg.metrics) {
            Ok(m) => rows.push(TrialRow {
                tct_ms: Some(m.tct_ms),
                at_ms: Some(m.at_ms),
                mt_ms: Some(m.mt_ms),
                kt_ms: Some(m.kt_ms),
                path_length_deg: Some(m.path_length_deg),
                trajectory_excess_deg: Some(m.trajectory_excess_deg),
                overshoot_path_deg: Some(m.overshoot_path_deg),
                mean_velocity_deg_per_s: m.mean_velocity_deg_per_s,
                ..empty
            }),
            Err(e) => issues.push(MetricIssue {
                participant_id: participant.clone(),
                condition: spec.condition,
                trial_id: spec.trial_id,
                error: e.to_string(),
            }),
        }
    }
    (rows, issues)
}

/// Distances as map keys: the schedule only produces a handful of exact
/// values, so ordering on the bit pattern of a positive float is enough.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct DistanceKey(u64);

impl DistanceKey {
    fn new(d: f64) -> Self {
        Self(d.to_bits())
    }

    fn get(self) -> f64 {
        f64::from_bits(self.0)
    }
}

type Groups = BTreeMap<(Condition, DistanceKey, Metric), Vec<f64>>;

fn group_values(trials: &[TrialRow]) -> Groups {
    let mut groups = Groups::new();
    for row in trials {
        for metric in Metric::ALL {
            if let Some(v) = row.value(metric) {
                groups.entry((row.condition, DistanceKey::new(row.distance_deg), metric)).or_default().push(v);
            }
        }
    }
    groups
}

fn aggregate(groups: &Groups) -> Vec<AggregateRow> {
    groups
        .iter()
        .map(|(&(condition, d, metric), values)| AggregateRow {
            condition,
            distance_deg: d.get(),
            metric,
            n: values.len(),
            mean: stats::mean(values).expect("groups are never empty"),
            sd: stats::sample_sd(values),
        })
        .collect()
}

fn compare(groups: &Groups, cfg: &AnalysisConfig) -> Vec<Comparison> {
    let conditions: BTreeSet<Condition> = groups.keys().map(|k| k.0).collect();
    let conditions: Vec<Condition> = conditions.into_iter().collect();
    let mut out = Vec::new();
    for (i, &a) in conditions.iter().enumerate() {
        for &b in &conditions[i + 1..] {
            for (&(c, d, metric), values_a) in groups.range((a, DistanceKey(0), Metric::TctMs)..) {
                if c != a {
                    break;
                }
                let Some(values_b) = groups.get(&(b, d, metric)) else { continue };
                let r = mann_whitney(values_a, values_b, cfg.exact_threshold).expect("groups are non-empty and finite");
                out.push(Comparison {
                    condition_a: a,
                    condition_b: b,
                    distance: d.get(),
                    metric,
                    u: r.u_statistic,
                    p: r.p_two_sided,
                    method: r.method,
                    n_a: r.n_a,
                    n_b: r.n_b,
                    degenerate: r.degenerate,
                });
            }
        }
    }
    out
}

fn fitts_entry(trials: &[TrialRow], condition: Condition) -> FittsEntry {
    let points: Vec<(f64, f64)> = trials
        .iter()
        .filter(|r| r.condition == condition)
        .filter_map(|r| Some((index_of_difficulty(r.distance_deg, 1.0).ok()?, r.mt_ms? as f64 / 1000.0)))
        .collect();
    match fitts_fit(&points) {
        Ok(f) => FittsEntry {
            condition,
            n: points.len(),
            b: Some(f.b),
            ip: Some(f.index_of_performance),
            r_squared: Some(f.r_squared),
        },
        Err(_) => FittsEntry { condition, n: points.len(), b: None, ip: None, r_squared: None },
    }
}

fn velocity_entry(trials: &[TrialRow], condition: Condition) -> VelocityFitEntry {
    let (xs, ys): (Vec<f64>, Vec<f64>) = trials
        .iter()
        .filter(|r| r.condition == condition)
        .filter_map(|r| Some((r.distance_deg, r.mean_velocity_deg_per_s?)))
        .unzip();
    let fit = linear_fit(&xs, &ys).ok();
    VelocityFitEntry {
        condition,
        n: xs.len(),
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        r_squared: fit.map(|f| f.r_squared),
        grand_mean: stats::mean(&ys),
    }
}

/// Delay split of each ray condition against the full-field crosshair.
fn delay_rows(aggregates: &[AggregateRow]) -> Vec<DelayRow> {
    let baseline = Condition::CpFvf;
    let find = |c: Condition, d: f64, m: Metric| {
        aggregates.iter().find(|a| a.condition == c && a.distance_deg == d && a.metric == m).map(|a| a.mean)
    };
    let mut out = Vec::new();
    for condition in [Condition::SpSimPvl, Condition::SpPvl] {
        for d in DISTANCES_DEG {
            let (Some(l_sim), Some(v_sim), Some(l_base), Some(v_base)) = (
                find(condition, d, Metric::PathLengthDeg),
                find(condition, d, Metric::MeanVelocityDegPerS),
                find(baseline, d, Metric::PathLengthDeg),
                find(baseline, d, Metric::MeanVelocityDegPerS),
            ) else {
                continue;
            };
            if let Ok(split) = delay_decomposition(l_sim, v_sim, l_base, v_base) {
                out.push(DelayRow { baseline, condition, distance_deg: d, split });
            }
        }
    }
    out
}

fn gaze_entries(sessions: &[SessionLog], cfg: &AnalysisConfig) -> Vec<GazeEntry> {
    let mut by_condition: BTreeMap<Condition, Vec<(&TrialRecord, &ScreenGeometry)>> = BTreeMap::new();
    for log in sessions {
        for trial in log.trials.iter().filter(|t| t.spec.condition.is_pointing()) {
            by_condition.entry(trial.spec.condition).or_default().push((trial, &log.geometry));
        }
    }
    by_condition
        .into_iter()
        .filter_map(|(condition, trials)| {
            let profile = gaze_profile_pooled(trials, &cfg.metrics).ok()?;
            Some(GazeEntry { condition, profile })
        })
        .collect()
}

fn estimation_rows(sessions: &[SessionLog]) -> Vec<EstimationRow> {
    let mut by_distance: BTreeMap<DistanceKey, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for log in sessions {
        for trial in &log.trials {
            if trial.spec.condition != Condition::Estimation || trial.outcome != Outcome::Completed {
                continue;
            }
            let Some(click) = trial.final_click() else { continue };
            let entry = by_distance.entry(DistanceKey::new(trial.spec.distance_deg)).or_default();
            entry.0.push(click.pos.norm());
            let err = click.pos.angle() - trial.spec.angle_rad;
            entry.1.push((err + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI);
        }
    }
    by_distance
        .into_iter()
        .map(|(d, (dist, dir))| {
            let mean = stats::mean(&dist).expect("non-empty");
            EstimationRow {
                distance_deg: d.get(),
                n: dist.len(),
                mean_estimated_deg: mean,
                bias_deg: mean - d.get(),
                sd_deg: stats::sample_sd(&dist),
                direction_error_mean_rad: stats::mean(&dir).expect("non-empty"),
                direction_error_sd_rad: stats::sample_sd(&dir),
            }
        })
        .collect()
}

fn plot_series(aggregates: &[AggregateRow]) -> Vec<PlotSeries> {
    let mut series: BTreeMap<(Condition, Metric), PlotSeries> = BTreeMap::new();
    for a in aggregates {
        let s = series.entry((a.condition, a.metric)).or_insert_with(|| PlotSeries {
            condition: a.condition,
            metric: a.metric,
            x: Vec::new(),
            y: Vec::new(),
            err: Vec::new(),
        });
        s.x.push(a.distance_deg);
        s.y.push(a.mean);
        s.err.push(a.sd);
    }
    series.into_values().collect()
}

#[cfg(test)]
mod tests;
