use super::*;
use crate::geometry::generate_schedule;
use crate::session::{parse, serialize, ParticipantProfile};
use crate::simulator::{simulate_corpus, simulate_session, AgentModel};

fn corpus(preset: &str, n: usize, seed: u64) -> Vec<SessionInput> {
    let agent = AgentModel::preset(preset).unwrap();
    simulate_corpus(&agent, preset, n, seed, Execution::Parallel)
        .unwrap()
        .into_iter()
        .map(|log| (format!("{}.session.json", log.profile.participant_id), Ok(log)))
        .collect()
}

fn two_condition_bundle() -> ReportBundle {
    let mut inputs = corpus("cp-fvf", 3, 1);
    inputs.extend(corpus("sp-simpvl", 3, 2));
    analyze(inputs, &AnalysisConfig::default())
}

#[test]
fn metric_columns_are_named_exactly() {
    assert_eq!(
        tables::metric_columns(),
        [
            "tct_ms",
            "at_ms",
            "mt_ms",
            "kt_ms",
            "path_length_deg",
            "trajectory_excess_deg",
            "overshoot_path_deg",
            "mean_velocity_deg_per_s"
        ]
    );
}

#[test]
fn bundle_sections() {
    let b = two_condition_bundle();
    assert_eq!(b.n_sessions, 6);
    assert_eq!(b.trials.len(), 144);
    assert!(b.metric_issues.is_empty());
    // one Fitts and velocity entry per condition present
    let fitts: Vec<Condition> = b.fitts.iter().map(|f| f.condition).collect();
    assert_eq!(fitts, vec![Condition::CpFvf, Condition::SpSimPvl]);
    assert_eq!(b.velocity_fits.len(), 2);
    // 4 distances × 8 metrics, all between the two conditions
    assert_eq!(b.comparisons.len(), 32);
    for c in &b.comparisons {
        assert!(c.p > 0.0 && c.p <= 1.0);
        assert_eq!((c.n_a, c.n_b), (18, 18));
        assert_eq!(c.method, MwMethod::NormalApprox);
    }
    assert_eq!(b.delay.len(), 4);
    assert_eq!(b.gaze_profiles.len(), 1);
    assert_eq!(b.gaze_profiles[0].condition, Condition::SpSimPvl);
    assert!(b.estimation.is_empty());
    assert_eq!(b.series.len(), 16);
}

#[test]
fn aggregates_are_recomputable_from_the_trial_table() {
    let b = two_condition_bundle();
    for a in &b.aggregates {
        let values: Vec<f64> = b
            .trials
            .iter()
            .filter(|r| r.condition == a.condition && r.distance_deg == a.distance_deg)
            .filter_map(|r| r.value(a.metric))
            .collect();
        assert_eq!(values.len(), a.n);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!((mean - a.mean).abs() <= 1e-12 * mean.abs().max(1.0));
    }
}

#[test]
fn report_is_deterministic_across_execution_modes() {
    let mut inputs = corpus("cp-fvf", 2, 5);
    inputs.extend(corpus("sp-simpvl", 2, 6));
    let seq = analyze(inputs.iter().map(|(s, r)| (s.clone(), Ok(r.as_ref().unwrap().clone()))).collect(), &AnalysisConfig {
        execution: Execution::Sequential,
        ..Default::default()
    });
    let par = analyze(inputs, &AnalysisConfig::default());
    assert_eq!(seq.to_json(), par.to_json());
}

#[test]
fn invalid_inputs_are_listed_and_skipped() {
    let mut inputs = corpus("cp-fvf", 1, 3);
    let mut bytes = serialize(inputs[0].1.as_ref().unwrap());
    bytes.truncate(bytes.len() / 2);
    inputs.push(("broken.session.json".into(), parse(&bytes)));
    let b = analyze(inputs, &AnalysisConfig::default());
    assert_eq!(b.n_sessions, 1);
    assert_eq!(b.invalid_inputs.len(), 1);
    assert_eq!(b.invalid_inputs[0].source, "broken.session.json");
}

#[test]
fn aborted_trials_are_opt_in() {
    let mut inputs = corpus("cp-fvf", 1, 3);
    let log = inputs[0].1.as_mut().unwrap();
    log.trials[0].outcome = Outcome::Aborted;
    log.trials[0].click_events.clear();
    let default = analyze(inputs.iter().map(|(s, r)| (s.clone(), Ok(r.as_ref().unwrap().clone()))).collect(), &AnalysisConfig::default());
    assert_eq!(default.trials.len(), 23);
    let with = analyze(inputs, &AnalysisConfig { include_aborted: true, ..Default::default() });
    assert_eq!(with.trials.len(), 24);
    let row = with.trials.iter().find(|r| r.outcome == Outcome::Aborted).unwrap();
    assert!(row.tct_ms.is_some() && row.mt_ms.is_none());
}

#[test]
fn estimation_sessions_feed_the_estimation_table() {
    let agent = AgentModel::preset("estimation").unwrap().with_seed(8);
    let schedule = generate_schedule(Condition::Estimation, 8);
    let profile = ParticipantProfile { participant_id: "e01".into(), ..Default::default() };
    let log = simulate_session(&agent, &schedule, profile).unwrap();
    let b = analyze(vec![("e".into(), Ok(log))], &AnalysisConfig::default());
    assert!(b.trials.is_empty());
    assert_eq!(b.estimation.len(), 4);
    assert!(b.estimation.iter().all(|e| e.n == 6));
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let b = two_condition_bundle();
    let dir = std::env::temp_dir().join(format!("sunlab-csv-{}", std::process::id()));
    let paths = write_csv_tables(&b, &dir).unwrap();
    assert_eq!(paths.len(), CSV_TABLES.len());
    let json: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
    for (table, key) in [("trials.csv", "trials"), ("aggregates.csv", "aggregates"), ("comparisons.csv", "comparisons")] {
        let mut reader = csv::Reader::from_path(dir.join(table)).unwrap();
        let headers = reader.headers().unwrap().clone();
        let rows = json[key].as_array().unwrap();
        let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(records.len(), rows.len());
        for (record, row) in records.iter().zip(rows) {
            for (h, cell) in headers.iter().zip(record.iter()) {
                let v = &row[h];
                let expected = match v {
                    serde_json::Value::Null => String::new(),
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                assert_eq!(cell, expected, "{table}.{h}");
            }
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
