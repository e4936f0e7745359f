use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Metric, ReportBundle};
use crate::geometry::Condition;

/// File names written by [`write_csv_tables`].
pub const CSV_TABLES: [&str; 8] = [
    "trials.csv",
    "aggregates.csv",
    "comparisons.csv",
    "fitts.csv",
    "velocity_fits.csv",
    "delay.csv",
    "gaze.csv",
    "estimation.csv",
];

#[derive(Serialize)]
struct DelayCsv {
    baseline: Condition,
    condition: Condition,
    distance_deg: f64,
    delta_mt_ms: f64,
    delay_length_ms: f64,
    delay_velocity_ms: f64,
    length_fraction: Option<f64>,
    velocity_fraction: Option<f64>,
}

#[derive(Serialize)]
struct GazeCsv {
    condition: Condition,
    bin: usize,
    t_start: f64,
    t_end: f64,
    on_target: Option<f64>,
    on_cursor: Option<f64>,
    elsewhere: Option<f64>,
}

fn write<T: Serialize>(dir: &Path, name: &str, rows: impl IntoIterator<Item = T>) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_writer(File::create(&path)?);
    for row in rows {
        w.serialize(row).map_err(io::Error::other)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes every table of the bundle as CSV into `dir`. Numbers use the same
/// shortest round-trip formatting as the JSON view.
pub fn write_csv_tables(bundle: &ReportBundle, dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let delay = bundle.delay.iter().map(|d| DelayCsv {
        baseline: d.baseline,
        condition: d.condition,
        distance_deg: d.distance_deg,
        delta_mt_ms: d.split.delta_mt_ms,
        delay_length_ms: d.split.delay_length_ms,
        delay_velocity_ms: d.split.delay_velocity_ms,
        length_fraction: d.split.length_fraction,
        velocity_fraction: d.split.velocity_fraction,
    });
    let gaze = bundle.gaze_profiles.iter().flat_map(|entry| {
        let n = entry.profile.bins.len() as f64;
        entry.profile.bins.iter().enumerate().map(move |(i, b)| GazeCsv {
            condition: entry.condition,
            bin: i,
            t_start: i as f64 / n,
            t_end: (i + 1) as f64 / n,
            on_target: b.map(|b| b.on_target),
            on_cursor: b.map(|b| b.on_cursor),
            elsewhere: b.map(|b| b.elsewhere),
        })
    });
    // headers exist even for empty tables
    let paths = vec![
        write_with_header(dir, CSV_TABLES[0], &bundle.trials, TRIAL_HEADER)?,
        write_with_header(dir, CSV_TABLES[1], &bundle.aggregates, &["condition", "distance_deg", "metric", "n", "mean", "sd"])?,
        write_with_header(
            dir,
            CSV_TABLES[2],
            &bundle.comparisons,
            &["condition_a", "condition_b", "distance", "metric", "u", "p", "method", "n_a", "n_b", "degenerate"],
        )?,
        write_with_header(dir, CSV_TABLES[3], &bundle.fitts, &["condition", "n", "b", "ip", "r_squared"])?,
        write_with_header(
            dir,
            CSV_TABLES[4],
            &bundle.velocity_fits,
            &["condition", "n", "slope", "intercept", "r_squared", "grand_mean"],
        )?,
        write_with_header(dir, CSV_TABLES[5], &delay.collect::<Vec<_>>(), DELAY_HEADER)?,
        write_with_header(dir, CSV_TABLES[6], &gaze.collect::<Vec<_>>(), GAZE_HEADER)?,
        write_with_header(
            dir,
            CSV_TABLES[7],
            &bundle.estimation,
            &[
                "distance_deg",
                "n",
                "mean_estimated_deg",
                "bias_deg",
                "sd_deg",
                "direction_error_mean_rad",
                "direction_error_sd_rad",
            ],
        )?,
    ];
    Ok(paths)
}

const TRIAL_HEADER: &[&str] = &[
    "participant_id",
    "condition",
    "distance_deg",
    "trial_id",
    "outcome",
    "tct_ms",
    "at_ms",
    "mt_ms",
    "kt_ms",
    "path_length_deg",
    "trajectory_excess_deg",
    "overshoot_path_deg",
    "mean_velocity_deg_per_s",
];

const DELAY_HEADER: &[&str] = &[
    "baseline",
    "condition",
    "distance_deg",
    "delta_mt_ms",
    "delay_length_ms",
    "delay_velocity_ms",
    "length_fraction",
    "velocity_fraction",
];

const GAZE_HEADER: &[&str] = &["condition", "bin", "t_start", "t_end", "on_target", "on_cursor", "elsewhere"];

fn write_with_header<T: Serialize>(dir: &Path, name: &str, rows: &[T], header: &[&str]) -> io::Result<PathBuf> {
    if rows.is_empty() {
        let path = dir.join(name);
        let mut w = csv::Writer::from_writer(File::create(&path)?);
        w.write_record(header)?;
        w.flush()?;
        return Ok(path);
    }
    write(dir, name, rows)
}

/// Column names of the per-trial metrics, in table order.
pub fn metric_columns() -> [&'static str; 8] {
    Metric::ALL.map(Metric::as_str)
}
