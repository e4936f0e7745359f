use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use sunlab_core::analysis::{analyze, write_csv_tables, AnalysisConfig, ReportBundle, SessionInput};
use sunlab_core::geometry::generate_schedule;
use sunlab_core::session::{parse, parse_corpus, serialize};
use sunlab_core::simulator::{simulate_corpus, AgentModel};
use sunlab_core::{Condition, Execution};

use crate::cli::{AnalyzeArgs, ReportArgs, ScheduleArgs, SimulateArgs};
use crate::error::CliError;
use crate::plot::write_plots;

pub const SESSION_SUFFIX: &str = ".session.json";

pub fn sessions_dir(data_dir: &Path) -> PathBuf {
    data_dir.join("sessions")
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn schedule_json(condition: Condition, seed: u64) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&generate_schedule(condition, seed)).expect("schedules serialize");
    out.push(b'\n');
    out
}

/// Returns the path written, or `None` for stdout.
pub fn schedule(data_dir: &Path, args: &ScheduleArgs) -> Result<Option<PathBuf>, CliError> {
    let condition: Condition = args.condition.parse().map_err(CliError::usage)?;
    let bytes = schedule_json(condition, args.seed);
    match &args.out {
        Some(p) if p.as_os_str() == "-" => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(None)
        }
        out => {
            let path = out
                .clone()
                .unwrap_or_else(|| data_dir.join("schedules").join(format!("{condition}-seed{}.json", args.seed)));
            write_file(&path, &bytes)?;
            Ok(Some(path))
        }
    }
}

pub fn simulate(data_dir: &Path, args: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let (agent, label) = match &args.agent_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
            let agent = AgentModel::from_json(&text).map_err(CliError::usage)?;
            let label = path
                .file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.split('.').next().unwrap_or(n).to_string())
                .unwrap_or_else(|| agent.condition.to_string());
            (agent, label)
        }
        None => (AgentModel::preset(&args.agent).map_err(CliError::usage)?, args.agent.clone()),
    };
    if args.participants == 0 {
        eprintln!("warning: --participants 0, nothing to simulate");
        return Ok(Vec::new());
    }
    let out_dir = args.out_dir.clone().unwrap_or_else(|| sessions_dir(data_dir));
    let logs = simulate_corpus(&agent, &label, args.participants, args.seed, execution(args.sequential))
        .map_err(CliError::usage)?;
    let mut written = Vec::with_capacity(logs.len());
    for log in &logs {
        let path = out_dir.join(format!("{}{SESSION_SUFFIX}", log.profile.participant_id));
        write_file(&path, &serialize(log))?;
        written.push(path);
    }
    Ok(written)
}

/// Expands directories and corpora into one parse result per session.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<SessionInput>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| CliError::read(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
                    name.ends_with(SESSION_SUFFIX) || name.ends_with(".jsonl")
                })
                .collect();
            entries.sort();
            files.extend(entries);
        } else if path.exists() {
            files.push(path.clone());
        } else {
            return Err(CliError::usage(anyhow!("no such input: {}", path.display())));
        }
    }
    let mut inputs = Vec::new();
    for file in files {
        let source = file.display().to_string();
        let bytes = fs::read(&file).map_err(|e| CliError::read(&file, e))?;
        if file.extension().is_some_and(|e| e == "jsonl" || e == "ndjson") {
            let text = String::from_utf8_lossy(&bytes);
            inputs.extend(parse_corpus(&text).into_iter().map(|(line, r)| (format!("{source}:{line}"), r)));
        } else {
            inputs.push((source, parse(&bytes)));
        }
    }
    Ok(inputs)
}

pub fn analysis_config(args: &AnalyzeArgs) -> Result<AnalysisConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
            serde_json::from_str::<AnalysisConfig>(&text)
                .map_err(|e| CliError::usage(anyhow!("{}: {e}", path.display())))?
        }
        None => AnalysisConfig::default(),
    };
    cfg.metrics.validate().map_err(CliError::usage)?;
    cfg.include_aborted |= args.include_aborted;
    if let Some(t) = args.exact_threshold {
        cfg.exact_threshold = t;
    }
    cfg.execution = execution(args.sequential);
    Ok(cfg)
}

pub struct Analyzed {
    pub bundle: ReportBundle,
    pub report_path: PathBuf,
    pub tables: Vec<PathBuf>,
    pub plots: Vec<PathBuf>,
}

pub fn run_analyze(data_dir: &Path, args: &AnalyzeArgs) -> Result<Analyzed, CliError> {
    let cfg = analysis_config(args)?;
    let paths = if args.inputs.is_empty() { vec![sessions_dir(data_dir)] } else { args.inputs.clone() };
    let paths: Vec<PathBuf> = paths.into_iter().filter(|p| !args.inputs.is_empty() || p.exists()).collect();
    let inputs = collect_inputs(&paths)?;
    if inputs.is_empty() {
        return Err(CliError::usage(anyhow!("no session files to analyze")));
    }
    if args.strict {
        if let Some((source, Err(e))) = inputs.iter().find(|(_, r)| r.is_err()) {
            return Err(CliError::usage(anyhow!("{source}: {e}")));
        }
    }
    let mut bundle = analyze(inputs, &cfg);
    bundle.generated_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let out_dir = args.out_dir.clone().unwrap_or_else(|| data_dir.join("report"));
    let report_path = out_dir.join("report.json");
    write_file(&report_path, bundle.to_json().as_bytes())?;
    let tables = write_csv_tables(&bundle, &out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let plots = if args.plot { write_plots(&bundle, &out_dir.join("plots"))? } else { Vec::new() };
    Ok(Analyzed { bundle, report_path, tables, plots })
}

pub fn run_report(args: &ReportArgs) -> Result<(ReportBundle, Vec<PathBuf>), CliError> {
    let text = fs::read_to_string(&args.bundle).map_err(|e| CliError::read(&args.bundle, e))?;
    let bundle: ReportBundle =
        serde_json::from_str(&text).map_err(|e| CliError::usage(anyhow!("{}: {e}", args.bundle.display())))?;
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| args.bundle.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut written = write_csv_tables(&bundle, &out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    if args.plot {
        written.extend(write_plots(&bundle, &out_dir.join("plots"))?);
    }
    Ok((bundle, written))
}

/// Short human-readable digest of a bundle.
pub fn summary(bundle: &ReportBundle) -> String {
    let mut out = format!(
        "{} sessions, {} trials, {} invalid inputs, {} metric issues\n",
        bundle.n_sessions,
        bundle.trials.len(),
        bundle.invalid_inputs.len(),
        bundle.metric_issues.len()
    );
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
    for f in &bundle.fitts {
        out.push_str(&format!("fitts     {:<10} n={:<4} IP={} bits/s  R2={}\n", f.condition.as_str(), f.n, fmt(f.ip), fmt(f.r_squared)));
    }
    for v in &bundle.velocity_fits {
        out.push_str(&format!(
            "velocity  {:<10} n={:<4} slope={} intercept={} mean={}\n",
            v.condition.as_str(),
            v.n,
            fmt(v.slope),
            fmt(v.intercept),
            fmt(v.grand_mean)
        ));
    }
    let significant = bundle.comparisons.iter().filter(|c| c.p < 0.05).count();
    out.push_str(&format!("comparisons: {} tests, {significant} with p < 0.05\n", bundle.comparisons.len()));
    for bad in &bundle.invalid_inputs {
        out.push_str(&format!("invalid  {}: {}\n", bad.source, bad.error));
    }
    out
}
