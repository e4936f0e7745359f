use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sunlab", version, about = "Radial-cue pointer lab: schedules, synthetic participants, analysis and the experiment backend")]
pub struct Cli {
    /// Default storage for sessions, schedules and reports.
    #[arg(long, global = true, env = "SUNLAB_DATA_DIR", default_value = "sunlab-data")]
    pub data_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the seeded 24-trial schedule of one exercise.
    Schedule(ScheduleArgs),
    /// Run synthetic participants and write one session file each.
    Simulate(SimulateArgs),
    /// Ingest session files and write the report bundle with CSV tables.
    Analyze(AnalyzeArgs),
    /// Re-emit tables and plots from an existing report bundle.
    Report(ReportArgs),
    /// Serve the experiment API (and optionally the UI assets).
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// cp-pvl, sp-pvl, cp-fvf, sp-simpvl or estimation.
    #[arg(long)]
    pub condition: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file, `-` for stdout. Defaults to
    /// `<data-dir>/schedules/<condition>-seed<seed>.json`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Agent preset: cp-fvf, sp-simpvl, sp-pvl, cp-pvl or estimation.
    #[arg(long, default_value = "cp-fvf", conflicts_with = "agent_file")]
    pub agent: String,
    /// Agent model JSON instead of a preset.
    #[arg(long)]
    pub agent_file: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub participants: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to `<data-dir>/sessions`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Run participants one after another.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Session files, `.jsonl` corpora or directories of `*.session.json`.
    /// Defaults to `<data-dir>/sessions`.
    pub inputs: Vec<PathBuf>,
    /// Defaults to `<data-dir>/report`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Analysis configuration JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub include_aborted: bool,
    /// Largest per-group size that gets the exact Mann-Whitney p-value.
    #[arg(long)]
    pub exact_threshold: Option<usize>,
    /// Abort on the first invalid session instead of listing it.
    #[arg(long)]
    pub strict: bool,
    /// Also write SVG charts of the plot series.
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A `report.json` written by `analyze`.
    pub bundle: PathBuf,
    /// Defaults to the bundle's directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Built experiment UI to serve at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}
