use std::net::SocketAddr;
use std::process::ExitCode;

use clap::Parser;
use sunlab_cli::cli::{Cli, Command};
use sunlab_cli::commands::{run_analyze, run_report, schedule, simulate, summary};
use sunlab_cli::server::{serve, AppState};
use sunlab_cli::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Schedule(args) => {
            if let Some(path) = schedule(&cli.data_dir, args)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Simulate(args) => {
            let files = simulate(&cli.data_dir, args)?;
            if let Some(dir) = files.first().and_then(|f| f.parent()) {
                eprintln!("wrote {} session files to {}", files.len(), dir.display());
            }
        }
        Command::Analyze(args) => {
            let done = run_analyze(&cli.data_dir, args)?;
            print!("{}", summary(&done.bundle));
            eprintln!(
                "wrote {} with {} tables and {} plots",
                done.report_path.display(),
                done.tables.len(),
                done.plots.len()
            );
        }
        Command::Report(args) => {
            let (bundle, files) = run_report(args)?;
            print!("{}", summary(&bundle));
            eprintln!("wrote {} files", files.len());
        }
        Command::Serve(args) => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError { code: CliError::IO, error: e.into() })?;
            let addr = SocketAddr::new(args.host, args.port);
            runtime
                .block_on(serve(AppState::new(&cli.data_dir), addr, args.static_dir.clone()))
                .map_err(|e| CliError { code: CliError::IO, error: anyhow::Error::new(e).context(format!("cannot serve on {addr}")) })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(CliError::USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
