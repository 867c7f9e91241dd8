use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use effbasis_cli::{check, report_resources, run, write_csv, write_report, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "effbasis",
    version,
    about = "Effective-basis ground-state experiments"
)]
struct Cli {
    /// Log progress and optimizer passes.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write `<name>.csv` and `<name>.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fixtures processed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print deepest-circuit CNOT and parameter counts as CSV.
    Resources {
        #[arg(long)]
        config: PathBuf,
        /// Also write `<name>_resources.csv` into this directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .format_timestamp(None)
        .init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Run {
            config,
            output,
            jobs,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = output
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            let report = run(&cfg, jobs);
            let (csv, json) = write_report(&report, &dir)?;
            eprintln!("wrote {} and {}", csv.display(), json.display());
            check(&report)
        }
        Command::Resources { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = report_resources(&cfg)?;
            write_csv(std::io::stdout().lock(), &rows)?;
            if let Some(dir) = output {
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("{}_resources.csv", cfg.name));
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_csv(file, &rows)?;
            }
            Ok(())
        }
    }
}
