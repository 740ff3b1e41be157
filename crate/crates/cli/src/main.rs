use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hpalab::config::AutoscalerSelection;
use hpalab_cli::compare::cmd_compare;
use hpalab_cli::plot::{cmd_plot, PlotArgs, PlotKind};
use hpalab_cli::run::{cmd_run, RunArgs};
use hpalab_cli::CliError;

#[derive(Parser)]
#[command(name = "hpalab", version, about = "Run and compare autoscaling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a config file.
    Run {
        config: PathBuf,
        /// smart, baseline or both. Overrides the config file.
        #[arg(long)]
        autoscaler: Option<AutoscalerSelection>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Overrides the config file's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare smart and baseline reports found under a results directory.
    Compare { dir: PathBuf },
    /// Turn a run's events.csv into a gnuplot data file and an SVG.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "capacity")]
        kind: PlotKind,
        /// Utilization threshold in percent. Defaults to the per-service
        /// threshold in the sibling report.json.
        #[arg(long)]
        threshold: Option<f64>,
        /// Output directory. Defaults to the CSV's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            autoscaler,
            out,
            seed,
        } => {
            let summary = cmd_run(&RunArgs {
                config,
                autoscaler,
                out: out.clone(),
                seed,
            })?;
            println!("{} run(s) written under {}", summary.runs.len(), out.display());
            print!("{}", summary.table);
        }
        Command::Compare { dir } => print!("{}", cmd_compare(&dir)?),
        Command::Plot {
            csv,
            kind,
            threshold,
            out,
        } => {
            for path in cmd_plot(&PlotArgs {
                csv,
                kind,
                threshold,
                out,
            })? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
