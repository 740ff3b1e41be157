use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use hpalab::config::AutoscalerSelection;
use hpalab::experiment::execute_matrix;
use hpalab::ExperimentConfig;

use crate::compare::{compare_reports, render_csv, render_text};
use crate::CliError;

pub struct RunArgs {
    pub config: PathBuf,
    pub autoscaler: Option<AutoscalerSelection>,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

pub struct RunSummary {
    pub runs: Vec<PathBuf>,
    pub table: String,
}

/// Runs every scenario in the config under the selected autoscalers and
/// writes `<out>/<scenario>/<autoscaler>/{events.csv,report.json}`. With
/// both autoscalers, also writes `<out>/comparison.csv`.
///
/// Nothing is written when the config does not validate.
pub fn cmd_run(args: &RunArgs) -> Result<RunSummary, CliError> {
    let config = ExperimentConfig::load(&args.config).map_err(|e| CliError::Config(anyhow!(e)))?;
    let scenarios = config.scenarios().map_err(|e| CliError::Config(anyhow!(e)))?;
    let kinds = args.autoscaler.unwrap_or(config.autoscaler).kinds();
    let seed = args.seed.unwrap_or(config.seed);

    log::info!("{} scenario(s) x {} autoscaler(s), seed {seed}", scenarios.len(), kinds.len());
    let artifacts = execute_matrix(&scenarios, &kinds, seed).map_err(|e| CliError::Runtime(anyhow!(e)))?;

    let mut runs = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        let dir = a
            .write(&args.out)
            .with_context(|| format!("writing results under {}", args.out.display()))?;
        log::debug!("wrote {}", dir.display());
        runs.push(dir);
    }

    let reports: Vec<_> = artifacts.iter().map(|a| a.report.clone()).collect();
    let table = if kinds.len() == 2 {
        let rows = compare_reports(&reports)?;
        write_file(&args.out.join("comparison.csv"), &render_csv(&rows)?)?;
        render_text(&rows)
    } else {
        let mut t = String::new();
        for r in &reports {
            let _ = writeln!(
                t,
                "{:<10} {:<8} supply {:>9.2}m  underprovision {:>8.2}m  overprovision {:>8.2}m  arm {}",
                r.scenario, r.autoscaler, r.supply_cpu, r.cpu_underprovision, r.cpu_overprovision, r.arm_activations
            );
        }
        t
    };
    Ok(RunSummary { runs, table })
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
