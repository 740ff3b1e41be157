//! Runs scenarios end to end: simulate, record into a knowledge base,
//! export, and compute the report.

use std::path::{Path, PathBuf};

use crate::autoscaler::AutoscalerKind;
use crate::error::Result;
use crate::kb::{ExportFormat, KnowledgeBase, RunRecorder};
use crate::metrics::{compute_report, ScenarioReport};
use crate::sim::{run_scenario, RunOutcome, Scenario};

pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub report: ScenarioReport,
    pub events_csv: Vec<u8>,
    pub report_json: Vec<u8>,
}

impl RunArtifacts {
    /// `<root>/<scenario>/<autoscaler>`
    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(&self.outcome.scenario).join(self.outcome.autoscaler.as_str())
    }

    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let dir = self.dir(root);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("events.csv"), &self.events_csv)?;
        std::fs::write(dir.join("report.json"), &self.report_json)?;
        Ok(dir)
    }
}

pub fn run_id(scenario: &Scenario, kind: AutoscalerKind) -> String {
    format!("{}/{}", scenario.id, kind)
}

pub fn execute(scenario: &Scenario, kind: AutoscalerKind, seed: u64) -> Result<RunArtifacts> {
    let kb = KnowledgeBase::new();
    execute_with(&kb, scenario, kind, seed)
}

pub fn execute_with(kb: &KnowledgeBase, scenario: &Scenario, kind: AutoscalerKind, seed: u64) -> Result<RunArtifacts> {
    let id = run_id(scenario, kind);
    kb.register_run(&id)?;
    let recorder = RunRecorder::new(kb, id.clone());
    let outcome = run_scenario(scenario, kind, seed, &recorder)?;
    kb.close_run(&id)?;

    let mut report = compute_report(&outcome.snapshots, outcome.sample_period)?.labeled(&scenario.id, kind.as_str());
    report.arm_activations = outcome.arm_invocations;
    let events_csv = kb.export(&id, ExportFormat::Csv)?;
    let mut report_json = serde_json::to_vec_pretty(&report)?;
    report_json.push(b'\n');
    Ok(RunArtifacts {
        outcome,
        report,
        events_csv,
        report_json,
    })
}

/// Every (scenario, autoscaler) pair, scenarios in parallel. Output order is
/// scenario-major and independent of scheduling.
pub fn execute_matrix(scenarios: &[Scenario], kinds: &[AutoscalerKind], seed: u64) -> Result<Vec<RunArtifacts>> {
    let jobs: Vec<(&Scenario, AutoscalerKind)> = scenarios
        .iter()
        .flat_map(|s| kinds.iter().map(move |&k| (s, k)))
        .collect();
    let results: Vec<Result<RunArtifacts>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(s, k)| scope.spawn(move || execute(s, k, seed)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    });
    results.into_iter().collect()
}
