//! Smart vs baseline comparison over a directory of reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use hpalab::metrics::HEADLINE_METRICS;
use hpalab::ScenarioReport;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub metric: String,
    pub unit: String,
    pub direction: String,
    pub smart: f64,
    pub baseline: f64,
    /// smart / baseline. 1.0 when both are zero, infinite when only the
    /// baseline is zero.
    pub ratio: f64,
    pub verdict: String,
}

pub fn ratio(smart: f64, baseline: f64) -> f64 {
    if baseline == 0.0 {
        if smart == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        smart / baseline
    }
}

fn verdict(smart: f64, baseline: f64, higher_is_better: bool) -> &'static str {
    if smart == baseline {
        "equal"
    } else if (smart > baseline) == higher_is_better {
        "smart better"
    } else {
        "smart worse"
    }
}

/// Pairs reports by scenario. Every scenario needs exactly one smart and one
/// baseline report.
pub fn compare_reports(reports: &[ScenarioReport]) -> anyhow::Result<Vec<ComparisonRow>> {
    let mut by_scenario: BTreeMap<&str, (Option<&ScenarioReport>, Option<&ScenarioReport>)> = BTreeMap::new();
    for r in reports {
        let slot = by_scenario.entry(r.scenario.as_str()).or_default();
        let side = match r.autoscaler.as_str() {
            "smart" => &mut slot.0,
            "baseline" => &mut slot.1,
            other => bail!("{}: unknown autoscaler `{other}`", r.scenario),
        };
        if side.replace(r).is_some() {
            bail!("{}: duplicate {} report", r.scenario, r.autoscaler);
        }
    }
    if by_scenario.is_empty() {
        bail!("no reports to compare");
    }

    let mut rows = Vec::new();
    for (scenario, pair) in by_scenario {
        let (smart, baseline) = match pair {
            (Some(s), Some(b)) => (s, b),
            (Some(_), None) => bail!("{scenario}: baseline report missing"),
            (None, Some(_)) => bail!("{scenario}: smart report missing"),
            (None, None) => unreachable!(),
        };
        for (metric, unit, higher_is_better) in HEADLINE_METRICS {
            let s = smart.metric(metric).expect("headline metric");
            let b = baseline.metric(metric).expect("headline metric");
            rows.push(ComparisonRow {
                scenario: scenario.to_string(),
                metric: metric.to_string(),
                unit: unit.to_string(),
                direction: if higher_is_better { "higher is better" } else { "lower is better" }.to_string(),
                smart: s,
                baseline: b,
                ratio: ratio(s, b),
                verdict: verdict(s, b, higher_is_better).to_string(),
            });
        }
    }
    Ok(rows)
}

fn fmt_ratio(r: f64) -> String {
    if r.is_finite() {
        format!("{r:.2}")
    } else {
        "inf".to_string()
    }
}

pub fn render_text(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    let mut current = "";
    for row in rows {
        if row.scenario != current {
            current = &row.scenario;
            let _ = writeln!(out, "\n{current}");
            let _ = writeln!(
                out,
                "  {:<32} {:>12} {:>12} {:>8}  {:<17} verdict",
                "metric", "smart", "baseline", "ratio", "direction"
            );
        }
        let _ = writeln!(
            out,
            "  {:<32} {:>12.2} {:>12.2} {:>8}  {:<17} {}",
            format!("{} ({})", row.metric, row.unit),
            row.smart,
            row.baseline,
            fmt_ratio(row.ratio),
            row.direction,
            row.verdict
        );
    }
    out
}

pub fn render_csv(rows: &[ComparisonRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "metric", "unit", "direction", "smart", "baseline", "ratio", "verdict"])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.metric.clone(),
            r.unit.clone(),
            r.direction.clone(),
            format!("{:.2}", r.smart),
            format!("{:.2}", r.baseline),
            fmt_ratio(r.ratio),
            r.verdict.clone(),
        ])?;
    }
    w.into_inner().map_err(|e| anyhow!("{}", e.error()))
}

/// Collects every `report.json` below `dir` (at `<scenario>/<autoscaler>/`).
pub fn load_reports(dir: &Path) -> anyhow::Result<Vec<ScenarioReport>> {
    let mut reports = Vec::new();
    let mut scenario_dirs: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .collect::<Result<_, _>>()?;
    scenario_dirs.sort_by_key(|e| e.file_name());
    for scenario in scenario_dirs {
        if !scenario.file_type()?.is_dir() {
            continue;
        }
        let mut kinds: Vec<_> = std::fs::read_dir(scenario.path())?.collect::<Result<_, _>>()?;
        kinds.sort_by_key(|e| e.file_name());
        for kind in kinds {
            let path = kind.path().join("report.json");
            if !path.is_file() {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let report: ScenarioReport =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Prints the comparison and writes `<dir>/comparison.csv`.
pub fn cmd_compare(dir: &Path) -> Result<String, CliError> {
    let reports = load_reports(dir).map_err(CliError::Config)?;
    let rows = compare_reports(&reports).map_err(CliError::Config)?;
    std::fs::write(dir.join("comparison.csv"), render_csv(&rows)?).context("writing comparison.csv")?;
    Ok(render_text(&rows))
}
