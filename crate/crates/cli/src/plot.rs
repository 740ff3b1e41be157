//! Plot files from a run's `events.csv`: a gnuplot data file (one indexed
//! block per service) and an SVG with one panel per service.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use hpalab::kb::CSV_HEADER;
use hpalab::ScenarioReport;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// CPU demand vs CPU capacity, milliCPU.
    Capacity,
    /// Utilization with the scaling threshold, percent.
    Utilization,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::Capacity => "capacity",
            PlotKind::Utilization => "utilization",
        }
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "capacity" => Ok(PlotKind::Capacity),
            "utilization" => Ok(PlotKind::Utilization),
            other => Err(format!("unknown plot kind `{other}` (expected capacity or utilization)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub time: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub struct PlotArgs {
    pub csv: PathBuf,
    pub kind: PlotKind,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Reads an exported run. Fails on an unexpected header or no data rows.
pub fn read_events(path: &Path) -> anyhow::Result<Vec<csv::StringRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        bail!(
            "{}: unknown column schema `{}` (expected `{}`)",
            path.display(),
            header.iter().collect::<Vec<_>>().join(","),
            CSV_HEADER.join(",")
        );
    }
    let rows = reader.records().collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(rows)
}

fn column(name: &str) -> usize {
    CSV_HEADER.iter().position(|c| *c == name).expect("known column")
}

fn number(row: &csv::StringRecord, name: &str) -> anyhow::Result<f64> {
    let raw = &row[column(name)];
    raw.parse().map_err(|_| anyhow!("bad {name} value `{raw}`"))
}

/// Per-service series. For `Capacity`, `a` is demand and `b` capacity; for
/// `Utilization`, `a` is utilization and `b` the threshold.
pub fn series(
    rows: &[csv::StringRecord],
    kind: PlotKind,
    thresholds: &dyn Fn(&str) -> Option<f64>,
) -> anyhow::Result<BTreeMap<String, Series>> {
    let mut out: BTreeMap<String, Series> = BTreeMap::new();
    for row in rows {
        let service = &row[column("service")];
        let (a, b) = match kind {
            PlotKind::Capacity => (number(row, "demand")?, number(row, "capacity")?),
            PlotKind::Utilization => {
                let tmv = thresholds(service).ok_or_else(|| anyhow!("no threshold for `{service}`"))?;
                (number(row, "cmv")?, tmv)
            }
        };
        let s = out.entry(service.to_string()).or_default();
        s.time.push(number(row, "time")?);
        s.a.push(a);
        s.b.push(b);
    }
    Ok(out)
}

pub fn render_dat(series: &BTreeMap<String, Series>, kind: PlotKind) -> String {
    let (a, b) = labels(kind);
    let mut out = String::new();
    for (i, (name, s)) in series.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {name}");
        let _ = writeln!(out, "# time {a} {b}");
        for k in 0..s.time.len() {
            let _ = writeln!(out, "{} {:.2} {:.2}", s.time[k], s.a[k], s.b[k]);
        }
    }
    out
}

fn labels(kind: PlotKind) -> (&'static str, &'static str) {
    match kind {
        PlotKind::Capacity => ("demand_m", "capacity_m"),
        PlotKind::Utilization => ("utilization_pct", "threshold_pct"),
    }
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 140.0;
const MARGIN: f64 = 40.0;

pub fn render_svg(series: &BTreeMap<String, Series>, kind: PlotKind) -> String {
    let height = series.len() as f64 * (PANEL_H + MARGIN) + MARGIN;
    let width = PANEL_W + 2.0 * MARGIN;
    let (a_label, b_label) = labels(kind);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, (name, s)) in series.iter().enumerate() {
        let top = MARGIN + i as f64 * (PANEL_H + MARGIN);
        let t_max = s.time.iter().copied().fold(1.0, f64::max);
        let y_max = s.a.iter().chain(&s.b).copied().fold(1.0, f64::max) * 1.1;
        let point = |t: f64, y: f64| {
            (
                MARGIN + t / t_max * PANEL_W,
                top + PANEL_H - y / y_max * PANEL_H,
            )
        };
        let polyline = |ys: &[f64]| {
            s.time
                .iter()
                .zip(ys)
                .map(|(&t, &y)| {
                    let (x, y) = point(t, y);
                    format!("{x:.1},{y:.1}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN}" y="{top}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{:.1}">{name}: {a_label} (blue), {b_label} (red), max {:.0}</text>"#,
            top - 6.0,
            y_max / 1.1
        );
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.2" points="{}"/>"##,
            polyline(&s.a)
        );
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="#d62728" stroke-width="1.2" stroke-dasharray="4 2" points="{}"/>"##,
            polyline(&s.b)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn sibling_report(csv: &Path) -> Option<ScenarioReport> {
    let path = csv.parent()?.join("report.json");
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

/// Writes `plot_<kind>.dat` and `plot_<kind>.svg` next to the CSV (or into
/// `out`) and returns their paths.
pub fn cmd_plot(args: &PlotArgs) -> Result<Vec<PathBuf>, CliError> {
    let rows = read_events(&args.csv).map_err(CliError::Config)?;
    let report = match (args.kind, args.threshold) {
        (PlotKind::Utilization, None) => Some(sibling_report(&args.csv).ok_or_else(|| {
            CliError::Config(anyhow!(
                "utilization plots need --threshold or a report.json next to {}",
                args.csv.display()
            ))
        })?),
        _ => None,
    };
    let thresholds = |service: &str| {
        args.threshold.or_else(|| {
            report
                .as_ref()
                .and_then(|r| r.services.iter().find(|s| s.name == service).map(|s| s.tmv))
        })
    };
    let series = series(&rows, args.kind, &thresholds).map_err(CliError::Config)?;

    let dir = match &args.out {
        Some(d) => d.clone(),
        None => args.csv.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("plot_{}", args.kind.as_str());
    let dat = dir.join(format!("{stem}.dat"));
    let svg = dir.join(format!("{stem}.svg"));
    std::fs::write(&dat, render_dat(&series, args.kind)).with_context(|| format!("writing {}", dat.display()))?;
    std::fs::write(&svg, render_svg(&series, args.kind)).with_context(|| format!("writing {}", svg.display()))?;
    Ok(vec![dat, svg])
}
