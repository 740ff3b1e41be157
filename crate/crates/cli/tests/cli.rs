use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hpalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpalab")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for scenario in std::fs::read_dir(root).unwrap() {
        let scenario = scenario.unwrap().path();
        if !scenario.is_dir() {
            continue;
        }
        for kind in std::fs::read_dir(&scenario).unwrap() {
            let report = kind.unwrap().path().join("report.json");
            if report.is_file() {
                out.push(report);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn default_matrix_writes_eighteen_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpalab(&["run", s(&config("default_matrix.toml")), "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = report_files(dir.path());
    assert_eq!(reports.len(), 18);
    assert!(dir.path().join("10R-50%/smart/events.csv").is_file());
    assert!(dir.path().join("comparison.csv").is_file());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("18 run(s)"));
    assert!(stdout.contains("2R-20%"));
}

#[test]
fn single_autoscaler_single_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = hpalab(&[
        "run",
        s(&config("5R-50.toml")),
        "--autoscaler",
        "smart",
        "--out",
        s(dir.path()),
    ]);
    assert!(out.status.success());
    assert_eq!(report_files(dir.path()), vec![dir.path().join("5R-50%/smart/report.json")]);
    assert!(!dir.path().join("comparison.csv").exists());
}

#[test]
fn malformed_config_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "version = 1\n[load]\ntotal_duration = 'soon'\n").unwrap();
    let out_dir = dir.path().join("runs");
    let out = hpalab(&["run", s(&bad), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());

    let invalid = dir.path().join("invalid.toml");
    std::fs::write(&invalid, "version = 1\n[matrix]\nmax_replicas = [0]\nthresholds = [50.0]\n").unwrap();
    let out = hpalab(&["run", s(&invalid), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());

    let out = hpalab(&["run", s(&dir.path().join("missing.toml")), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = hpalab(&["run", s(&config("two_services.toml")), "--out", s(d.path()), "--seed", "7"]);
        assert!(out.status.success());
    }
    for kind in ["smart", "baseline"] {
        for file in ["events.csv", "report.json"] {
            let p = format!("pair/{kind}/{file}");
            assert_eq!(std::fs::read(a.path().join(&p)).unwrap(), std::fs::read(b.path().join(&p)).unwrap(), "{p}");
        }
    }
}

#[test]
fn compare_reads_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    hpalab(&["run", s(&config("5R-50.toml")), "--out", s(dir.path())]);
    let out = hpalab(&["compare", s(dir.path())]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("cpu_underprovision")).unwrap();
    let cols: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(cols[2], "0.00", "{line}");
    assert!(cols[3].parse::<f64>().unwrap() > 0.0, "{line}");

    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert!(csv.starts_with("scenario,metric,unit,direction,smart,baseline,ratio,verdict\n"));
    assert_eq!(csv.lines().count(), 1 + 7);
}

#[test]
fn compare_identical_reports_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    hpalab(&["run", s(&config("5R-50.toml")), "--out", s(dir.path()), "--autoscaler", "smart"]);
    let report = std::fs::read_to_string(dir.path().join("5R-50%/smart/report.json")).unwrap();
    let twin = dir.path().join("5R-50%/baseline");
    std::fs::create_dir_all(&twin).unwrap();
    std::fs::write(twin.join("report.json"), report.replace("\"smart\"", "\"baseline\"")).unwrap();
    let out = hpalab(&["compare", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').nth(6), Some("1.00"), "{row}");
    }
}

#[test]
fn compare_without_baseline_fails() {
    let dir = tempfile::tempdir().unwrap();
    hpalab(&["run", s(&config("5R-50.toml")), "--out", s(dir.path()), "--autoscaler", "smart"]);
    let out = hpalab(&["compare", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("baseline report missing"));
}

fn frontend_rows(dat: &str) -> Vec<(f64, f64, f64)> {
    let block = dat.split("\n\n\n").find(|b| b.starts_with("# frontend")).unwrap();
    block
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn plots_capacity_curves() {
    let dir = tempfile::tempdir().unwrap();
    hpalab(&["run", s(&config("5R-50.toml")), "--out", s(dir.path())]);

    let smart_csv = dir.path().join("5R-50%/smart/events.csv");
    let out = hpalab(&["plot", s(&smart_csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dat = std::fs::read_to_string(dir.path().join("5R-50%/smart/plot_capacity.dat")).unwrap();
    let rows = frontend_rows(&dat);
    let crossing = rows.iter().position(|r| r.1 > 500.0).unwrap();
    assert!(rows[crossing..].iter().any(|r| r.2 > 500.0));
    assert!(dir.path().join("5R-50%/smart/plot_capacity.svg").is_file());

    let base_csv = dir.path().join("5R-50%/baseline/events.csv");
    assert!(hpalab(&["plot", s(&base_csv)]).status.success());
    let dat = std::fs::read_to_string(dir.path().join("5R-50%/baseline/plot_capacity.dat")).unwrap();
    assert!(frontend_rows(&dat).iter().all(|r| r.2 == 500.0));

    let out = hpalab(&["plot", s(&base_csv), "--kind", "utilization"]);
    assert!(out.status.success());
    let dat = std::fs::read_to_string(dir.path().join("5R-50%/baseline/plot_utilization.dat")).unwrap();
    assert!(frontend_rows(&dat).iter().all(|r| r.2 == 50.0));
}

#[test]
fn plot_rejects_empty_and_foreign_csv() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "time,service,cmv,cr,dr,max_r,sd,res_sd,res_dr,supply,demand,capacity\n").unwrap();
    let out = hpalab(&["plot", s(&empty)]);
    assert_eq!(out.status.code(), Some(2));

    let foreign = dir.path().join("foreign.csv");
    std::fs::write(&foreign, "a,b\n1,2\n").unwrap();
    let out = hpalab(&["plot", s(&foreign)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown column schema"));

    let lonely = dir.path().join("lonely.csv");
    std::fs::write(&lonely, "time,service,cmv,cr,dr,max_r,sd,res_sd,res_dr,supply,demand,capacity\n0,a,1.00,1,1,1,NoScale,NoScale,1,100,100,100\n").unwrap();
    let out = hpalab(&["plot", s(&lonely), "--kind", "utilization"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(hpalab(&["plot", s(&lonely), "--kind", "utilization", "--threshold", "50"]).status.success());
}
