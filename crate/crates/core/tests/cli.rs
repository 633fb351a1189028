use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_uamcas"));
    c.env_remove("UAMCAS_PACK_DIR");
    c
}

fn pack_file(id: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("pack").join(format!("{id}.scn"))
}

fn run_scenario(id: &str, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(pack_file(id)).arg("--out").arg(out).args(extra).output().unwrap()
}

fn report_row(out: &Path) -> Vec<String> {
    let text = fs::read_to_string(out.join("report.csv")).unwrap();
    text.lines().nth(1).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn reference_run_lands_with_theoretical_time() {
    let d = tempfile::tempdir().unwrap();
    let o = run_scenario("ref-route1", d.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let row = report_row(d.path());
    let t_sim: f64 = row[3].parse().unwrap();
    assert!((t_sim - 692.0).abs() <= 692.0 * 0.02);
    assert!(d.path().join("ref-route1_trace.csv").exists());
    assert!(d.path().join("report.json").exists());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_scenario("sc14", d.path(), &[]).status.code(), Some(2));
    assert_eq!(run_scenario("ground-5", d.path(), &[]).status.code(), Some(3));
    let missing = bin().args(["run", "/no/such/file.scn"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("cannot read"));
}

#[test]
fn compare_writes_both_traces_and_cpa_columns() {
    let d = tempfile::tempdir().unwrap();
    let o = run_scenario("sc06", d.path(), &["--compare", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("sc06_trace_cas_off.csv").exists());
    assert!(!d.path().join("report.json").exists());
    let row = report_row(d.path());
    let (with, without): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
    assert!(with >= without);
}

#[test]
fn dt_and_config_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("coarse.cfg");
    fs::write(&cfg, "# coarse\nSET dt 0.5\n").unwrap();
    let o = bin()
        .arg("run")
        .arg(pack_file("ref-route2"))
        .arg("--out")
        .arg(d.path())
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let trace = fs::read_to_string(d.path().join("ref-route2_trace.csv")).unwrap();
    let t1: f64 = trace.lines().nth(2).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((t1 - 0.5).abs() < 1e-9);
    let bad = bin().args(["run", "--dt", "-1"]).arg(pack_file("ref-route2")).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn validate_reports_ok_and_every_error() {
    let ok = bin().arg("validate").arg(pack_file("sc01")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "OK");

    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.scn");
    let text = fs::read_to_string(pack_file("ref-route1")).unwrap();
    fs::write(&bad, format!("{text}FLY AWAY\nSET cruise_speed fast\n")).unwrap();
    let o = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 2, "{err}");
    assert!(err.contains(":42: unknown directive"), "{err}");
    assert!(err.contains(":43: malformed number \"fast\""), "{err}");

    let dir = bin().arg("validate").arg(d.path()).output().unwrap();
    assert_eq!(dir.status.code(), Some(1));
    assert!(!dir.stderr.is_empty());
}

#[test]
fn pack_command_writes_the_shipped_files() {
    let d = tempfile::tempdir().unwrap();
    let o = bin().args(["pack", "--out"]).arg(d.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let shipped = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("pack");
    for e in fs::read_dir(&shipped).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(fs::read(shipped.join(&name)).unwrap(), fs::read(d.path().join(&name)).unwrap());
    }
}

#[test]
fn batch_from_pack_dir_env() {
    let d = tempfile::tempdir().unwrap();
    let packdir = d.path().join("mini");
    fs::create_dir(&packdir).unwrap();
    for id in ["ref-route1", "sc03"] {
        fs::copy(pack_file(id), packdir.join(format!("{id}.scn"))).unwrap();
    }
    let out = d.path().join("out");
    let o = bin().args(["batch", "--out"]).arg(&out).env("UAMCAS_PACK_DIR", &packdir).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 3);
    assert!(out.join("plot/delays.csv").exists() && out.join("plot/cpa.csv").exists());
    assert!(out.join("traces/sc03_cas_off.csv").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("mean D_A"));
}
