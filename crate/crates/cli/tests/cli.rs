use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ddns(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ddns"));
    cmd.args(args).env_remove("DDNS_CHECK_OVERRIDE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("ddns runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn missing_config_is_a_config_error() {
    let out = ddns(&["simulate", "/nonexistent/run.toml"], &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "seed = 1\nunknown_key = 3\n").unwrap();
    let out = ddns(&["sweep", path.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_passes_and_an_override_fails_it() {
    let ok = ddns(&["check"], &[]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("energy_balance"));

    let bad = ddns(&["check"], &[("DDNS_CHECK_OVERRIDE", "energy_balance=-1")]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("energy_balance"));

    let unknown = ddns(&["check"], &[("DDNS_CHECK_OVERRIDE", "no_such_check=1")]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn simulate_writes_series_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ddns(
        &[
            "simulate",
            config("laminar_sweep.toml").to_str().unwrap(),
            "--output-dir",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let series = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert!(series.starts_with("t,energy,enstrophy,palinstrophy,injection,linf,l1,l2"));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("report.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(report["measure"]
        .as_table()
        .unwrap()
        .contains_key("dissipation_rate"));
}

#[test]
fn sweep_writes_members_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = ddns(
        &[
            "sweep",
            config("laminar_sweep.toml").to_str().unwrap(),
            "--output-dir",
            dir.path().to_str().unwrap(),
            "--workers",
            "2",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "nu,mean_enstrophy,mean_palinstrophy,dissipation_rate,balance_gap,telescoping_slack,T,t0"
    );
    assert_eq!(lines.count(), 4);
    assert!(dir.path().join("trends.toml").exists());
}

#[test]
fn sweep_member_blow_up_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unstable.toml");
    std::fs::write(
        &path,
        r#"
seed = 3
observer_stride = 1
sweep = [2.0, 0.02]

[grid]
points_per_side = 32

[solver]
nu = 2.0
gamma = 0.1
dt = 0.1
t0 = 0.0
horizon = 20.0

[forcing]
kind = "single_mode"
k = [1, 0]
amplitude = 1.0

[initial]
kind = "random"
k_min = 1
k_max = 8
l2_norm = 200.0
"#,
    )
    .unwrap();
    let out = ddns(
        &[
            "sweep",
            path.to_str().unwrap(),
            "--output-dir",
            dir.path().join("out").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("out/failures.toml").exists());
}
