use std::process::{Command, Output};

fn photon_am(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photon-am")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn passing_suite_exits_zero() {
    let o = photon_am(&["--suite", "counter-rotating"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("suite: counter-rotating\n"));
    assert!(out.contains("PASS counter-rotating/S_M"));
    assert!(out.trim_end().ends_with("0 failed"));
}

#[test]
fn failing_check_exits_one() {
    let o = photon_am(&["--suite", "gauge-hiding", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("gauge-hiding/grid/S_M-vs-S_obs,") && l.ends_with(",false")));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["--suite", "nonexistent"][..],
        &["--format", "xml"],
        &["--shell", "1.0,-1", "--suite", "observable-commutators"],
        &["--tol", "-1"],
        &["--nmax", "zero"],
    ] {
        let o = photon_am(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("photon-am: "));
    }
}

#[test]
fn dimension_cap_is_a_configuration_error() {
    let o = photon_am(&["--suite", "canonical-commutators", "--dim-cap", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_schema_and_determinism() {
    let a = photon_am(&["--suite", "dirac", "--format", "csv", "--seed", "3"]);
    let b = photon_am(&["--suite", "dirac", "--format", "csv", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert_eq!(out.lines().next(), Some("check_id,anchor,residual,tolerance,pass"));
    let ids: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn json_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = photon_am(&["--suite", "field-consistency", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"suite\": \"field-consistency\""));
    assert!(text.contains("\"check_id\": \"field-consistency/parseval-energy\""));
    assert!(text.contains("\"tolerance\": \"inf\""));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# demo\nsuite = nonexistent\nformat = csv\nseed = 5\n").unwrap();
    let o = photon_am(&["--config", cfg.to_str().unwrap(), "--suite", "counter-rotating"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("check_id,anchor"));

    let o = photon_am(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_override_reaches_equality_checks() {
    let o = photon_am(&["--suite", "counter-rotating", "--tol", "1e-3", "--format", "csv"]);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("counter-rotating/S_M,") && l.contains(",1e-3,")));
}

#[test]
fn custom_grid_is_echoed() {
    let o = photon_am(&["--suite", "counter-rotating", "--grid", "0,0,1;1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("grid = 0,0,1;1,0,0"));
}
