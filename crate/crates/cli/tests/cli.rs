use std::process::Command;

use holodual_cli::report::{self, Comparison, Environment, Record};
use holodual_cli::{run_suite, CliError, RunConfig, Status, SuiteReport};

fn holodual(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_holodual")).args(args).output().expect("binary runs")
}

#[test]
fn harmonics_table_has_nine_at_degree_two() {
    let cfg = RunConfig { r_max: 3, ..RunConfig::default() };
    let rep = run_suite("harmonics", &cfg).unwrap();
    assert!(rep.pass);
    let table = &rep.artifacts["dimension_table"];
    let row = table.as_array().unwrap().iter().find(|r| r["r"] == 2).unwrap();
    assert_eq!(row["J"], 9);
    assert_eq!(row["basis_size"], 9);
}

#[test]
fn ball_example_reports_four_pi_squared() {
    let rep = run_suite("ball-example", &RunConfig::default()).unwrap();
    let r = rep.record("ball.contrast.g0").unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.expected.contains("4 pi^2"));
    assert!(rep.table.iter().any(|t| (t.value_re - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10));
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(matches!(run_suite("nope", &RunConfig::default()), Err(CliError::UnknownSuite(_))));
    assert_eq!(holodual(&["nope"]).status.code(), Some(2));
}

#[test]
fn config_file_round_trip_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let cfg = RunConfig { n: 1, r_max: 4, seed: 7, ..RunConfig::default() };
    std::fs::write(&path, cfg.to_toml()).unwrap();
    assert_eq!(RunConfig::load(&path).unwrap(), cfg);

    let out = holodual(&["harmonics", "--config", path.to_str().unwrap(), "--seed", "11", "--print-config"]);
    assert!(out.status.success());
    let effective = RunConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(effective, RunConfig { seed: 11, ..cfg });
}

#[test]
fn invalid_configuration_exits_with_two() {
    assert_eq!(holodual(&["harmonics", "--n", "0"]).status.code(), Some(2));
    assert_eq!(holodual(&["harmonics", "--resolution", "3x3"]).status.code(), Some(2));
}

#[test]
fn csv_table_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("ball.csv");
    let json_path = dir.path().join("ball.json");
    let a = holodual(&["ball-example", "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    let b = holodual(&["ball-example", "--out", json_path.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    let rows = report::table_from_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    let rep = report::from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert_eq!(rows, rep.table);
}

#[test]
fn json_output_is_reproducible() {
    let a = holodual(&["harmonics", "--rmax", "4"]);
    let b = holodual(&["harmonics", "--rmax", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rep = report::from_json(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(rep.summary.failed, 0);
}

#[test]
fn failed_checks_set_exit_status() {
    let out = holodual(&["ball-example", "--tol-pairing", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(!rep.pass);
    assert!(rep.summary.failed > 0);
}

#[test]
fn refusals_fail_only_when_strict() {
    let env = Environment {
        version: "0".into(),
        n: 2,
        radius: 1.0,
        r_max: 6,
        s_max: 4,
        q_max: 3,
        resolution: "32x32x24".into(),
        seed: 1,
    };
    let mut rep = SuiteReport::new("t", env);
    rep.records.push(Record {
        id: "near".into(),
        inputs_digest: report::digest(&["near"]),
        expected: "0".into(),
        value: f64::NAN,
        tolerance: 1e-6,
        comparison: Comparison::AtMost,
        status: Status::Refused,
        detail: "too close to the sphere".into(),
    });
    rep.finish();
    assert!(rep.pass);
    assert_eq!(rep.exit_code(false), 0);
    assert_eq!(rep.exit_code(true), 1);
    let back = report::from_json(&report::to_json(&rep)).unwrap();
    assert_eq!(back.summary.refused, 1);
    assert!(back.records[0].value.is_nan());
}
