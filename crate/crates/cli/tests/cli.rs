use std::io::Write;
use std::process::{Command, Output, Stdio};

use probflux_cli::records::{
    ConvergenceRow, FnnRecord, GdsRow, LimitersRecord, McRecord, SolveRow, Table,
};
use probflux_core::markov::{StabilityReport, StabilitySummary};

fn probflux(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_probflux"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn check_config(scheme: &str) -> String {
    format!(
        r#"{{"scheme": {{"name": "{scheme}"}},
            "problem": {{"law": "advection", "a": 1.0, "u0": "constant", "value": 1.0}},
            "grid": {{"mode": "cone", "n": 4, "h": 1.0, "tau": 0.5}}}}"#
    )
}

/// Drops the `# lambda=` line and parses the remaining CSV rows.
fn csv_rows<T: serde::de::DeserializeOwned>(text: &str) -> (f64, Vec<T>) {
    let (first, body) = text.split_once('\n').unwrap();
    let lambda = first.strip_prefix("# lambda=").unwrap().parse().unwrap();
    let rows = csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .unwrap();
    (lambda, rows)
}

#[test]
fn check_upwind_is_probabilistic() {
    let text = stdout(&probflux(&["check"], &check_config("upwind")));
    let summary: StabilitySummary = serde_json::from_str(&text).unwrap();
    assert!(summary.probabilistic);
    assert_eq!(summary.cfl_bound, 1.0);
    assert_eq!(summary.lambda, 0.5);
    assert_eq!(summary.v_mc, -1.0);
}

#[test]
fn check_lax_wendroff_reports_violation_without_failing() {
    let out = probflux(&["check", "-"], &check_config("lax-wendroff"));
    let summary: StabilitySummary = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!summary.probabilistic);
    assert_eq!(summary.violated_entries, vec![(1, -0.125)]);
}

#[test]
fn strict_check_exits_with_report() {
    let out = probflux(&["check", "--strict"], &check_config("lax-wendroff"));
    assert_eq!(out.status.code(), Some(3));
    let report: StabilityReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.violated_entries, vec![(1, -0.125)]);
    assert_eq!(report.lambda, 0.5);
}

#[test]
fn strict_solve_exits_with_stability_code() {
    let out = probflux(&["solve", "--strict"], &check_config("lax-wendroff"));
    assert_eq!(out.status.code(), Some(3));
    let out = probflux(&["solve"], &check_config("lax-wendroff"));
    assert!(out.status.success());
}

#[test]
fn solve_keeps_constant_data() {
    let text = stdout(&probflux(&["solve"], &check_config("lax-friedrichs")));
    let (lambda, rows) = csv_rows::<SolveRow>(&text);
    assert_eq!(lambda, 0.5);
    assert_eq!(rows.len(), 9 + 7 + 5 + 3 + 1);
    assert!(rows.iter().all(|r| r.u == 1.0));
    let apex = rows.last().unwrap();
    assert_eq!((apex.layer, apex.i, apex.x, apex.t), (4, 4, 4.0, 2.0));
}

#[test]
fn periodic_solve_writes_every_step() {
    let cfg = r#"{"scheme": {"name": "upwind"},
        "problem": {"law": "advection", "a": 1.0, "u0": "gauss", "center": 0.5, "width": 0.1},
        "grid": {"mode": "periodic", "m": 10, "h": 0.1, "tau": 0.1, "steps": 10}}"#;
    let (_, rows) = csv_rows::<SolveRow>(&stdout(&probflux(&["solve"], cfg)));
    assert_eq!(rows.len(), 110);
    // unit CFL: after m steps the profile is back where it started
    for i in 0..10 {
        assert!((rows[i].u - rows[100 + i].u).abs() < 1e-14);
    }
}

#[test]
fn json_tables_round_trip() {
    let cfg = r#"{"scheme": {"name": "upwind"},
        "problem": {"law": "advection", "a": 1.0, "u0": "sine"},
        "grid": {"mode": "cone", "n": 3, "h": 0.5, "tau": 0.25},
        "output": {"format": "json"}}"#;
    let table: Table<Vec<SolveRow>> =
        serde_json::from_str(&stdout(&probflux(&["solve"], cfg))).unwrap();
    assert_eq!(table.lambda, 0.5);
    assert_eq!(table.rows.len(), 16);
}

#[test]
fn unknown_fields_are_rejected_with_a_line_number() {
    let cfg =
        "{\n  \"scheme\": {\"name\": \"upwind\"},\n  \"grid\": {\"mode\": \"cone\", \"nn\": 3}\n}";
    let out = probflux(&["solve"], cfg);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("unknown field `nn`") && err.contains("line 3"),
        "{err}"
    );
}

#[test]
fn config_errors_exit_two() {
    let cases = [
        (vec!["check"], "not json"),
        (
            vec!["check"],
            r#"{"scheme": {"name": "leapfrog"}, "problem": {"law": "advection", "a": 1, "u0": "sine"}, "grid": {"mode": "cone", "n": 2, "h": 1, "tau": 1}}"#,
        ),
        (vec!["check"], r#"{"command": "solve"}"#),
        (vec!["run"], r#"{}"#),
        (
            vec!["solve"],
            r#"{"problem": {"law": "advection", "a": 1, "u0": "sine"}}"#,
        ),
        (vec!["limiters"], r#"{"limiters": {"v": 0}}"#),
        (vec!["limiters"], r#"{"limiters": {"v": 1, "gamma2": 0.5}}"#),
        (
            vec!["check"],
            r#"{"scheme": {"name": "upwind"}, "problem": {"law": "advection", "a": 1, "u0": "sine"}, "grid": {"mode": "cone", "n": 2, "h": 1, "tau": 1}, "output": {"format": "csv"}}"#,
        ),
    ];
    for (args, cfg) in cases {
        let out = probflux(&args, cfg);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?} {cfg}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn stochastic_commands_need_a_seed() {
    let cfg = r#"{"scheme": {"name": "upwind"},
        "problem": {"law": "advection", "a": 1.0, "u0": "gauss", "width": 1.0},
        "grid": {"mode": "cone", "n": 3, "h": 1.0, "tau": 0.5},
        "mc": {"n_paths": 100}}"#;
    assert_eq!(probflux(&["mc"], cfg).status.code(), Some(2));
    let record: McRecord =
        serde_json::from_str(&stdout(&probflux(&["mc", "--seed", "3"], cfg))).unwrap();
    assert_eq!(record.seed, 3);
    assert_eq!((record.layer, record.index), (3, 3));
    assert_eq!(record.lambda, 0.5);
    assert!(record.z_score.unwrap().abs() < 5.0);
}

#[test]
fn seed_flag_overrides_config() {
    let cfg = |seed: u64| {
        format!(
            r#"{{"command": "mc", "scheme": {{"name": "upwind"}},
                "problem": {{"law": "advection", "a": 1.0, "u0": "gauss", "width": 1.0}},
                "grid": {{"mode": "cone", "n": 3, "h": 1.0, "tau": 0.5}},
                "mc": {{"n_paths": 1000, "seed": {seed}}}}}"#
        )
    };
    let a = stdout(&probflux(&["run", "--seed", "9"], &cfg(1)));
    let b = stdout(&probflux(&["run"], &cfg(9)));
    assert_eq!(a, b);
}

#[test]
fn limiters_report_roots_and_bound() {
    let text = stdout(&probflux(
        &["limiters"],
        r#"{"limiters": {"v": 1.0}, "grid": {"mode": "cone", "n": 1, "h": 1, "tau": 0.25}}"#,
    ));
    let rec: LimitersRecord = serde_json::from_str(&text).unwrap();
    assert_eq!((rec.gamma1, rec.gamma4), (-3.0, 0.0));
    assert_eq!(rec.cfl_bound, 0.25);
    assert_eq!(rec.lambda, Some(0.25));
    assert_eq!(rec.limiter_feasible, Some(true));

    let rec: LimitersRecord = serde_json::from_str(&stdout(&probflux(
        &["limiters"],
        r#"{"limiters": {"v": -1.0}}"#,
    )))
    .unwrap();
    assert_eq!((rec.gamma1, rec.gamma4), (0.0, 3.0));
    assert!(rec.equality_residual.abs() < 1e-12);
}

#[test]
fn convergence_table() {
    let cfg = r#"{"scheme": {"name": "upwind"},
        "problem": {"law": "advection", "a": 1.0, "u0": "sine", "wavenumber": 6.283185307179586},
        "convergence": {"resolutions": [20, 40, 80], "lambda": 0.5, "final_time": 0.5}}"#;
    let (lambda, rows) = csv_rows::<ConvergenceRow>(&stdout(&probflux(&["convergence"], cfg)));
    assert_eq!(lambda, 0.5);
    assert_eq!(rows.len(), 3);
    assert!(rows[0].observed_order.is_none());
    assert_eq!(rows[2].steps, 80);
    let p = rows[2].observed_order.unwrap();
    assert!((0.85..1.15).contains(&p), "{p}");
}

#[test]
fn gds_linear_growth() {
    let cfg = r#"{"scheme": {"name": "upwind"},
        "problem": {"law": "advection", "a": 1.0, "u0": "constant", "value": 2.0},
        "grid": {"mode": "periodic", "m": 8, "h": 0.125, "tau": 0.0625},
        "gds": {"v0": "mean-coupled", "h0": 1.0, "slow_step": 0.1, "substeps": 4, "n_slow": 10}}"#;
    let (lambda, rows) = csv_rows::<GdsRow>(&stdout(&probflux(&["gds"], cfg)));
    assert_eq!(lambda, 0.5);
    assert_eq!(rows.len(), 11);
    let last = rows.last().unwrap();
    assert!((last.tau - 1.0).abs() < 1e-12);
    assert!((last.h_slow - 3.0).abs() < 1e-12);
    assert!((last.mu_min - 2.0).abs() < 1e-12 && (last.mu_max - 2.0).abs() < 1e-12);
}

#[test]
fn fnn_distance_of_exact_constant_is_zero() {
    let cfg = r#"{"fnn": {"alpha0": 0.5, "nodes": [],
        "target": {"profile": {"kind": "constant", "value": 0.5}},
        "domain": [[0.0, 2.0]], "n_samples": 1000, "seed": 1}}"#;
    let rec: FnnRecord = serde_json::from_str(&stdout(&probflux(&["fnn-approx"], cfg))).unwrap();
    assert_eq!(rec.l1_estimate, 0.0);
    assert_eq!(rec.volume, 2.0);
    assert_eq!(rec.lambda, None);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("check.json");
    let out = probflux(
        &["check", "--output", path.to_str().unwrap()],
        &check_config("upwind"),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let summary: StabilitySummary =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(summary.probabilistic);
}

#[test]
fn config_file_argument() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, check_config("upwind")).unwrap();
    let out = probflux(&["check", path.to_str().unwrap()], "");
    let summary: StabilitySummary = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary.scheme, "upwind");
    let missing = probflux(&["check", "/nonexistent/cfg.json"], "");
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bundled_configs_run() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = probflux(&["run", path.to_str().unwrap()], "");
        assert!(
            out.status.success() && !out.stdout.is_empty(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr)
        );
        count += 1;
    }
    assert!(count >= 7);
}

#[test]
fn closed_pipe_is_not_an_error() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut child = Command::new(env!("CARGO_BIN_EXE_probflux"))
        .args([
            "run",
            dir.join("solve-burgers-shock.json").to_str().unwrap(),
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let out = child.wait_with_output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

    #[test]
    fn csv_values_round_trip_bitwise(value in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let cfg = probflux_cli::config::parse(&format!(
            r#"{{"scheme": {{"name": "upwind"}},
                "problem": {{"law": "advection", "a": 0.0, "u0": "constant", "value": {value:e}}},
                "grid": {{"mode": "cone", "n": 1, "h": 1.0, "tau": 0.5}}}}"#
        )).unwrap();
        let text = probflux_cli::run(probflux_cli::Command::Solve, &cfg, Default::default()).unwrap();
        let (_, rows) = csv_rows::<SolveRow>(&text);
        for row in rows {
            proptest::prop_assert_eq!(row.u.to_bits(), value.to_bits());
        }
    }
}
