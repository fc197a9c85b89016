//! CLI acceptance: determinism of every scenario (criterion 10), the
//! config/exit-code contract, and the paired-column output format.

use std::fs;
use std::path::Path;
use std::process::Command;

use oqs_cli::{resolve_config, run, CliError, Overrides, Scenario};

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

fn run_scenario_into(dir: &Path, scenario: &str, extra: &str) -> Vec<(String, String)> {
    let body = format!(
        r#"
scenario = "{scenario}"
seed = 7171
output_dir = "{}"
{extra}
"#,
        dir.display()
    );
    let cfg = resolve_config(Some(&body), &Overrides::default()).unwrap();
    let summary = run(&cfg).unwrap();
    let mut out = vec![];
    for f in summary.files {
        if f.ends_with(".csv") {
            out.push((f.clone(), read(dir, &f)));
        }
    }
    assert!(!out.is_empty(), "scenario {scenario} wrote no CSV files");
    out
}

/// Criterion 10: identical config + seed produce byte-identical CSV bodies
/// for every scenario.
#[test]
fn criterion_10_deterministic_outputs() {
    let scenarios: [(&str, String); 5] = [
        ("fig1_scan", "[grid]\nn_points = 21\n".into()),
        (
            "timeseries",
            "[grid]\nt_max = 3.0\n\n[timeseries]\ninitial_state = [1.0, 0.0, -0.894, -0.447]\n".into(),
        ),
        (
            "sweep",
            "[sweep]\ntemperatures = [0.006]\nratios = [2.0]\nn_states = 60\n".into(),
        ),
        ("tabulate_bath", "[bath]\nu_max = 0.4\nn_samples = 40\n".into()),
        ("snapshot_generators", String::new()),
    ];
    for (scenario, extra) in &scenarios {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = run_scenario_into(dir_a.path(), scenario, extra);
        let b = run_scenario_into(dir_b.path(), scenario, extra);
        assert_eq!(a.len(), b.len());
        for ((name_a, body_a), (name_b, body_b)) in a.iter().zip(b.iter()) {
            assert_eq!(name_a, name_b);
            assert_eq!(body_a.as_bytes(), body_b.as_bytes(), "{scenario}/{name_a} differs between runs");
        }
        println!("ACCEPTANCE 10 ({scenario}): PASS — {} CSV bodies byte-identical", a.len());
    }
}

/// Every scenario output carries paired Redfield/CP columns so the
/// comparison is reconstructible from a single file.
#[test]
fn paired_generator_columns_present() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_scenario_into(dir.path(), "fig1_scan", "[grid]\nn_points = 11\n");
    let header = files[0].1.lines().next().unwrap();
    assert_eq!(header, "r1,r2,sigma_redfield,sigma_cp");
    // n² rows cover the enclosing square; points outside the disk are nan
    let rows: Vec<&str> = files[0].1.lines().skip(1).collect();
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().any(|r| r.contains("nan")));
    assert!(rows.iter().any(|r| !r.contains("nan")));

    let dir = tempfile::tempdir().unwrap();
    let files = run_scenario_into(
        dir.path(),
        "timeseries",
        "[grid]\nt_max = 1.0\n\n[timeseries]\ninitial_state = [1.0, 0.0, 0.5, -0.4]\n",
    );
    let sigma = files.iter().find(|(n, _)| n == "sigma_timeseries.csv").unwrap();
    assert_eq!(
        sigma.1.lines().next().unwrap(),
        "t,sigma_redfield,sigma_cp,heat_flux_redfield,heat_flux_cp"
    );
    let traj = files.iter().find(|(n, _)| n == "trajectory_redfield.csv").unwrap();
    assert_eq!(traj.1.lines().next().unwrap(), "t,r1,r2,r3,norm");
}

#[test]
fn sweep_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_scenario_into(
        dir.path(),
        "sweep",
        "[sweep]\ntemperatures = [0.0006]\nratios = [2.0]\nn_states = 60\n",
    );
    let (_, body) = &files[0];
    assert_eq!(
        body.lines().next().unwrap(),
        "T_kelvin,ratio,frac_t0_redfield,frac_t0_cp,has_time_violation,min_sigma"
    );
    let row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    let frac_cp: f64 = row[3].parse().unwrap();
    assert_eq!(frac_cp, 0.0, "CP generator must show no t = 0 violations");
    let has_violation: u8 = row[4].parse().unwrap();
    assert_eq!(has_violation, 1, "cold cell must exhibit repeated time violations");
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_scenario_into(
        dir.path(),
        "sweep",
        "[sweep]\ntemperatures = [0.006, 0.06]\nratios = [1.0, 2.0]\nn_states = 40\n",
    );
    let (_, body) = &files[0];
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows.len(), 4, "expected 2×2 grid rows, got {}", rows.len());
    // row-major order over (temperature, ratio)
    let first: Vec<&str> = rows[0].split(',').collect();
    let last: Vec<&str> = rows[3].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.006);
    assert_eq!(first[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(last[0].parse::<f64>().unwrap(), 0.06);
    assert_eq!(last[1].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn defaults_round_trip_through_the_parser() {
    let text = oqs_cli::default_config_text();
    let cfg = resolve_config(Some(&text), &Overrides::default()).unwrap();
    assert_eq!(cfg.scenario, Scenario::Timeseries);
    let reduced = cfg.params.reduced().unwrap();
    assert!((reduced.omega - 2.0).abs() < 1e-14, "default Ω/Δ = 2");
    assert!((reduced.omega_c - 1000.0).abs() < 1e-12, "default ω_c/Δ = 1000");
    assert!((reduced.beta - 10.184).abs() < 5e-3, "default βħΔ ≈ 10.2");
}

#[test]
fn config_errors_carry_field_diagnostics() {
    // unknown scenario
    let err = resolve_config(Some("scenario = \"warp\""), &Overrides::default()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert!(err.to_string().contains("warp"));
    assert_eq!(err.exit_code(), 2);

    // unknown field, named in the diagnostic
    let err = resolve_config(Some("[params]\ndelta_ghz = 8.0"), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("delta_ghz"));

    // invalid physical parameter
    let err =
        resolve_config(Some("[params]\ntemperature = -1.0"), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("temperature"));

    // broken TOML syntax carries a line/column
    let err = resolve_config(Some("scenario = [unclosed"), &Overrides::default()).unwrap_err();
    assert!(err.to_string().contains("line 1"));

    // numerical failures map to exit 3
    assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
}

#[test]
fn binary_end_to_end_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_oqs");
    // defaults prints a parsable config and exits 0
    let out = Command::new(exe).arg("defaults").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("scenario = \"timeseries\""));

    // bad config file -> exit 2
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "scenario = \"nope\"").unwrap();
    let out = Command::new(exe).args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing config file -> exit 2
    let out = Command::new(exe)
        .args(["run", "--config", "/nonexistent/path.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // snapshot-generators writes the 16-entry rows and exits 0
    let out_dir = dir.path().join("snap");
    let out = Command::new(exe)
        .args(["snapshot-generators", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = read(&out_dir, "generators.csv");
    let header = body.lines().next().unwrap();
    assert!(header.starts_with("kind,part,m00,m01,m02,m03,m10"));
    assert!(header.ends_with("m33"));
    assert_eq!(body.lines().count(), 1 + 8); // 2 kinds × 4 parts
    assert!(read(&out_dir, "run_manifest.txt").contains("tool_version"));
}
