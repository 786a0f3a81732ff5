//! End-to-end checks of the command layer and the installed binary:
//! exact CSV schemas, preset shapes, config round-trips, chart data
//! fidelity, and process exit codes.

use std::process::Command;

use qram_rr::circuit::AddressInput;
use qram_rr::cli::config::RunConfig;
use qram_rr::cli::csv::{RESOURCE_HEADER, YIELD_HEADER};
use qram_rr::cli::{cmd_circuit_demo, cmd_resource, cmd_verify, cmd_yield, CliError};

fn small_cfg() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.chips_per_rep = 100;
    cfg.reps = 2;
    cfg.master_seed = 11;
    cfg
}

#[test]
fn yield_csv_schema_and_trivial_point() {
    let mut cfg = small_cfg();
    cfg.distances = vec![3];
    cfg.logical_counts = vec![16];
    cfg.spare_counts = vec![0];
    cfg.error_rates = vec![0.0];
    let text = cmd_yield(&cfg).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), YIELD_HEADER);
    assert_eq!(
        lines.next().unwrap(),
        "3,16,0,0.000000,100,2,100.00,0.00,100.00,11"
    );
    assert!(lines.next().is_none());
}

#[test]
fn fig7a_preset_shape() {
    let mut cfg = small_cfg();
    cfg.chips_per_rep = 20;
    cfg.preset = Some("fig7a".into());
    let text = cmd_yield(&cfg).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 42);
    // Lexicographic in (N, p); X fixed at 0, d fixed at 3.
    let mut expected = Vec::new();
    for n in [16, 32, 64, 128, 256, 512, 1024] {
        for p in [
            "0.005000", "0.006000", "0.007000", "0.008000", "0.009000", "0.010000",
        ] {
            expected.push((n, p.to_string()));
        }
    }
    let got: Vec<(u32, String)> = rows
        .iter()
        .map(|r| {
            let cells: Vec<&str> = r.split(',').collect();
            assert_eq!(cells[0], "3");
            assert_eq!(cells[2], "0");
            (cells[1].parse().unwrap(), cells[3].to_string())
        })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn fig6_preset_rows_and_analytic_anchor() {
    let mut cfg = small_cfg();
    cfg.chips_per_rep = 20;
    cfg.preset = Some("fig6".into());
    let text = cmd_yield(&cfg).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 35);
    // The closed-form column is sample-size independent; anchor the
    // d=3, N=256, X=0 row at 43.63 and the repaired 1024-cell row at 99.27.
    let analytic = |d: &str, n: &str, x: &str| {
        rows.iter()
            .map(|r| r.split(',').collect::<Vec<_>>())
            .find(|c| c[0] == d && c[1] == n && c[2] == x)
            .map(|c| c[8].to_string())
            .unwrap()
    };
    assert_eq!(analytic("3", "256", "0"), "43.63");
    assert_eq!(analytic("3", "1024", "8"), "99.27");
    assert_eq!(analytic("9", "256", "0"), "70.07");
}

#[test]
fn resource_preset_table_shape_and_values() {
    let mut cfg = RunConfig::default();
    cfg.preset = Some("table1".into());
    let text = cmd_resource(&cfg).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), RESOURCE_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 140);
    assert!(rows.contains(&"3,16,8,408,595,1003,50.00,59.09"));
    assert!(rows.contains(&"5,512,4,25284,26607,51891,0.78,3.82"));
    assert!(rows.contains(&"3,16,0,272,374,646,0.00,0.00"));
}

#[test]
fn csv_bytes_identical_across_reruns() {
    let mut cfg = small_cfg();
    cfg.distances = vec![3, 5];
    cfg.logical_counts = vec![16, 32];
    cfg.spare_counts = vec![0, 1];
    cfg.error_rates = vec![0.005, 0.01];
    let a = cmd_yield(&cfg).unwrap();
    let b = cmd_yield(&cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_round_trip_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let echo_path = dir.path().join("echo.conf");

    let mut cfg = small_cfg();
    cfg.distances = vec![3];
    cfg.logical_counts = vec![16, 64];
    cfg.spare_counts = vec![1];
    cfg.error_rates = vec![0.007];
    cfg.emit_config = Some(echo_path.clone());
    let first = cmd_yield(&cfg).unwrap();

    let reparsed = RunConfig::parse(&std::fs::read_to_string(&echo_path).unwrap()).unwrap();
    assert_eq!(reparsed, cfg);
    let second = cmd_yield(&reparsed).unwrap();
    assert_eq!(first, second);
}

#[test]
fn svg_points_carry_the_csv_values() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("chart.svg");

    let mut cfg = small_cfg();
    cfg.distances = vec![3];
    cfg.logical_counts = vec![16, 64];
    cfg.spare_counts = vec![0];
    cfg.error_rates = vec![0.01];
    cfg.svg = Some(svg_path.clone());
    let csv_text = cmd_yield(&cfg).unwrap();
    let svg_text = std::fs::read_to_string(&svg_path).unwrap();

    for row in csv_text.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        let needle = format!(
            "data-distance=\"{}\" data-logical=\"{}\" data-spares=\"{}\" data-error-rate=\"{}\" data-yield=\"{}\" data-analytic=\"{}\"",
            cells[0], cells[1], cells[2], cells[3], cells[6], cells[8]
        );
        assert!(svg_text.contains(&needle), "missing {needle}");
    }
}

#[test]
fn heatmap_svg_for_multi_rate_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("heat.svg");
    let mut cfg = small_cfg();
    cfg.chips_per_rep = 20;
    cfg.distances = vec![3];
    cfg.logical_counts = vec![16, 32];
    cfg.spare_counts = vec![0];
    cfg.error_rates = vec![0.005, 0.01];
    cfg.svg = Some(svg_path.clone());
    cmd_yield(&cfg).unwrap();
    let svg_text = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg_text.contains("<rect"));
    assert_eq!(svg_text.matches("data-yield=").count(), 4);
}

#[test]
fn demo_uniform_query_report() {
    let mut cfg = RunConfig::default();
    cfg.circuit.address_bits = 2;
    cfg.circuit.spares = 2;
    cfg.circuit.faults = vec![0b10];
    cfg.circuit.data = vec![true, false, true, true];
    cfg.circuit.spare_data = vec![true, false];
    cfg.circuit.address = AddressInput::Uniform;
    let text = cmd_circuit_demo(&cfg).unwrap();
    assert!(text.contains("10 -> S0"));
    // Four branches at 0.25 each.
    assert_eq!(text.matches("p=0.250000").count(), 4);
    assert!(text.contains("MATCH"));
    assert!(text.contains("registers (19 qubits)"));
    assert!(text.contains("MCX"));
}

#[test]
fn verify_command_reports_all_pass() {
    let mut cfg = RunConfig::default();
    cfg.verify_max_address_bits = 1;
    cfg.verify_max_spares = 1;
    let text = cmd_verify(&cfg).unwrap();
    assert!(text.contains("PASS circuit n=1 X=0"));
    assert!(text.contains("PASS circuit n=1 X=1"));
    assert!(text.contains("PASS mc"));
    assert!(text.contains("summary:"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn io_failure_is_exit_3() {
    let mut cfg = small_cfg();
    cfg.distances = vec![3];
    cfg.logical_counts = vec![16];
    cfg.spare_counts = vec![0];
    cfg.error_rates = vec![0.0];
    cfg.output = Some("/nonexistent-dir/deep/out.csv".into());
    match cmd_yield(&cfg) {
        Err(e @ CliError::Io(_)) => assert_eq!(e.exit_code(), 3),
        other => panic!("expected io error, got {other:?}"),
    }
}

// Process-level checks against the built binary.

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qram-rr"))
}

#[test]
fn binary_resource_preset_exit_0() {
    let out = binary()
        .args(["resource", "--preset", "table1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(RESOURCE_HEADER));
    assert_eq!(stdout.lines().count(), 141);
}

#[test]
fn binary_config_error_exit_2() {
    // Even distances are rejected by the defect model.
    let out = binary()
        .args([
            "yield",
            "--distances",
            "4",
            "--logical-counts",
            "16",
            "--chips-per-rep",
            "1",
            "--reps",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Preset and axis flags conflict.
    let out = binary()
        .args(["yield", "--preset", "fig7a", "--distances", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Unknown flags are usage errors.
    let out = binary().args(["yield", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_io_error_exit_3() {
    let out = binary()
        .args([
            "resource",
            "--preset",
            "table1",
            "--out",
            "/nonexistent-dir/deep/r.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn binary_demo_matches_oracle() {
    let out = binary()
        .args([
            "circuit-demo",
            "--address-bits",
            "2",
            "--spares",
            "1",
            "--faults",
            "10",
            "--data",
            "1011",
            "--spare-data",
            "1",
            "--address",
            "10",
            "--mode",
            "read",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Readout=1 p=1.000, MATCH"), "{stdout}");
}

#[test]
fn binary_demo_unrepairable_exit_2() {
    let out = binary()
        .args([
            "circuit-demo",
            "--address-bits",
            "2",
            "--spares",
            "1",
            "--faults",
            "10,11",
            "--data",
            "0000",
            "--spare-data",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("unrepairable"), "{stderr}");
}

#[test]
fn binary_output_stable_across_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name);
        let status = binary()
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "yield",
                "--distances",
                "3",
                "--logical-counts",
                "16,32",
                "--spare-counts",
                "0",
                "--error-rates",
                "0.01",
                "--chips-per-rep",
                "200",
                "--reps",
                "2",
                "--master-seed",
                "9",
                "--out",
            ])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let one = run("1", "a.csv");
    let two = run("2", "b.csv");
    assert_eq!(one, two);
}
