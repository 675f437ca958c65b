//! End-to-end tests of the `nvsim` binary: exit codes, file outputs, report
//! JSON, and run-to-run reproducibility, all through real process spawns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nv_cli::stack_file::{self, StackHeader};
use sha2::{Digest, Sha256};

fn nvsim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nvsim"));
    // Tests must not inherit a thread-count override from the environment.
    cmd.env_remove("NVSIM_THREADS");
    cmd
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// A cheap but real sweep: 40 RF durations, 2 ns steps, 1 µs laser.
const COARSE_CONFIG: &str = "[sequence]\nlaser_s = 1.0e-6\n\
     [drive]\ns = 0.1\n\
     [tau_grid]\nstart_s = 5.0e-8\nstop_s = 4.0e-6\nstep_s = 1.0e-7\n\
     [integration]\ndt_s = 2.0e-9\n";

fn read_rows(path: &Path, columns: usize) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    lines.next().expect("header row");
    lines
        .map(|line| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.parse().expect("numeric field"))
                .collect();
            assert_eq!(row.len(), columns, "line '{line}'");
            row
        })
        .collect()
}

fn sha256_of(path: &Path) -> [u8; 32] {
    let bytes = std::fs::read(path).unwrap();
    Sha256::digest(&bytes).into()
}

// ---------------------------------------------------------------------------
// Argument plumbing
// ---------------------------------------------------------------------------

#[test]
fn version_help_and_unknown_subcommands_behave() {
    let out = nvsim().arg("--version").output().unwrap();
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_str(&out).contains("nvsim"));

    let out = nvsim().arg("--help").output().unwrap();
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_str(&out).contains("simulate-rabi"));

    let out = nvsim().arg("frobnicate").output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nvsim()
        .args(["simulate-rabi", "--config", "/nonexistent/run.toml", "--output"])
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("cannot read config"));
}

#[test]
fn invalid_thread_counts_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", COARSE_CONFIG);
    for bad in ["0", "abc", "-2"] {
        let out = nvsim()
            .env("NVSIM_THREADS", bad)
            .args(["simulate-rabi", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(dir.path().join("out.csv"))
            .output()
            .unwrap();
        assert_eq!(exit_code(&out), 2, "NVSIM_THREADS={bad}");
        assert!(stderr_str(&out).contains("NVSIM_THREADS"));
    }
}

// ---------------------------------------------------------------------------
// simulate-rabi and fit-rabi
// ---------------------------------------------------------------------------

#[test]
fn simulate_rabi_writes_curve_fit_and_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", COARSE_CONFIG);
    let output = dir.path().join("rabi.csv");

    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&output)
        .arg("--fit")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    let rows = read_rows(&output, 2);
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r[1].is_finite()));

    // The resolved drive appears in the effective config.
    let effective = std::fs::read_to_string(dir.path().join("rabi.effective.toml")).unwrap();
    assert!(effective.contains("w_p = 1.9e6"), "{effective}");
    assert!(effective.contains("laser_s = 1e-6"), "{effective}");

    // The fit report goes both to stdout and to a companion file, and the
    // recovered frequency sits at the driven value.
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let companion: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("rabi.fit.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report, companion);
    let c_r = report["c_r_rad_per_s"].as_f64().unwrap();
    assert!(
        (c_r - 1.5e7).abs() < 0.05 * 1.5e7,
        "fitted frequency {c_r} too far from the drive"
    );
    assert!(report["a_r"].as_f64().unwrap() > 0.0);
    assert!(report["b_r_s"].as_f64().unwrap() > 0.0);
}

#[test]
fn rf_off_sweeps_are_identically_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.toml",
        "[sequence]\nlaser_s = 5.0e-7\n\
         [drive]\ns = 0.1\nomega_r = 0.0\n\
         [tau_grid]\nstart_s = 5.0e-8\nstop_s = 8.0e-7\nstep_s = 1.0e-7\n\
         [integration]\ndt_s = 2.0e-9\n",
    );
    let output = dir.path().join("flat.csv");
    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    // Exactly zero, down to the text: no drive, no contrast, no rounding.
    let text = std::fs::read_to_string(&output).unwrap();
    for line in text.lines().skip(1) {
        let contrast = line.split(',').nth(1).unwrap();
        assert_eq!(contrast, "0e0", "line '{line}'");
    }
}

#[test]
fn fit_rabi_round_trips_a_synthetic_curve() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("tau_s,contrast\n");
    for i in 0..100 {
        let tau = i as f64 * 20.0e-9;
        let value = 0.0206 * (1.0 - (-tau / 1.08e-6).exp() * (1.2e7 * tau).cos());
        csv.push_str(&format!("{tau:e},{value:e}\n"));
    }
    let input = write_file(dir.path(), "curve.csv", &csv);

    let out = nvsim().args(["fit-rabi", "--input"]).arg(&input).output().unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((report["a_r"].as_f64().unwrap() - 0.0206).abs() < 1e-3 * 0.0206);
    assert!((report["b_r_s"].as_f64().unwrap() - 1.08e-6).abs() < 1e-3 * 1.08e-6);
    assert!((report["c_r_rad_per_s"].as_f64().unwrap() - 1.2e7).abs() < 1e-3 * 1.2e7);
    assert!(report["d_r_rad"].as_f64().unwrap().abs() < 1e-3);
}

#[test]
fn fit_rabi_accepts_a_complete_starting_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("tau_s,contrast\n");
    for i in 0..100 {
        let tau = i as f64 * 20.0e-9;
        let value = 0.0206 * (1.0 - (-tau / 1.08e-6).exp() * (1.2e7 * tau).cos());
        csv.push_str(&format!("{tau:e},{value:e}\n"));
    }
    let input = write_file(dir.path(), "curve.csv", &csv);

    let out = nvsim()
        .args(["fit-rabi", "--input"])
        .arg(&input)
        .args([
            "--guess-a", "0.02", "--guess-b-s", "1e-6", "--guess-c", "1.1e7", "--guess-d", "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((report["c_r_rad_per_s"].as_f64().unwrap() - 1.2e7).abs() < 1e-3 * 1.2e7);
}

#[test]
fn fit_rabi_guess_flags_are_all_or_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "curve.csv", "tau_s,contrast\n1e-7,1e-2\n");
    let out = nvsim()
        .args(["fit-rabi", "--input"])
        .arg(&input)
        .args(["--guess-a", "0.02"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("all-or-nothing"));
}

#[test]
fn degenerate_fit_inputs_use_the_documented_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Constant contrast: no spectral peak, a fit failure (4).
    let mut csv = String::from("tau_s,contrast\n");
    for i in 0..20 {
        csv.push_str(&format!("{:e},1e-2\n", i as f64 * 20.0e-9));
    }
    let constant = write_file(dir.path(), "constant.csv", &csv);
    let out = nvsim().args(["fit-rabi", "--input"]).arg(&constant).output().unwrap();
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr_str(&out));

    // Header-only CSV: an input problem (2).
    let empty = write_file(dir.path(), "empty.csv", "tau_s,contrast\n");
    let out = nvsim().args(["fit-rabi", "--input"]).arg(&empty).output().unwrap();
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr_str(&out));

    // Non-numeric field: an input problem (2).
    let words = write_file(dir.path(), "words.csv", "tau_s,contrast\n1e-7,fast\n");
    let out = nvsim().args(["fit-rabi", "--input"]).arg(&words).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("not a number"));
}

#[test]
fn both_drive_keys_are_rejected_at_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", "[drive]\nw_p = 1.9e6\ns = 0.1\n");
    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("mutually exclusive"));
}

#[test]
fn unconverged_cycles_exit_with_the_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    // One cycle can never satisfy the two-cycle convergence check.
    let config = write_file(
        dir.path(),
        "run.toml",
        &format!("{COARSE_CONFIG}max_cycles = 1\n"),
    );
    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr_str(&out));
}

// ---------------------------------------------------------------------------
// simulate-populations
// ---------------------------------------------------------------------------

#[test]
fn zero_length_cycles_produce_a_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.toml",
        "[sequence]\nlaser_s = 0.0\nwait_s = 0.0\nrf_s = 0.0\n[drive]\nomega_r = 0.0\n",
    );
    let output = dir.path().join("pops.csv");
    let out = nvsim()
        .args(["simulate-populations", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));
    assert_eq!(
        std::fs::read_to_string(&output).unwrap(),
        "t_s,n1,n2,n3,n4,n5,n6,n7,n_c,n_E\n"
    );
}

#[test]
fn a_long_laser_pulse_polarizes_the_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.toml",
        "[sequence]\nlaser_s = 1.0e-5\n[drive]\ns = 0.1\n[integration]\ndt_s = 2.0e-9\n",
    );
    let output = dir.path().join("pops.csv");
    let out = nvsim()
        .args(["simulate-populations", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    let rows = read_rows(&output, 10);
    // The trace covers one converged cycle starting at the laser turn-on.
    assert_eq!(rows.first().unwrap()[0], 0.0);
    let end_of_laser = rows
        .iter()
        .min_by(|a, b| {
            (a[0] - 1.0e-5).abs().partial_cmp(&(b[0] - 1.0e-5).abs()).unwrap()
        })
        .unwrap();
    let ground: f64 = end_of_laser[1..4].iter().sum();
    let polarization = end_of_laser[1] / ground;
    assert!(
        polarization > 0.9,
        "end-of-laser ground-state polarization {polarization}"
    );
    // Populations arrive normalized at every sampled time.
    for row in &rows {
        let total: f64 = row[1..8].iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "t = {}: sum {total}", row[0]);
    }
}

// ---------------------------------------------------------------------------
// saturation
// ---------------------------------------------------------------------------

#[test]
fn saturation_reports_the_reference_optical_scales() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", "");
    let output = dir.path().join("sat.csv");
    let out = nvsim()
        .args(["saturation", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    assert_eq!(read_rows(&output, 2).len(), 25);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rel = |value: f64, reference: f64| (value - reference).abs() / reference;
    assert!(rel(report["w_p_sat_per_s"].as_f64().unwrap(), 1.9e7) < 1e-4);
    assert!(rel(report["a_p"].as_f64().unwrap(), 0.34249263984298334) < 1e-4);
    assert!(rel(report["i_sat_w_per_m2"].as_f64().unwrap(), 2364816496.605868) < 1e-4);
    assert!(rel(report["p_sat_w"].as_f64().unwrap(), 1.2035450015176414) < 1e-4);
    assert_eq!(report["w0_um"].as_f64().unwrap(), 18.0);

    let s_values = report["saturation_parameters"].as_array().unwrap();
    assert_eq!(s_values.len(), 3);
    assert_eq!(s_values[0]["power_mw"].as_f64().unwrap(), 75.0);
    assert!(rel(s_values[0]["s"].as_f64().unwrap(), 0.062315908341962115) < 1e-4);
    assert!(rel(s_values[2]["s"].as_f64().unwrap(), 0.20771969447320707) < 1e-4);

    let companion: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sat.saturation.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report, companion);
}

#[test]
fn linear_regime_scans_exit_with_the_fit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", "");
    let out = nvsim()
        .args(["saturation", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(dir.path().join("sat.csv"))
        .args(["--w-min", "1.9e3", "--w-max", "1.9e5", "--points", "12"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr_str(&out));
}

#[test]
fn saturation_rejects_bad_scan_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", "");
    let cases: &[&[&str]] = &[
        &["--w-min", "-1.0"],
        &["--w-min", "2e6", "--w-max", "1e6"],
        &["--points", "2"],
        &["--w0-um", "0"],
    ];
    for extra in cases {
        let out = nvsim()
            .args(["saturation", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(dir.path().join("sat.csv"))
            .args(*extra)
            .output()
            .unwrap();
        assert_eq!(exit_code(&out), 2, "args {extra:?}");
    }
}

// ---------------------------------------------------------------------------
// map-rf
// ---------------------------------------------------------------------------

/// A stack whose every pixel oscillates at exactly `nu` Hz.
fn homogeneous_stack(dir: &Path, nu: f64) -> PathBuf {
    let header = StackHeader {
        nx: 4,
        ny: 4,
        ntau: 64,
        um_per_px: 2.0,
        tau_start_s: 0.0,
        tau_step_s: 25.0e-9,
        big_endian: false,
    };
    let mut payload = Vec::with_capacity(header.payload_values());
    for _ in 0..header.nx * header.ny {
        for k in 0..header.ntau {
            let tau = k as f64 * header.tau_step_s;
            payload.push((0.02 * (1.0 - (2.0 * std::f64::consts::PI * nu * tau).cos())) as f32);
        }
    }
    let path = dir.join("flat.nvs");
    stack_file::write_stack(&path, &header, &payload).unwrap();
    path
}

#[test]
fn map_rf_turns_a_homogeneous_stack_into_a_flat_profile() {
    let dir = tempfile::tempdir().unwrap();
    // 2.5 MHz sits exactly on a spectral bin of the 64 x 25 ns grid.
    let stack = homogeneous_stack(dir.path(), 2.5e6);
    let output = dir.path().join("profile.csv");
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&stack)
        .args(["--y-center", "2", "--window", "2", "--output"])
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    let rows = read_rows(&output, 3);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert!((row[1] - 2.5e6).abs() < 1.0e3, "nu = {}", row[1]);
        assert_eq!(row[2], nv_analysis::b_field_from_rabi(row[1]));
        // Identical pixels give identical answers.
        assert_eq!(row[1].to_bits(), rows[0][1].to_bits());
    }
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[3][0], 6.0);
}

#[test]
fn map_rf_wire_fit_recovers_the_standoff_distance() {
    let dir = tempfile::tempdir().unwrap();
    // Field falling off as 12/(x + 57) mT away from a wire at x = 0.
    let header = StackHeader {
        nx: 40,
        ny: 8,
        ntau: 256,
        um_per_px: 2.0,
        tau_start_s: 0.0,
        tau_step_s: 25.0e-9,
        big_endian: false,
    };
    let gamma = 28.0e6;
    let mut payload = Vec::with_capacity(header.payload_values());
    for ix in 0..header.nx {
        let x = ix as f64 * header.um_per_px;
        let b = 12.0 / (x + 57.0);
        let nu = gamma * b / std::f64::consts::SQRT_2;
        for _ in 0..header.ny {
            for k in 0..header.ntau {
                let tau = k as f64 * header.tau_step_s;
                payload
                    .push((0.02 * (1.0 - (2.0 * std::f64::consts::PI * nu * tau).cos())) as f32);
            }
        }
    }
    let stack = dir.path().join("wire.nvs");
    stack_file::write_stack(&stack, &header, &payload).unwrap();

    let output = dir.path().join("profile.csv");
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&stack)
        .args(["--y-center", "4", "--window", "8", "--output"])
        .arg(&output)
        .args(["--c-w-um", "0"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    assert_eq!(read_rows(&output, 3).len(), 40);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let b_w = report["b_w_um"].as_f64().unwrap();
    assert!((b_w - 57.0).abs() <= 1.0, "standoff {b_w}");
    let a_w = report["a_w_mt_um"].as_f64().unwrap();
    assert!((a_w - 12.0).abs() < 0.02 * 12.0, "strength {a_w}");
}

#[test]
fn map_rf_rejects_broken_stacks_and_bad_windows() {
    let dir = tempfile::tempdir().unwrap();
    let stack = homogeneous_stack(dir.path(), 2.5e6);
    let output = dir.path().join("profile.csv");

    // Corrupted magic.
    let mut bytes = std::fs::read(&stack).unwrap();
    bytes[2] = b'!';
    let bad = write_file(dir.path(), "bad.nvs", "");
    std::fs::write(&bad, &bytes).unwrap();
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&bad)
        .args(["--y-center", "2", "--window", "2", "--output"])
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("offset 2"));

    // Truncated payload.
    let bytes = std::fs::read(&stack).unwrap();
    std::fs::write(&bad, &bytes[..bytes.len() - 4]).unwrap();
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&bad)
        .args(["--y-center", "2", "--window", "2", "--output"])
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("payload length mismatch"));

    // Zero-height averaging window.
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&stack)
        .args(["--y-center", "2", "--window", "0", "--output"])
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);

    // Fit-range flags without the wire fit itself.
    let out = nvsim()
        .args(["map-rf", "--stack"])
        .arg(&stack)
        .args(["--y-center", "2", "--window", "2", "--output"])
        .arg(&output)
        .args(["--x-min-um", "1.0"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("--c-w-um"));
}

// ---------------------------------------------------------------------------
// Reproducibility
// ---------------------------------------------------------------------------

#[test]
fn results_do_not_depend_on_the_worker_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", COARSE_CONFIG);

    let mut hashes = Vec::new();
    for threads in ["1", "4"] {
        let sub = dir.path().join(format!("threads_{threads}"));
        std::fs::create_dir(&sub).unwrap();
        let output = sub.join("rabi.csv");
        let out = nvsim()
            .env("NVSIM_THREADS", threads)
            .args(["simulate-rabi", "--config"])
            .arg(&config)
            .arg("--output")
            .arg(&output)
            .arg("--fit")
            .output()
            .unwrap();
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));
        hashes.push((
            sha256_of(&output),
            sha256_of(&sub.join("rabi.fit.json")),
            sha256_of(&sub.join("rabi.effective.toml")),
        ));
    }
    assert_eq!(hashes[0], hashes[1], "outputs differ with the thread count");
}

#[test]
fn the_effective_config_reproduces_its_run_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.toml", COARSE_CONFIG);

    let first = dir.path().join("first.csv");
    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(&first)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    let second = dir.path().join("second.csv");
    let out = nvsim()
        .args(["simulate-rabi", "--config"])
        .arg(dir.path().join("first.effective.toml"))
        .arg("--output")
        .arg(&second)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_str(&out));

    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    // And the effective config is a fixed point of itself.
    assert_eq!(
        std::fs::read(dir.path().join("first.effective.toml")).unwrap(),
        std::fs::read(dir.path().join("second.effective.toml")).unwrap()
    );
}
