//! End-to-end checks of the `spinphase` binary: file formats, configuration
//! precedence, determinism guarantees, and exit codes.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinphase() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinphase"))
}

fn run(args: &[&str]) -> Output {
    spinphase().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

/// Parses a `t,L,k,re,im` CSV body into `(t-string, L, k) -> (re, im)`.
fn parse_moments_csv(text: &str) -> HashMap<(String, u32, i32), (f64, f64)> {
    let mut rows = HashMap::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 5, "bad row: {line}");
        rows.insert(
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap()),
            (f[3].parse().unwrap(), f[4].parse().unwrap()),
        );
    }
    rows
}

#[test]
fn rates_prints_and_writes_the_expected_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "rates",
        "--J",
        "1",
        "--gamma",
        "1",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.starts_with("L,gamma_lindblad,gamma_povm\n"), "{out}");
    assert!(out.contains("\n0,0,0\n"), "monopole row: {out}");
    assert!(out.contains("\n1,1,0.6931471805599453\n"), "{out}");
    // one ulp from ln 10: the rate is computed as −ln(1/10)
    assert!(out.contains("\n2,3,2.3025850929940455\n"), "{out}");
    let file = fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    assert!(out.starts_with(&file), "stdout echoes the file");
}

#[test]
fn spin_zero_has_a_single_silent_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "rates",
        "--J",
        "0",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["L,gamma_lindblad,gamma_povm", "0,0,0"]);
}

#[test]
fn unravel_is_byte_identical_for_a_fixed_seed() {
    let args = |dir: &Path| {
        vec![
            "unravel".to_string(),
            "--J".into(),
            "1/2".into(),
            "--gamma".into(),
            "1".into(),
            "--dt".into(),
            "0.01".into(),
            "--times".into(),
            "0,0.1,0.2".into(),
            "--n-traj".into(),
            "40".into(),
            "--seed".into(),
            "42".into(),
            "--output-dir".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let d3 = tempfile::tempdir().unwrap();
    run_ok(&args(d1.path()).iter().map(String::as_str).collect::<Vec<_>>());
    run_ok(&args(d2.path()).iter().map(String::as_str).collect::<Vec<_>>());
    let b1 = fs::read(d1.path().join("unravel.csv")).unwrap();
    let b2 = fs::read(d2.path().join("unravel.csv")).unwrap();
    assert_eq!(b1, b2, "same seed, same bytes");

    let mut other: Vec<String> = args(d3.path());
    let seed_pos = other.iter().position(|a| a == "42").unwrap();
    other[seed_pos] = "43".into();
    run_ok(&other.iter().map(String::as_str).collect::<Vec<_>>());
    let b3 = fs::read(d3.path().join("unravel.csv")).unwrap();
    assert_ne!(b1, b3, "a different seed changes the data");
}

#[test]
fn thread_count_does_not_change_the_output() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&dir1, "1"), (&dir2, "3")] {
        let out = spinphase()
            .args([
                "unravel",
                "--J",
                "1",
                "--gamma",
                "0.5",
                "--dt",
                "0.01",
                "--times",
                "0,0.2",
                "--n-traj",
                "30",
                "--seed",
                "7",
                "--output-dir",
                dir.path().to_str().unwrap(),
            ])
            .env("SPINPHASE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(dir1.path().join("unravel.csv")).unwrap(),
        fs::read(dir2.path().join("unravel.csv")).unwrap(),
        "pool size must not leak into the results"
    );
}

#[test]
fn snapshots_round_trip_through_evolve() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run_ok(&[
        "evolve",
        "--J",
        "1",
        "--gamma",
        "1",
        "--state",
        "coherent:1.0,0.3",
        "--times",
        "0,0.5",
        "--snapshots",
        "--output-dir",
        d1.path().to_str().unwrap(),
    ]);
    let snap = d1.path().join("snapshot_1.json");
    assert!(snap.exists());

    // feed the t = 0.5 snapshot back in; its t = 0 moments must match
    // (spin is read from the file, not the command line)
    run_ok(&[
        "evolve",
        "--gamma",
        "1",
        "--state",
        &format!("file:{}", snap.display()),
        "--times",
        "0",
        "--output-dir",
        d2.path().to_str().unwrap(),
    ]);
    let first = parse_moments_csv(&fs::read_to_string(d1.path().join("moments.csv")).unwrap());
    let second = parse_moments_csv(&fs::read_to_string(d2.path().join("moments.csv")).unwrap());
    assert_eq!(second.len(), 9, "spin 1 has nine moments");
    for ((t, l, k), (re, im)) in &second {
        assert_eq!(t, "0");
        let (re1, im1) = first[&("0.5".to_string(), *l, *k)];
        assert!(
            (re - re1).abs() < 1e-12 && (im - im1).abs() < 1e-12,
            "moment ({l},{k}) drifted across the round trip"
        );
    }

    // and writing the snapshot again reproduces the matrix bit for bit
    run_ok(&[
        "evolve",
        "--gamma",
        "1",
        "--state",
        &format!("file:{}", snap.display()),
        "--times",
        "0",
        "--snapshots",
        "--output-dir",
        d2.path().to_str().unwrap(),
    ]);
    let a: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&snap).unwrap()).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d2.path().join("snapshot_0.json")).unwrap())
            .unwrap();
    assert_eq!(a["J"], "1");
    for (x, y) in a["matrix"].as_array().unwrap().iter().zip(b["matrix"].as_array().unwrap()) {
        for (ex, ey) in x.as_array().unwrap().iter().zip(y.as_array().unwrap()) {
            for idx in 0..2 {
                let (fx, fy) = (ex[idx].as_f64().unwrap(), ey[idx].as_f64().unwrap());
                assert!((fx - fy).abs() < 1e-13, "matrix entry moved: {fx} vs {fy}");
            }
        }
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"J": "1", "gamma": 2.0}"#).unwrap();
    let out = run_ok(&[
        "rates",
        "--config",
        cfg.to_str().unwrap(),
        "--gamma",
        "0.5",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.contains("gamma = 0.5"), "flag wins over file: {out}");
    assert!(out.contains("J = 1,"), "spin still comes from the file: {out}");
}

#[test]
fn tensor_table_lists_every_component() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "tensor-table",
        "--J",
        "1",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    let json: String = out.lines().filter(|l| !l.starts_with('#')).collect();
    let table: serde_json::Value = serde_json::from_str(&json).unwrap();
    let entries = table.as_array().unwrap();
    assert_eq!(entries.len(), 9, "1 + 3 + 5 components for spin 1");
    let last = &entries[8];
    assert_eq!(last["J"], "1");
    assert_eq!(last["L"], 2);
    assert_eq!(last["k"], 2);
    assert_eq!(last["matrix"].as_array().unwrap().len(), 9, "3x3, row-major");
    let file: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tensor_table.json")).unwrap())
            .unwrap();
    assert_eq!(table, file);
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let dirs = ["--output-dir", dir.path().to_str().unwrap()];

    // spin strings must be exact: decimals are rejected
    let out = run(&[&["rates", "--J", "0.5"], &dirs[..]].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // unknown configuration keys are rejected
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"J": "1", "bogus": 1}"#).unwrap();
    let out = run(&[&["rates", "--config", cfg.to_str().unwrap()], &dirs[..]].concat());
    assert_eq!(out.status.code(), Some(2));

    // fixed-gamma rule with no gamma given
    let out = run(&[&["rates", "--J", "1", "--gamma-rule", "fixed"], &dirs[..]].concat());
    assert_eq!(out.status.code(), Some(2));

    // `evolve` has no trajectory model
    let out = run(&[&["evolve", "--J", "1", "--model", "unravel"], &dirs[..]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_code_3() {
    let out = run(&["rates", "--J", "1", "--config", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // an output "directory" that is actually a file
    let dir = tempfile::tempdir().unwrap();
    let blocked = dir.path().join("blocked");
    fs::write(&blocked, "x").unwrap();
    let out = run(&["rates", "--J", "1", "--output-dir", blocked.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn wigner_writes_all_three_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "wigner",
        "--J",
        "1",
        "--gamma",
        "1",
        "--state",
        "cat",
        "--times",
        "0",
        "--iterations",
        "1",
        "--grid",
        "9x16",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    for name in ["wigner_lindblad_0", "wigner_povm_1"] {
        for ext in ["csv", "json", "ppm"] {
            let path = dir.path().join(format!("{name}.{ext}"));
            assert!(path.exists(), "missing {}: stdout was\n{out}", path.display());
        }
    }
    let csv = fs::read_to_string(dir.path().join("wigner_lindblad_0.csv")).unwrap();
    assert!(csv.starts_with("theta,phi,value\n"));
    assert_eq!(csv.lines().count(), 1 + 9 * 16);
    let ppm = fs::read_to_string(dir.path().join("wigner_lindblad_0.ppm")).unwrap();
    assert!(ppm.starts_with("P3\n16 9\n255\n"));
    let spectral: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("wigner_lindblad_0.json")).unwrap())
            .unwrap();
    assert_eq!(spectral["sigma"], 0.0);
    assert_eq!(spectral["coeffs"].as_array().unwrap().len(), 9);
    assert!(out.contains("sigma-shift cross-check"), "{out}");
}
