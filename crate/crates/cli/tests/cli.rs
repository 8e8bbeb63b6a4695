use std::path::Path;
use std::process::{Command, Output};

fn sics(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sics")).args(args).current_dir(dir).output().unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn verify_two_elements_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = sics(&["verify", "--n", "2", "--cases", "100"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_rejects_large_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sics(&["verify", "--n", "4"], dir.path()).status.code(), Some(2));
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sics(&["sweep", "--config", "missing.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn unknown_key_and_unknown_flag_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "ps_grid = [20.0]\n").unwrap();
    assert_eq!(sics(&["sweep", "--config", "bad.toml"], dir.path()).status.code(), Some(2));
    let out = sics(&["solve", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sics(&["figure3", "--realizations", "1", "--out", "no/such/dir/f.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("no").exists());
}

#[test]
fn figure2_covers_every_surface_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = sics(&["figure2", "--realizations", "4", "--out", "f2.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("f2.csv")).unwrap();
    assert!(text.starts_with("# "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 15);
    for (i, n) in ["16", "36", "64"].iter().enumerate() {
        let ps: Vec<f64> = rows[5 * i..5 * i + 5].iter().map(|r| r[0].parse().unwrap()).collect();
        assert!(rows[5 * i..5 * i + 5].iter().all(|r| r[1] == *n));
        assert_eq!(ps, [20.0, 25.0, 30.0, 35.0, 40.0]);
    }
}

#[test]
fn sweep_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "n_list = [4, 16]\nps_grid_watts = [20.0, 40.0]\nrealizations = 6\nn0_watts = 1e-12\n";
    std::fs::write(dir.path().join("s.toml"), cfg).unwrap();
    for (w, name) in [("1", "a.csv"), ("4", "b.csv"), ("4", "c.csv")] {
        let out = sics(&["sweep", "--config", "s.toml", "--workers", w, "--out", name], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("b.csv"), read("c.csv"));
}

#[test]
fn solve_prints_certified_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = sics(&["solve", "--n", "16", "--n0-watts", "1e-12", "--seed", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"]["status"], "Optimal");
    assert!(v["residuals"].as_array().unwrap().iter().all(|r| r["value"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap()));
}
