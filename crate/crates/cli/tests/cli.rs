use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use periodic_bergman::confmap::MapArchive;
use periodic_bergman::{PeriodicCellSpec, C64};
use serde_json::Value;
use tempfile::TempDir;

fn pbergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbergman")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn out_dir(t: &TempDir, name: &str) -> PathBuf {
    t.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_spec(t: &TempDir, name: &str, spec: &PeriodicCellSpec) -> PathBuf {
    let p = t.path().join(name);
    spec.save(&p).unwrap();
    p
}

fn zigzag() -> PeriodicCellSpec {
    PeriodicCellSpec {
        lower: vec![C64::new(1.0, -0.5), C64::new(0.5, -1.0), C64::new(0.0, -0.5)],
        upper: vec![C64::new(1.0, 0.5), C64::new(0.5, 1.0), C64::new(0.0, 0.5)],
        beta_lower: vec![0.5, -0.5],
        beta_upper: vec![0.5, -0.5],
        junction: (-0.5, 0.5),
        height_bound: 1.0,
    }
}

/// Data rows of a CSV artifact: header comment and column line skipped.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn report(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn map_solve_straight_channel_archives_modulus() {
    let t = TempDir::new().unwrap();
    let cell = write_spec(&t, "strip.toml", &PeriodicCellSpec::rectangle(-0.5, 0.5));
    let out = out_dir(&t, "map");
    let o = pbergman(&["map-solve", "--cell", s(&cell), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("map.toml")).unwrap();
    assert!(text.starts_with("# pbergman "));
    let arch = MapArchive::load(&out.join("map.toml")).unwrap();
    assert!((arch.rho - PI.exp()).abs() < 1e-6);
}

#[test]
fn malformed_and_invalid_cells_are_input_errors() {
    let t = TempDir::new().unwrap();
    let garbage = t.path().join("garbage.toml");
    fs::write(&garbage, "lower = [").unwrap();
    let o = pbergman(&["map-solve", "--cell", s(&garbage), "--out", s(&out_dir(&t, "a"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidCell"));

    let mut bad = zigzag();
    bad.beta_lower = vec![0.5, -0.4];
    let cell = write_spec(&t, "bad.toml", &bad);
    let o = pbergman(&["map-solve", "--cell", s(&cell), "--out", s(&out_dir(&t, "b"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("InvalidCell"));

    let o = pbergman(&["kernel", "--cell", s(&t.path().join("missing.toml")), "--out", s(&out_dir(&t, "c"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unreachable_output_directory_is_an_io_error() {
    let t = TempDir::new().unwrap();
    let file = t.path().join("file");
    fs::write(&file, "x").unwrap();
    let o = pbergman(&["kernel", "--point", "0,0", "--out", s(&file.join("sub"))]);
    assert_eq!(code(&o), 3);
}

#[test]
fn kernel_single_point_matches_closed_form() {
    let t = TempDir::new().unwrap();
    let out = out_dir(&t, "k");
    let o = pbergman(&["kernel", "--point", "0,0", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&out.join("kernel.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows[..3] {
        let re: f64 = r[4].parse().unwrap();
        assert!((re - PI / 4.0).abs() < 1e-9, "{r:?}");
    }
    assert_eq!(rows[3][6], "summary");
}

#[test]
fn kernel_grid_reports_cross_method_deviation() {
    let t = TempDir::new().unwrap();
    let out = out_dir(&t, "k");
    let o = pbergman(&["kernel", "--grid", "3x2", "--periods", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("kernel.csv"));
    assert_eq!(rows.len(), 6 * 6 * 2 * 3 + 1);
    let summary = rows.last().unwrap();
    assert_eq!(summary[6], "summary");
    let dev: f64 = summary[7].parse().unwrap();
    assert!(dev < 1e-5);
    let max_row = rows[..rows.len() - 1].iter().map(|r| r[7].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert_eq!(max_row, dev);

    let o = pbergman(&["kernel", "--grid", "0x0", "--out", s(&out_dir(&t, "e"))]);
    assert_eq!(code(&o), 2);
    let o = pbergman(&["kernel", "--method", "fastest", "--out", s(&out_dir(&t, "m"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn identical_configs_give_identical_files() {
    let t = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let out = out_dir(&t, name);
        let o = pbergman(&["kernel", "--grid", "2x2", "--seed", seed, "--out", s(&out)]);
        assert_eq!(code(&o), 0);
        fs::read(out.join("kernel.csv")).unwrap()
    };
    let (a, b, c) = (run("a", "5"), run("b", "5"), run("c", "6"));
    assert_eq!(a, b);
    let header = |bytes: &[u8]| String::from_utf8_lossy(bytes).lines().next().unwrap().to_string();
    let h = header(&a);
    let parts: Vec<&str> = h.split(' ').collect();
    assert_eq!(parts[0], "#");
    assert_eq!(parts[1], "pbergman");
    let hash = parts[3].strip_prefix("config_hash=").unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|ch| ch.is_ascii_hexdigit()));
    assert_eq!(parts[4], "seed=5");
    assert_ne!(header(&c), h);
}

#[test]
fn verify_strip_passes_every_check() {
    let t = TempDir::new().unwrap();
    let out = out_dir(&t, "v");
    let o = pbergman(&["verify", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let lines = report(&o);
    assert_eq!(lines.len(), 10);
    for l in &lines {
        assert!(l["check"].is_string() && l["value"].is_number() && l["bound"].is_number());
        assert_eq!(l["pass"], Value::Bool(true), "{l}");
    }
    let file = fs::read_to_string(out.join("verify.jsonl")).unwrap();
    assert!(file.starts_with("# pbergman "));
    assert_eq!(file.lines().count(), 11);
}

#[test]
fn verify_detects_mis_set_modulus() {
    let t = TempDir::new().unwrap();
    let o = pbergman(&["verify", "--rho-scale", "1.01", "--out", s(&out_dir(&t, "v"))]);
    assert_eq!(code(&o), 1);
    let lines = report(&o);
    let consistency = lines.iter().find(|l| l["check"] == "kernel_consistency").unwrap();
    assert_eq!(consistency["pass"], Value::Bool(false));
    // checks that do not involve the cell-kernel series are unaffected
    let fourier = lines.iter().find(|l| l["check"] == "fourier_identity").unwrap();
    assert_eq!(fourier["pass"], Value::Bool(true));
}

#[test]
fn verify_with_zero_tolerance_fails_everything() {
    let t = TempDir::new().unwrap();
    let o = pbergman(&["verify", "--tol", "0", "--out", s(&out_dir(&t, "v"))]);
    assert_eq!(code(&o), 1);
    let lines = report(&o);
    assert_eq!(lines.len(), 10);
    assert!(lines.iter().all(|l| l["pass"] == Value::Bool(false)));
    let o = pbergman(&["verify", "--tol", "-1", "--out", s(&out_dir(&t, "w"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn decay_schur_and_floquet_tables() {
    let t = TempDir::new().unwrap();
    let out = out_dir(&t, "d");
    let o = pbergman(&["decay", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("factor_two_gap = true"));
    assert_eq!(csv_rows(&out.join("decay.csv")).len(), 7);

    for weight in ["const", "stretched:1,0.5"] {
        let o = pbergman(&["schur", "--weight", weight, "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{weight}");
    }
    assert_eq!(csv_rows(&out.join("schur.csv")).len(), 33);
    let o = pbergman(&["schur", "--weight", "stretched:1,2", "--out", s(&out)]);
    assert_eq!(code(&o), 2);

    let o = pbergman(&["floquet", "--grid", "2x2", "--eta-nodes", "8", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&out.join("floquet.csv")).len(), 4 * 8);
    let o = pbergman(&["floquet", "--function", "sine", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solved_zigzag_archive_feeds_the_kernel() {
    let t = TempDir::new().unwrap();
    let cell = write_spec(&t, "zigzag.toml", &zigzag());
    let out = out_dir(&t, "z");
    let o = pbergman(&["map-solve", "--cell", s(&cell), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(csv_rows(&out.join("map_residual.csv")).len() > 1);
    let map = out.join("map.toml");
    let o = pbergman(&["kernel", "--cell", s(&cell), "--map", s(&map), "--grid", "2x2", "--periods", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // an SC archive without its cell is rejected
    let o = pbergman(&["kernel", "--map", s(&map), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
}
