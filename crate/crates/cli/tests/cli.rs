use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn iwaves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwaves")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = iwaves(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(args: &[&str]) -> i32 {
    iwaves(args).status.code().expect("exit code")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

/// Data rows of a CSV file as fields.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header_line(path: &Path, key: &str) -> String {
    let text = fs::read_to_string(path).unwrap();
    let prefix = format!("# {key}");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key} in {path:?}")).to_string()
}

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn rotnum_disk_follows_arcsine_law() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "disk.csv");
    ok(&["rotnum", "--domain", "disk", "--lambda-grid", "0.01:0.99:101", "--orbit", "100000", "--out", &out]);
    let rows = rows(Path::new(&out));
    assert_eq!(rows.len(), 101);
    for r in rows {
        let lambda: f64 = r[0].parse().unwrap();
        let rot: f64 = r[1].parse().unwrap();
        let err: f64 = r[2].parse().unwrap();
        let exact = 2.0 * lambda.asin() / std::f64::consts::PI;
        assert!((rot - exact).abs() <= err.max(1e-12) + 1e-12, "lambda {lambda}: {rot} vs {exact} (bound {err})");
    }
}

#[test]
fn rotnum_square_uses_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "square.csv");
    ok(&["rotnum", "--domain", "square", "--lambda", "0.2,0.6,0.9", "--out", &out]);
    for r in rows(Path::new(&out)) {
        let l: f64 = r[0].parse().unwrap();
        let rot: f64 = r[1].parse().unwrap();
        assert!((rot - l / ((1.0 - l * l).sqrt() + l)).abs() < 1e-15);
    }
}

#[test]
fn rotnum_marks_non_simple_rows() {
    let dir = TempDir::new().unwrap();
    let curve = p(&dir, "curve.json");
    let bent = internal_waves::BoundaryCurve::new(
        vec![0.1, 0.85, 0.1, -0.15],
        vec![0.0; 4],
        vec![0.0; 4],
        vec![0.0, 1.15, 0.1, -0.15],
        1024,
    )
    .unwrap();
    fs::write(&curve, bent.to_json()).unwrap();
    let out = p(&dir, "rows.csv");
    ok(&["rotnum", "--domain", &curve, "--lambda", "0.3", "--orbit", "1000", "--out", &out]);
    let rows = rows(Path::new(&out));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][1].is_empty());
    assert!(header_line(Path::new(&out), "skipped").contains("simple"));
}

#[test]
fn eigs_writes_one_file_per_mode() {
    let dir = TempDir::new().unwrap();
    let disk = p(&dir, "disk");
    ok(&["eigs", "--domain", "disk", "--nmax", "5", "--grid", "21", "--out", &disk]);
    let count = |d: &str| fs::read_dir(d).unwrap().filter(|e| e.as_ref().unwrap().file_name() != "index.csv").count();
    assert_eq!(count(&disk), 10);
    assert_eq!(rows(&Path::new(&disk).join("index.csv")).len(), 10);
    let grid = rows(&Path::new(&disk).join("mode_disk_1_2.csv"));
    assert_eq!(grid.len(), 21 * 21);

    let square = p(&dir, "square");
    ok(&["eigs", "--domain", "square", "--kmax", "2", "--grid", "11", "--out", &square]);
    assert_eq!(count(&square), 4);
    let index = rows(&Path::new(&square).join("index.csv"));
    let half = index.iter().find(|r| r[0] == "mode_square_1_1.csv").unwrap();
    assert_eq!((half[5].as_str(), half[6].as_str()), ("1", "2"));
}

#[test]
fn eigs_rejects_general_curves() {
    let dir = TempDir::new().unwrap();
    let curve = p(&dir, "curve.json");
    fs::write(&curve, internal_waves::BoundaryCurve::circle().to_json()).unwrap();
    assert_eq!(code(&["eigs", "--domain", &curve, "--out", &p(&dir, "x")]), 2);
}

#[test]
fn specmeasure_diophantine_sweep_is_steeper() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "sm");
    let lambdas = format!("{GOLDEN},{SQRT_HALF}");
    ok(&["specmeasure", "--domain", "square", "--kmax", "100", "--lambda", &lambdas, "--out", &out]);
    let slope = |f: &str| -> f64 {
        let line = header_line(&Path::new(&out).join(f), "lambda=");
        line.rsplit("slope=").next().unwrap().parse().unwrap()
    };
    let (dioph, resonant) = (slope("sweep_000.csv"), slope("sweep_001.csv"));
    assert!(dioph > resonant + 2.0, "slopes {dioph} vs {resonant}");
    assert_eq!(rows(&Path::new(&out).join("sweep_000.csv")).len(), 31);
}

#[test]
fn rightinv_disk_constant_forcing_verifies() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "ri.json");
    ok(&["rightinv", "--domain", "disk", "--lambda", "0.3", "--out", &out]);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["report"]["verified"], true);
    assert!(doc["report"]["residual"].as_f64().unwrap() <= 1e-4);
    assert_eq!(doc["header"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn evolve_resonant_square_is_flagged() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "ev.csv");
    let l = SQRT_HALF.to_string();
    ok(&["evolve", "--domain", "square", "--kmax", "32", "--lambda", &l, "--tmax", "2000", "--samples", "20001", "--out", &out]);
    assert!(header_line(Path::new(&out), "growing=").starts_with("true"));
    assert_eq!(rows(Path::new(&out)).len(), 20001);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let runs: [&[&str]; 3] = [
        &["rotnum", "--domain", "ellipse:2,0.3,0,1", "--lambda-grid", "0.2:0.8:7", "--orbit", "20000"],
        &["specmeasure", "--domain", "disk", "--nmax", "30", "--forcing", "random", "--seed", "11", "--lambda", "0.4,0.55"],
        &["rightinv", "--domain", "disk", "--lambda", "0.35", "--forcing", "random", "--seed", "3", "--grid", "41"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = p(&dir, &format!("a{i}"));
        let b = p(&dir, &format!("b{i}"));
        ok(&[*args, &["--out", &a]].concat());
        ok(&[*args, &["--out", &b]].concat());
        let read = |x: &str| -> Vec<(String, Vec<u8>)> {
            let path = Path::new(x);
            if path.is_dir() {
                let mut v: Vec<_> = fs::read_dir(path)
                    .unwrap()
                    .map(|e| {
                        let e = e.unwrap();
                        (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
                    })
                    .collect();
                v.sort();
                v
            } else {
                vec![(String::new(), fs::read(path).unwrap())]
            }
        };
        assert_eq!(read(&a), read(&b), "{args:?}");
    }
}

#[test]
fn header_hash_matches_reparsed_config() {
    let dir = TempDir::new().unwrap();
    let first = p(&dir, "first.csv");
    ok(&["rotnum", "--domain", "square", "--lambda-grid", "0.1:0.9:5", "--out", &first]);
    let hash = header_line(Path::new(&first), "config-hash: ");
    let config = header_line(Path::new(&first), "config: ");
    assert_eq!(hash, sha256_hex(&config));

    let cfg = p(&dir, "config.json");
    fs::write(&cfg, &config).unwrap();
    let second = p(&dir, "second.csv");
    ok(&["rotnum", "--config", &cfg, "--out", &second]);
    assert_eq!(header_line(Path::new(&second), "config-hash: "), hash);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "x.csv");
    assert_eq!(code(&["rotnum", "--lambda-grid", "0.1:0.9:0", "--out", &out]), 2);
    assert_eq!(code(&["rotnum", "--lambda", "1.2", "--out", &out]), 2);
    assert_eq!(code(&["rotnum", "--lambda", "0.3"]), 2);
    assert_eq!(code(&["rotnum", "--lambda", "0.3", "--orbit", "0", "--out", &out]), 2);
    assert_eq!(code(&["rotnum", "--domain", "rectangle:1", "--lambda", "0.3", "--out", &out]), 2);
    assert_eq!(code(&["rotnum", "--domain", &p(&dir, "missing.json"), "--lambda", "0.3", "--out", &out]), 2);
    assert_eq!(code(&["rotnum", "--bogus"]), 2);
    assert_eq!(code(&["evolve", "--domain", "square", "--lambda", "0.3,0.4", "--out", &out]), 2);
    assert_eq!(code(&["evolve", "--domain", "square", "--lambda", "0.3", "--forcing", "nope", "--out", &out]), 2);
    let l = SQRT_HALF.to_string();
    assert_eq!(code(&["rightinv", "--domain", "disk", "--lambda", &l, "--out", &p(&dir, "r.json")]), 3);
}
