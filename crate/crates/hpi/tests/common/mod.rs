#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const QUARTERS: usize = 80;

fn quarter_end(t: usize) -> String {
    let year = 2000 + t / 4;
    let (m, d) = [(3, 31), (6, 30), (9, 30), (12, 31)][t % 4];
    format!("{year}-{m:02}-{d:02}")
}

fn quarter_label(t: usize) -> String {
    format!("{}-Q{}", 2000 + t / 4, t % 4 + 1)
}

fn tr10y(t: usize) -> f64 {
    1.0 + 3.0 * ((t as f64) / 9.0).sin().abs()
}

fn dated(path: &Path, f: impl Fn(usize) -> f64) {
    let mut s = String::from("DATE,VALUE\n");
    for t in 0..QUARTERS {
        writeln!(s, "{},{}", quarter_end(t), f(t)).unwrap();
    }
    fs::write(path, s).unwrap();
}

/// Writes quarterly CH and FR data and returns the manifest path. `extra` is
/// appended to the manifest.
pub fn fixture(dir: &Path, extra: &str) -> PathBuf {
    let data = dir.join("data");
    fs::create_dir_all(&data).unwrap();
    let mut wide = String::from("QUARTER,CH,FR\n");
    for t in 0..QUARTERS {
        let x = t as f64;
        let ch = 120.0 - 8.0 * tr10y(t) + 0.4 * x + (x / 3.0).sin();
        let fr = 90.0 - 5.0 * tr10y(t) + 0.6 * x + (x / 4.0).cos();
        writeln!(wide, "{},{ch},{fr}", quarter_label(t)).unwrap();
    }
    fs::write(data.join("hpi.csv"), wide).unwrap();
    dated(&data.join("tr10y.csv"), tr10y);
    dated(&data.join("ecb.csv"), |t| 5.0e6 + 3.0e4 * t as f64 + 1.0e5 * (t as f64 / 5.0).sin());
    for (c, base) in [("ch", 600.0), ("fr", 2000.0)] {
        dated(&data.join(format!("{c}_gdp.csv")), move |t| {
            base * (1.0 + 0.004 * t as f64 + 0.01 * (t as f64 / 2.0).sin())
        });
        dated(&data.join(format!("{c}_cpi.csv")), |t| 1.0 + (t as f64 / 6.0).cos());
    }
    let manifest = format!(
        r#"[run]
seed = 3
runs = 2

[learner]
folds = 5
repeats = 1
bags = 5

[hpi]
path = "data/hpi.csv"

[global.TR10Y]
path = "data/tr10y.csv"

[global.ECB_ASSETS]
path = "data/ecb.csv"

[countries.CH.GDP]
path = "data/ch_gdp.csv"

[countries.CH.CPI]
path = "data/ch_cpi.csv"

[countries.FR.GDP]
path = "data/fr_gdp.csv"

[countries.FR.CPI]
path = "data/fr_cpi.csv"
{extra}"#
    );
    let path = dir.join("hpi.toml");
    fs::write(&path, manifest).unwrap();
    path
}

pub fn hpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpi"))
        .args(args)
        .env_remove("HPI_MANIFEST")
        .output()
        .expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = hpi(args);
    assert!(
        out.status.success(),
        "hpi {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Run directories under `out` whose name starts with `prefix`.
pub fn run_dirs(out: &Path, prefix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir() && p.file_name().unwrap().to_str().unwrap().starts_with(prefix))
        .collect();
    v.sort();
    v
}

pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}
