#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use structdiag_cli::mtx;
use structdiag_core::{Complex64, ComplexMatrix};

pub const BIN: &str = env!("CARGO_BIN_EXE_structdiag");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.stdout))
    }
}

/// Runs the binary in `dir` with `STRUCTDIAG_TOL` cleared unless given.
pub fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.current_dir(dir).args(args).env_remove("STRUCTDIAG_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn run(dir: &Path, args: &[&str]) -> Run {
    run_in(dir, args, &[])
}

pub fn write(dir: &Path, name: &str, m: &ComplexMatrix) -> PathBuf {
    let path = dir.join(name);
    mtx::write_matrix(&path, m).unwrap();
    path
}

pub fn read(dir: &Path, name: &str) -> ComplexMatrix {
    mtx::read_matrix(&dir.join(name)).unwrap()
}

pub fn j2() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap()
}

/// Largest distance in a greedy nearest-neighbour matching of two spectra.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// `exp(A)` by scaling and squaring a truncated Taylor series.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let m = a.nrows();
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut term = ComplexMatrix::identity(m);
    let mut sum = ComplexMatrix::identity(m);
    for k in 1..=30 {
        term = (&term * &scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
