#![allow(dead_code)]

use structdiag_core::spectral::cmp_complex;
use structdiag_core::{Complex64, ComplexMatrix, Structure};

pub const KINDS: [Structure; 4] = [
    Structure::SkewHamiltonian,
    Structure::Hamiltonian,
    Structure::PerHermitian,
    Structure::PerskewHermitian,
];

/// Largest distance in a greedy nearest-neighbour matching of two spectra.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut sorted = a.to_vec();
    sorted.sort_by(cmp_complex);
    for x in sorted {
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

pub fn is_diagonal(m: &ComplexMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}
