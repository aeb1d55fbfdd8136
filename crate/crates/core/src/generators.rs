//! Seeded random constructors for structured matrices, planted instances
//! with known diagonalizations, and counterexamples.
//!
//! All randomness comes from xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`). Uniform doubles take the top 53 bits of each output;
//! Gaussians use Box–Muller, and a complex Gaussian is `(z0 + i z1)/√2` from
//! one Box–Muller pair. Matrices are filled row by row. Identical seeds and
//! parameters give bit-identical output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::diag::Variant;
use crate::error::{Error, Result};
use crate::forms::{adjoint, anti_identity, congruence_to, FormKind, FormTag, InnerProduct};
use crate::matrix::{inverse, orthonormalize_columns, ComplexMatrix};
use crate::structure::{build_unitary_automorphism, hermitian_projection, FormFamily, Structure};
use crate::tolerance::TolerancePolicy;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minimum distance between distinct planted eigenvalues.
pub const PLANTED_SEPARATION: f64 = 0.05;

/// Seeded portable random stream.
#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    fn box_muller(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        (radius * angle.cos(), radius * angle.sin())
    }

    /// Standard normal (the second Box–Muller value is discarded).
    pub fn gaussian(&mut self) -> f64 {
        self.box_muller().0
    }

    /// Complex normal with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.box_muller();
        Complex64::new(a, b) / 2f64.sqrt()
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let entries: Vec<Complex64> = (0..rows * cols).map(|_| self.complex_gaussian()).collect();
        ComplexMatrix::from_row_slice(rows, cols, &entries).expect("finite entries")
    }

    /// Random unitary: orthonormalized complex Gaussian matrix.
    pub fn unitary(&mut self, m: usize) -> ComplexMatrix {
        loop {
            let g = self.complex_matrix(m, m);
            if let Ok(q) = orthonormalize_columns(&g, &TolerancePolicy::default()) {
                return q;
            }
        }
    }
}

/// Form and variant named by a form-specific structure kind.
pub fn kind_form(kind: Structure, n: usize) -> Result<(InnerProduct, Variant)> {
    let variant = match kind {
        Structure::SkewHamiltonian | Structure::PerHermitian => Variant::Selfadjoint,
        Structure::Hamiltonian | Structure::PerskewHermitian => Variant::Skewadjoint,
        other => {
            return Err(Error::InvalidSize(format!(
                "'{other}' is not a selfadjoint or skewadjoint kind of the symplectic or perplectic form"
            )))
        }
    };
    let form = match kind.form_family() {
        Some(FormFamily::Symplectic) => InnerProduct::symplectic(n)?,
        _ => InnerProduct::perplectic(n)?,
    };
    Ok((form, variant))
}

/// `(M + M⋆)/2` or `(M − M⋆)/2` for a complex Gaussian `M`.
pub fn random_structured(kind: Structure, n: usize, seed: u64) -> Result<ComplexMatrix> {
    let (form, variant) = kind_form(kind, n)?;
    let mut rng = SeededRng::new(seed);
    let m = rng.complex_matrix(2 * n, 2 * n);
    let star = adjoint(&m, &form)?;
    let sum = &m + &star.scale(Complex64::new(variant.sign(), 0.0));
    Ok(sum.scale(Complex64::new(0.5, 0.0)))
}

/// Orthonormal eigenvectors of `B` (of `−iB` for `J`) for `+1` and `−1`.
fn form_eigenvectors(form: &InnerProduct) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = form.require_structured()?;
    let s = 0.5f64.sqrt();
    let mut plus = ComplexMatrix::zeros(2 * n, n);
    let mut minus = ComplexMatrix::zeros(2 * n, n);
    for j in 0..n {
        match form.tag() {
            FormTag::PerplecticR(_) => {
                let k = 2 * n - 1 - j;
                plus[(j, j)] = Complex64::new(s, 0.0);
                plus[(k, j)] = Complex64::new(s, 0.0);
                minus[(j, j)] = Complex64::new(s, 0.0);
                minus[(k, j)] = Complex64::new(-s, 0.0);
            }
            _ => {
                plus[(j, j)] = Complex64::new(s, 0.0);
                plus[(n + j, j)] = Complex64::new(0.0, s);
                minus[(j, j)] = Complex64::new(s, 0.0);
                minus[(n + j, j)] = Complex64::new(0.0, -s);
            }
        }
    }
    Ok((plus, minus))
}

/// Random orthonormal Lagrangian frame `(P₊ + P₋ U)/√2` for a random unitary `U`.
pub fn random_lagrangian_frame(form: &InnerProduct, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    let n = form.require_structured()?;
    let (plus, minus) = form_eigenvectors(form)?;
    let u = rng.unitary(n);
    Ok((&plus + &(&minus * &u)).scale(Complex64::new(0.5f64.sqrt(), 0.0)))
}

fn automorphism_from(form: &InnerProduct, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    let frame = random_lagrangian_frame(form, rng)?;
    build_unitary_automorphism(&frame, form)
}

/// Random unitary symplectic (for `J`) or unitary perplectic (for `R`) matrix.
pub fn random_automorphism(form: &InnerProduct, seed: u64) -> Result<ComplexMatrix> {
    automorphism_from(form, &mut SeededRng::new(seed))
}

/// A structured matrix together with the diagonalization it was built from.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub matrix: ComplexMatrix,
    /// Automorphism `Q` with `A = Q D̃ Q⁻¹`.
    pub transform: ComplexMatrix,
    /// `D̃`, the canonical diagonal.
    pub diagonal: ComplexMatrix,
    pub core: Vec<Complex64>,
    pub form: InnerProduct,
    pub variant: Variant,
}

/// Where `value` sits in the `2n` layout relative to its core slot.
fn partner_value(value: Complex64, variant: Variant) -> Complex64 {
    value.conj() * variant.sign()
}

/// Core entries with modulus in `[0.5, 2]`; each slot lands on the critical
/// axis with probability 1/4 (then its partner coincides with it). All other
/// pairs of the `2n` diagonal values are at least [`PLANTED_SEPARATION`]
/// apart.
fn sample_core(n: usize, variant: Variant, rng: &mut SeededRng) -> Vec<Complex64> {
    let mut taken: Vec<Complex64> = Vec::with_capacity(2 * n);
    let mut core = Vec::with_capacity(n);
    while core.len() < n {
        let critical = rng.uniform() < 0.25;
        let modulus = rng.uniform_in(0.5, 2.0);
        let value = if critical {
            let signed = if rng.uniform() < 0.5 { -modulus } else { modulus };
            match variant {
                Variant::Selfadjoint => Complex64::new(signed, 0.0),
                Variant::Skewadjoint => Complex64::new(0.0, signed),
            }
        } else {
            Complex64::from_polar(modulus, rng.uniform_in(0.0, 2.0 * PI))
        };
        let partner = partner_value(value, variant);
        let own_gap = critical || (value - partner).norm() >= PLANTED_SEPARATION;
        let clear = taken
            .iter()
            .all(|t| (t - value).norm() >= PLANTED_SEPARATION && (t - partner).norm() >= PLANTED_SEPARATION);
        if own_gap && clear {
            taken.push(value);
            taken.push(partner);
            core.push(value);
        }
    }
    core
}

fn diagonal_of(core: &[Complex64], form: &InnerProduct, variant: Variant) -> ComplexMatrix {
    crate::diag::canonical_diagonal(core, form, variant).expect("core length matches form")
}

/// Normal structured matrix `A = Q D̃ Q^H` with a random unitary automorphism
/// `Q` and a random core `D`.
pub fn random_structured_diagonalizable(kind: Structure, n: usize, seed: u64) -> Result<PlantedInstance> {
    let (form, variant) = kind_form(kind, n)?;
    let mut rng = SeededRng::new(seed);
    let core = sample_core(n, variant, &mut rng);
    let diagonal = diagonal_of(&core, &form, variant);
    let q = automorphism_from(&form, &mut rng)?;
    let matrix = &(&q * &diagonal) * &q.herm_transpose();
    Ok(PlantedInstance {
        matrix,
        transform: q,
        diagonal,
        core,
        form,
        variant,
    })
}

/// `[[X, 0], [0, X^{-H}]]` for `J`, `[[X, 0], [0, R_n X^{-H} R_n]]` for `R`:
/// a non-unitary automorphism for `X = I + G/(2√n)`, `G` complex Gaussian.
fn block_automorphism(form: &InnerProduct, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    let n = form.require_structured()?;
    let tol = TolerancePolicy::default();
    let (x, x_inv_h) = loop {
        let g = rng.complex_matrix(n, n);
        let x = &ComplexMatrix::identity(n) + &g.scale(Complex64::new(0.5 / (n as f64).sqrt(), 0.0));
        if let Ok(inv) = inverse(&x, &tol) {
            if inv.frobenius_norm() * x.frobenius_norm() < 50.0 * n as f64 {
                break (x, inv.herm_transpose());
            }
        }
    };
    let lower = match form.tag() {
        FormTag::PerplecticR(_) => &(&anti_identity(n) * &x_inv_h) * &anti_identity(n),
        _ => x_inv_h,
    };
    Ok(ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => x[(i, j)],
        (false, false) => lower[(i - n, j - n)],
        _ => Complex64::new(0.0, 0.0),
    }))
}

/// Like [`random_structured_diagonalizable`] but conjugated by a
/// non-unitary automorphism, so the result is not normal.
pub fn random_structured_diagonalizable_nonnormal(kind: Structure, n: usize, seed: u64) -> Result<PlantedInstance> {
    let (form, variant) = kind_form(kind, n)?;
    let mut rng = SeededRng::new(seed);
    let core = sample_core(n, variant, &mut rng);
    let diagonal = diagonal_of(&core, &form, variant);
    let q = automorphism_from(&form, &mut rng)?;
    let g = &q * &block_automorphism(&form, &mut rng)?;
    let g_inv = adjoint(&g, &form)?;
    let matrix = &(&g * &diagonal) * &g_inv;
    Ok(PlantedInstance {
        matrix,
        transform: g,
        diagonal,
        core,
        form,
        variant,
    })
}

/// Skew-Hamiltonian, diagonalizable, but not symplectic diagonalizable:
/// `A = W diag(μ₁ I_n, μ₂ I_n) W⁻¹` with `W^H J W = i I_n ⊕ (−i) I_n`, so the
/// eigenspace of the real eigenvalue `μ₁` has a definite Gram matrix.
pub fn counterexample_unbalanced(n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("counterexample needs n >= 2, got {n}")));
    }
    let form = InnerProduct::symplectic(n)?;
    let tol = TolerancePolicy::default();
    let mut rng = SeededRng::new(seed);
    let (mu1, mu2) = loop {
        let a = rng.uniform_in(-2.0, 2.0);
        let b = rng.uniform_in(-2.0, 2.0);
        if (a - b).abs() >= 0.5 {
            break (a, b);
        }
    };
    let target: Vec<Complex64> = (0..2 * n).map(|k| if k < n { I } else { -I }).collect();
    let w0 = congruence_to(form.matrix(), &ComplexMatrix::from_diagonal(&target), FormKind::SkewHermitian, &tol)?;
    let q = automorphism_from(&form, &mut rng)?;
    let w = &(&q * &block_automorphism(&form, &mut rng)?) * &w0;
    let values: Vec<Complex64> = (0..2 * n).map(|k| Complex64::new(if k < n { mu1 } else { mu2 }, 0.0)).collect();
    let w_inv = inverse(&w, &tol)?;
    Ok(&(&w * &ComplexMatrix::from_diagonal(&values)) * &w_inv)
}

/// `[[A, B], [B, −A]]` with random skew-Hermitian `A`, `B`, redrawn until
/// numerically nonsingular. Skew-Hamiltonian and skew-Hermitian.
pub fn block_example(n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidSize("n must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    loop {
        let a = hermitian_projection(&rng.complex_matrix(n, n), true);
        let b = hermitian_projection(&rng.complex_matrix(n, n), true);
        let m = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, true) => b[(i - n, j)],
            (false, false) => -a[(i - n, j - n)],
        });
        let sv = m.singular_values();
        if sv.last().copied().unwrap_or(0.0) >= 1e-3 * sv[0] {
            return Ok(m);
        }
    }
}

/// A normal factor `N = V_k diag(values) V_k^H` whose range is a random
/// `rank`-dimensional neutral subspace.
#[derive(Debug, Clone)]
pub struct PlantedFactor {
    pub factor: ComplexMatrix,
    pub frame: ComplexMatrix,
    pub values: Vec<Complex64>,
}

/// Random valid factor for `A = N ± N⋆` with `rank(N) = rank ≤ n`.
pub fn random_annihilating_factor(form: &InnerProduct, variant: Variant, rank: usize, seed: u64) -> Result<PlantedFactor> {
    let n = form.require_structured()?;
    if rank > n {
        return Err(Error::FrameTooLarge { columns: rank, max: n });
    }
    let mut rng = SeededRng::new(seed);
    let values = sample_core(rank, variant, &mut rng);
    let frame = random_lagrangian_frame(form, &mut rng)?.columns(0, rank);
    let factor = &(&frame * &ComplexMatrix::from_diagonal(&values)) * &frame.herm_transpose();
    Ok(PlantedFactor { factor, frame, values })
}
