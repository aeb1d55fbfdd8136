//! Additive decompositions `A = N ± N⋆` of normal structured matrices.
//!
//! A Euclidean-normal matrix that is selfadjoint (skewadjoint) with respect
//! to `J_2n` or `R_2n` is diagonalizable by a unitary automorphism iff
//! `A = N + N⋆` (`A = N − N⋆`) for a normal `N` with `N N⋆ = N⋆ N = 0`. The
//! witness here is `N = V D V^H` for the Lagrangian half `V` of a unitary
//! automorphism `Q = [V, ⋅]` diagonalizing `A`.

use std::fmt;

use num_complex::Complex64;

use crate::diag::{unitary_refine, variant_of, StructuredDiagonalization, Variant, OUTPUT_TOL};
use crate::diag::complete_to_lagrangian;
use crate::error::{Error, Result};
use crate::forms::{adjoint, gram, FormTag, InnerProduct};
use crate::matrix::{inverse, rel_residual, ComplexMatrix};
use crate::spectral::schur;
use crate::structure::{build_unitary_automorphism, classify};
use crate::tolerance::TolerancePolicy;

/// `+` for selfadjoint `A`, `−` for skewadjoint `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }

    fn factor(self) -> Complex64 {
        match self {
            Sign::Plus => Complex64::new(1.0, 0.0),
            Sign::Minus => Complex64::new(-1.0, 0.0),
        }
    }

    fn variant(self) -> Variant {
        match self {
            Sign::Plus => Variant::Selfadjoint,
            Sign::Minus => Variant::Skewadjoint,
        }
    }

    fn of(variant: Variant) -> Self {
        match variant {
            Variant::Selfadjoint => Sign::Plus,
            Variant::Skewadjoint => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::InvalidSize(format!("unknown sign '{other}'"))),
        }
    }
}

/// Frobenius-scaled residuals of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResiduals {
    /// `‖N N^H − N^H N‖ / max(1, ‖N N^H‖)`.
    pub normality_n: f64,
    /// `‖N N⋆‖ / max(1, ‖N‖ ‖N⋆‖)`.
    pub annihilation_left: f64,
    /// `‖N⋆ N‖ / max(1, ‖N‖ ‖N⋆‖)`.
    pub annihilation_right: f64,
    /// `‖A − (N ± N⋆)‖ / max(1, ‖A‖)`.
    pub reconstruction: f64,
}

impl DecompositionResiduals {
    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("normality_N", self.normality_n),
            ("annihilation_left", self.annihilation_left),
            ("annihilation_right", self.annihilation_right),
            ("reconstruction", self.reconstruction),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct AdditiveDecomposition {
    /// The normal factor `N`.
    pub factor: ComplexMatrix,
    pub sign: Sign,
    pub form_tag: FormTag,
    pub residuals: DecompositionResiduals,
    /// Orthonormal Lagrangian frame `V` with `N = V diag(core) V^H`.
    pub frame: ComplexMatrix,
    pub core: Vec<Complex64>,
}

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Residuals of `A = N ± N⋆` without any factorization.
pub fn decomposition_residuals(a: &ComplexMatrix, n: &ComplexMatrix, sign: Sign, form: &InnerProduct) -> Result<DecompositionResiduals> {
    if a.nrows() != n.nrows() || a.ncols() != n.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, N is {}x{}",
            a.nrows(),
            a.ncols(),
            n.nrows(),
            n.ncols()
        )));
    }
    let star = adjoint(n, form)?;
    let nh = n.herm_transpose();
    let normality_n = rel_residual(&(n * &nh), &(&nh * n))?;
    let scale = (n.frobenius_norm() * star.frobenius_norm()).max(1.0);
    let annihilation_left = (n * &star).frobenius_norm() / scale;
    let annihilation_right = (&star * n).frobenius_norm() / scale;
    let rebuilt = n + &star.scale(sign.factor());
    let reconstruction = rel_residual(a, &rebuilt)?;
    Ok(DecompositionResiduals {
        normality_n: nan_to_inf(normality_n),
        annihilation_left: nan_to_inf(annihilation_left),
        annihilation_right: nan_to_inf(annihilation_right),
        reconstruction: nan_to_inf(reconstruction),
    })
}

/// `V diag(values) V^H`.
fn frame_product(frame: &ComplexMatrix, values: &[Complex64]) -> ComplexMatrix {
    &(frame * &ComplexMatrix::from_diagonal(values)) * &frame.herm_transpose()
}

/// `A = N ± N⋆` for a normal, structured, unitarily structure-diagonalizable
/// `a`.
pub fn decompose_additive(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<AdditiveDecomposition> {
    let n = form.require_structured()?;
    let diag = unitary_refine(a, form, tol)?;
    let frame = diag.transform.columns(0, n);
    let factor = frame_product(&frame, &diag.core);
    let sign = Sign::of(diag.variant);
    let residuals = decomposition_residuals(a, &factor, sign, form)?;
    if residuals.max() > OUTPUT_TOL {
        return Err(Error::NumericalBreakdown(format!(
            "decomposition residual {:.3e} exceeds {OUTPUT_TOL:e}",
            residuals.max()
        )));
    }
    Ok(AdditiveDecomposition {
        factor,
        sign,
        form_tag: form.tag(),
        residuals,
        frame,
        core: diag.core,
    })
}

/// Outcome of re-checking a decomposition against `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub residuals: DecompositionResiduals,
    /// Residual of `A⋆ = ±A` for the sign of the decomposition.
    pub structure: f64,
    /// `‖A A^H − A^H A‖ / max(1, ‖A A^H‖)`.
    pub normality_a: f64,
    pub failures: Vec<String>,
}

/// Recomputes every residual of `dec` against `a`; passes iff all are at
/// most `1e-8`.
pub fn verify_decomposition(a: &ComplexMatrix, dec: &AdditiveDecomposition, form: &InnerProduct, tol: &TolerancePolicy) -> Result<VerificationReport> {
    verify_factor(a, &dec.factor, dec.sign, form, tol)
}

/// [`verify_decomposition`] for a bare factor and sign.
pub fn verify_factor(a: &ComplexMatrix, factor: &ComplexMatrix, sign: Sign, form: &InnerProduct, tol: &TolerancePolicy) -> Result<VerificationReport> {
    let residuals = decomposition_residuals(a, factor, sign, form)?;
    let report = classify(a, form, tol)?;
    let structure = match sign {
        Sign::Plus => report.selfadjoint.residual,
        Sign::Minus => report.skewadjoint.residual,
    };
    let normality_a = report.euclidean_normal.residual;
    let mut failures = Vec::new();
    for (name, r) in residuals.named().into_iter().chain([("structure", structure), ("normality_A", normality_a)]) {
        if !(r <= OUTPUT_TOL) {
            failures.push(format!("{name} residual {r:.3e} exceeds {OUTPUT_TOL:e}"));
        }
    }
    Ok(VerificationReport {
        passed: failures.is_empty(),
        residuals,
        structure,
        normality_a,
        failures,
    })
}

/// Eigenvalues and unitary eigenvectors of a normal matrix from its Schur
/// form (whose triangular factor is diagonal up to rounding).
fn normal_eigen(a: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let s = schur(a)?;
    Ok((s.t.diagonal(), s.z))
}

fn check_normal(a: &ComplexMatrix) -> Result<()> {
    let ah = a.herm_transpose();
    let residual = rel_residual(&(a * &ah), &(&ah * a))?;
    if !(residual <= OUTPUT_TOL) {
        return Err(Error::NotNormal { residual });
    }
    Ok(())
}

/// Builds `A = N ± N⋆` from a valid factor together with a certified unitary
/// structured diagonalization of it.
pub fn reconstruct_from_n(
    factor: &ComplexMatrix,
    sign: Sign,
    form: &InnerProduct,
    tol: &TolerancePolicy,
) -> Result<(ComplexMatrix, StructuredDiagonalization)> {
    let n = form.require_structured()?;
    if !factor.is_square() || factor.nrows() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "factor is {}x{}, form dimension is {}",
            factor.nrows(),
            factor.ncols(),
            2 * n
        )));
    }
    check_normal(factor)?;
    let star = adjoint(factor, form)?;
    let scale = (factor.frobenius_norm() * star.frobenius_norm()).max(1.0);
    let left = (factor * &star).frobenius_norm() / scale;
    let right = (&star * factor).frobenius_norm() / scale;
    if !(left <= OUTPUT_TOL && right <= OUTPUT_TOL) {
        return Err(Error::NotAnnihilating { left, right });
    }
    let a = factor + &star.scale(sign.factor());

    let (values, vectors) = normal_eigen(factor)?;
    let largest = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nonzero: Vec<usize> = (0..values.len())
        .filter(|&i| largest > 0.0 && values[i].norm() > tol.rank_tol.max(1e-12) * largest)
        .collect();
    let range = vectors.select_columns(&nonzero);
    let neutrality = gram(&range, form)?.frobenius_norm();
    if nonzero.len() > n || neutrality > OUTPUT_TOL {
        return Err(Error::NotNeutralRange { residual: neutrality });
    }
    let frame = complete_to_lagrangian(&range, form, tol).map_err(|e| match e {
        Error::NotNeutral { residual } | Error::NotOrthonormal { residual } => Error::NotNeutralRange { residual },
        other => other,
    })?;
    let mut core: Vec<Complex64> = nonzero.iter().map(|&i| values[i]).collect();
    core.resize(n, Complex64::new(0.0, 0.0));

    let u = build_unitary_automorphism(&frame, form).map_err(|e| match e {
        Error::NotLagrangianFrame { condition, residual } => {
            Error::NumericalBreakdown(format!("completed frame failed {condition} (residual {residual:.3e})"))
        }
        other => other,
    })?;
    let variant = sign.variant();
    let diagonal = crate::diag::canonical_diagonal(&core, form, variant)?;
    let residual_similarity = rel_residual(&(&(&u.herm_transpose() * &a) * &u), &diagonal)?;
    let residual_automorphism = rel_residual(&gram(&u, form)?, form.matrix())?;
    let unitary_residual = rel_residual(&(&u.herm_transpose() * &u), &ComplexMatrix::identity(2 * n))?;
    for (name, r) in [
        ("automorphism", residual_automorphism),
        ("similarity", residual_similarity),
        ("unitarity", unitary_residual),
    ] {
        if !(r <= OUTPUT_TOL) {
            return Err(Error::NumericalBreakdown(format!("{name} residual {r:.3e} exceeds {OUTPUT_TOL:e}")));
        }
    }
    let diag = StructuredDiagonalization {
        transform: u,
        core,
        form_tag: form.tag(),
        variant,
        residual_automorphism,
        residual_similarity,
        unitary: true,
    };
    Ok((a, diag))
}

/// `f(N)` for normal `N` by applying `f` to its eigenvalues.
fn normal_function(n: &ComplexMatrix, f: impl Fn(Complex64) -> Complex64) -> Result<ComplexMatrix> {
    let (values, vectors) = normal_eigen(n)?;
    let mapped: Vec<Complex64> = values.into_iter().map(f).collect();
    Ok(frame_product(&vectors, &mapped))
}

/// `exp(A)` from `A = N ± N⋆`: with `S = exp(N)`, `exp(A) = S (S⋆)⁻¹` for the
/// minus sign and `S S⋆` for the plus sign. Returns `(exp(A), S)`.
pub fn structured_exp(dec: &AdditiveDecomposition, form: &InnerProduct) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s = normal_function(&dec.factor, Complex64::exp)?;
    let s_star = adjoint(&s, form)?;
    let exp_a = match dec.sign {
        Sign::Plus => &s * &s_star,
        Sign::Minus => &s * &inverse(&s_star, &TolerancePolicy::default())?,
    };
    Ok((exp_a, s))
}

/// A normal `p`-th root `X` of a nonsingular normal selfadjoint `a`, again
/// selfadjoint: `X = M + M⋆` with `M = V D^{1/p} V^H` (principal branch).
pub fn structured_root(a: &ComplexMatrix, p: u32, form: &InnerProduct, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    if p < 2 {
        return Err(Error::InvalidSize(format!("root order must be at least 2, got {p}")));
    }
    if variant_of(a, form, tol)? != Variant::Selfadjoint {
        let report = classify(a, form, tol)?;
        return Err(Error::NotStructured {
            structure: "selfadjoint".into(),
            residual: report.selfadjoint.residual,
        });
    }
    let dec = decompose_additive(a, form, tol)?;
    let largest = dec.core.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if largest == 0.0 || dec.core.iter().any(|z| z.norm() <= tol.rank_tol.max(1e-12) * largest) {
        return Err(Error::SingularInput);
    }
    let roots: Vec<Complex64> = dec.core.iter().map(|z| z.powf(1.0 / p as f64)).collect();
    let m = frame_product(&dec.frame, &roots);
    Ok(&m + &adjoint(&m, form)?)
}

/// `A = E + F` with `E F = F E = 0`, splitting a unitary diagonalization of
/// a normal `a` (dimension `2n`) after its first `n` eigenvalues.
pub fn split_normal(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() || !a.nrows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "split needs an even square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_normal(a)?;
    let n = a.nrows() / 2;
    let (values, vectors) = normal_eigen(a)?;
    let e = frame_product(&vectors.columns(0, n), &values[..n]);
    let f = frame_product(&vectors.columns(n, n), &values[n..]);
    Ok((e, f))
}
