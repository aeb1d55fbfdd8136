//! Classification against form-induced structures and the builders for
//! unitary-symplectic and unitary-perplectic matrices.
//!
//! | structure    | `B = J_2n`       | `B = R_2n`        |
//! |--------------|------------------|-------------------|
//! | selfadjoint  | skew-Hamiltonian | per-Hermitian     |
//! | skewadjoint  | Hamiltonian      | perskew-Hermitian |
//! | automorphism | symplectic       | perplectic        |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{adjoint, anti_identity, gram, FormTag, InnerProduct};
use crate::matrix::{rel_residual, ComplexMatrix};
use crate::tolerance::TolerancePolicy;

/// Input tolerance on the orthonormal Lagrangian frame handed to the builders.
pub const FRAME_INPUT_TOL: f64 = 1e-10;

/// One structure test: its relative residual and whether it passed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
}

impl Check {
    fn new(residual: f64, tol: f64) -> Self {
        Self {
            holds: residual <= tol,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub hermitian: Check,
    pub skew_hermitian: Check,
    pub unitary: Check,
    pub euclidean_normal: Check,
    pub selfadjoint: Check,
    pub skewadjoint: Check,
    pub automorphism: Check,
    pub b_normal: Check,
    pub form_tag: FormTag,
}

impl StructureReport {
    /// The check for `structure`, or `None` when the name belongs to a
    /// different form (asking a perplectic report about "hamiltonian").
    pub fn check(&self, structure: Structure) -> Option<Check> {
        if let Some(family) = structure.form_family() {
            let matches = matches!(
                (family, self.form_tag),
                (FormFamily::Symplectic, FormTag::SymplecticJ(_))
                    | (FormFamily::Perplectic, FormTag::PerplecticR(_))
            );
            if !matches {
                return None;
            }
        }
        Some(match structure {
            Structure::Hermitian => self.hermitian,
            Structure::SkewHermitian => self.skew_hermitian,
            Structure::Unitary => self.unitary,
            Structure::Normal => self.euclidean_normal,
            Structure::Selfadjoint | Structure::SkewHamiltonian | Structure::PerHermitian => self.selfadjoint,
            Structure::Skewadjoint | Structure::Hamiltonian | Structure::PerskewHermitian => self.skewadjoint,
            Structure::Automorphism | Structure::Symplectic | Structure::Perplectic => self.automorphism,
            Structure::BNormal => self.b_normal,
        })
    }

    /// All checks with the names used for them under this report's form.
    pub fn named_checks(&self) -> Vec<(&'static str, Check)> {
        let (sa, ska, auto) = match self.form_tag {
            FormTag::SymplecticJ(_) => ("skew-hamiltonian", "hamiltonian", "symplectic"),
            FormTag::PerplecticR(_) => ("per-hermitian", "perskew-hermitian", "perplectic"),
            _ => ("selfadjoint", "skewadjoint", "automorphism"),
        };
        vec![
            ("hermitian", self.hermitian),
            ("skew-hermitian", self.skew_hermitian),
            ("unitary", self.unitary),
            ("normal", self.euclidean_normal),
            (sa, self.selfadjoint),
            (ska, self.skewadjoint),
            (auto, self.automorphism),
            ("b-normal", self.b_normal),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormFamily {
    Symplectic,
    Perplectic,
}

/// A named structure. Form-specific names only apply to their own form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Hermitian,
    SkewHermitian,
    Unitary,
    Normal,
    Selfadjoint,
    Skewadjoint,
    Automorphism,
    BNormal,
    SkewHamiltonian,
    Hamiltonian,
    Symplectic,
    PerHermitian,
    PerskewHermitian,
    Perplectic,
}

impl Structure {
    pub const ALL: [Structure; 14] = [
        Structure::Hermitian,
        Structure::SkewHermitian,
        Structure::Unitary,
        Structure::Normal,
        Structure::Selfadjoint,
        Structure::Skewadjoint,
        Structure::Automorphism,
        Structure::BNormal,
        Structure::SkewHamiltonian,
        Structure::Hamiltonian,
        Structure::Symplectic,
        Structure::PerHermitian,
        Structure::PerskewHermitian,
        Structure::Perplectic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Structure::Hermitian => "hermitian",
            Structure::SkewHermitian => "skew-hermitian",
            Structure::Unitary => "unitary",
            Structure::Normal => "normal",
            Structure::Selfadjoint => "selfadjoint",
            Structure::Skewadjoint => "skewadjoint",
            Structure::Automorphism => "automorphism",
            Structure::BNormal => "b-normal",
            Structure::SkewHamiltonian => "skew-hamiltonian",
            Structure::Hamiltonian => "hamiltonian",
            Structure::Symplectic => "symplectic",
            Structure::PerHermitian => "per-hermitian",
            Structure::PerskewHermitian => "perskew-hermitian",
            Structure::Perplectic => "perplectic",
        }
    }

    pub fn form_family(self) -> Option<FormFamily> {
        match self {
            Structure::SkewHamiltonian | Structure::Hamiltonian | Structure::Symplectic => Some(FormFamily::Symplectic),
            Structure::PerHermitian | Structure::PerskewHermitian | Structure::Perplectic => Some(FormFamily::Perplectic),
            _ => None,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Structure::ALL
            .into_iter()
            .find(|st| st.name() == key)
            .ok_or_else(|| Error::InvalidSize(format!("unknown structure name '{s}'")))
    }
}

/// Evaluates every structure test for `a` under `form`.
pub fn classify(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<StructureReport> {
    let star = adjoint(a, form)?;
    let ah = a.herm_transpose();
    let eye = ComplexMatrix::identity(a.nrows());
    let t = tol.structure_tol;
    let res = |x: &ComplexMatrix, y: &ComplexMatrix| rel_residual(x, y).expect("conforming shapes");
    Ok(StructureReport {
        hermitian: Check::new(res(&ah, a), t),
        skew_hermitian: Check::new(res(&ah, &-a), t),
        unitary: Check::new(res(&(&ah * a), &eye), t),
        euclidean_normal: Check::new(res(&(a * &ah), &(&ah * a)), t),
        selfadjoint: Check::new(res(&star, a), t),
        skewadjoint: Check::new(res(&star, &-a), t),
        automorphism: Check::new(res(&(&star * a), &eye), t),
        b_normal: Check::new(res(&(a * &star), &(&star * a)), t),
        form_tag: form.tag(),
    })
}

/// Succeeds iff `classify` reports `wanted`.
pub fn assert_structure(a: &ComplexMatrix, form: &InnerProduct, wanted: Structure, tol: &TolerancePolicy) -> Result<()> {
    let report = classify(a, form, tol)?;
    let check = report
        .check(wanted)
        .ok_or_else(|| Error::UnsupportedForm(format!("'{wanted}' is not defined for the {} form", form.tag())))?;
    if check.holds {
        Ok(())
    } else {
        Err(Error::NotStructured {
            structure: wanted.name().into(),
            residual: check.residual,
        })
    }
}

fn check_frame(v: &ComplexMatrix, form: &InnerProduct) -> Result<()> {
    let n = v.ncols();
    if v.nrows() != 2 * n || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "Lagrangian frame must be 2n x n, got {}x{}",
            v.nrows(),
            v.ncols()
        )));
    }
    let orth = (&(&v.herm_transpose() * v) - &ComplexMatrix::identity(n)).frobenius_norm();
    if orth > FRAME_INPUT_TOL {
        return Err(Error::NotLagrangianFrame {
            condition: "orthonormality V^H V = I".into(),
            residual: orth,
        });
    }
    let neutral = gram(v, form)?.frobenius_norm();
    if neutral > FRAME_INPUT_TOL {
        return Err(Error::NotLagrangianFrame {
            condition: "neutrality V^H B V = 0".into(),
            residual: neutral,
        });
    }
    Ok(())
}

/// `Q = [V, J_2n^T V]` for an orthonormal Lagrangian frame `V` (`2n × n`).
pub fn build_unitary_symplectic(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let form = InnerProduct::symplectic(v.ncols().max(1))?;
    check_frame(v, &form)?;
    let second = &form.matrix().transpose() * v;
    ComplexMatrix::hstack(&[v, &second])
}

/// `Q = [V, R_2n V R_n]` for an orthonormal Lagrangian frame `V` (`2n × n`).
pub fn build_unitary_perplectic(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = v.ncols().max(1);
    let form = InnerProduct::perplectic(n)?;
    check_frame(v, &form)?;
    let second = &(form.matrix() * v) * &anti_identity(n);
    ComplexMatrix::hstack(&[v, &second])
}

/// Dispatches to the symplectic or perplectic builder by form.
pub fn build_unitary_automorphism(v: &ComplexMatrix, form: &InnerProduct) -> Result<ComplexMatrix> {
    match form.tag() {
        FormTag::SymplecticJ(_) => build_unitary_symplectic(v),
        FormTag::PerplecticR(_) => build_unitary_perplectic(v),
        other => Err(Error::UnsupportedForm(other.to_string())),
    }
}

/// Block pattern `[[A1, A2], [A3, A1^H]]` with skew-Hermitian `A2`, `A3`.
pub fn skew_hamiltonian_from_blocks(a1: &ComplexMatrix, a2: &ComplexMatrix, a3: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a1.nrows();
    if [a1, a2, a3].iter().any(|b| b.nrows() != n || b.ncols() != n) {
        return Err(Error::DimensionMismatch("blocks must all be n x n".into()));
    }
    let a4 = a1.herm_transpose();
    Ok(ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a1[(i, j)],
        (true, false) => a2[(i, j - n)],
        (false, true) => a3[(i - n, j)],
        (false, false) => a4[(i - n, j - n)],
    }))
}

/// Half of `M ± M^H`: the Hermitian or skew-Hermitian part of `m`.
pub(crate) fn hermitian_projection(m: &ComplexMatrix, skew: bool) -> ComplexMatrix {
    let mh = m.herm_transpose();
    let sum = if skew { m - &mh } else { m + &mh };
    sum.scale(Complex64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn sample(n: usize, salt: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| c((1.3 * i as f64 + salt * j as f64).sin(), (0.7 * j as f64 - salt * i as f64).cos()))
    }

    #[test]
    fn j_is_hamiltonian_and_symplectic() {
        for n in 1..=3 {
            let j = InnerProduct::symplectic(n).unwrap();
            let r = classify(j.matrix(), &j, &tol()).unwrap();
            assert!(r.skewadjoint.holds && r.automorphism.holds);
            assert!(!r.selfadjoint.holds);
            assert_eq!(r.check(Structure::Hamiltonian), Some(r.skewadjoint));
            assert_eq!(r.check(Structure::PerHermitian), None);
        }
    }

    #[test]
    fn r_is_per_hermitian_and_perplectic() {
        let r_form = InnerProduct::perplectic(2).unwrap();
        let rep = classify(r_form.matrix(), &r_form, &tol()).unwrap();
        assert!(rep.selfadjoint.holds && rep.automorphism.holds && !rep.skewadjoint.holds);
    }

    #[test]
    fn identity_flags() {
        for form in [InnerProduct::symplectic(2).unwrap(), InnerProduct::perplectic(2).unwrap(), InnerProduct::euclidean(4).unwrap()] {
            let rep = classify(&ComplexMatrix::identity(4), &form, &tol()).unwrap();
            assert!(rep.selfadjoint.holds && rep.automorphism.holds && !rep.skewadjoint.holds);
            assert!(rep.hermitian.holds && rep.unitary.holds && rep.euclidean_normal.holds);
        }
    }

    #[test]
    fn skew_hamiltonian_block_pattern() {
        let n = 3;
        let a1 = sample(n, 0.4);
        let a2 = hermitian_projection(&sample(n, 1.1), true);
        let a3 = hermitian_projection(&sample(n, 2.3), true);
        let a = skew_hamiltonian_from_blocks(&a1, &a2, &a3).unwrap();
        let j = InnerProduct::symplectic(n).unwrap();
        let rep = classify(&a, &j, &tol()).unwrap();
        assert!(rep.selfadjoint.holds, "residual {}", rep.selfadjoint.residual);
        assert!(!rep.skewadjoint.holds);
    }

    #[test]
    fn assert_structure_cases() {
        let t = tol();
        let j = InnerProduct::symplectic(1).unwrap();
        assert!(assert_structure(j.matrix(), &j, Structure::Hamiltonian, &t).is_ok());
        assert!(matches!(
            assert_structure(&ComplexMatrix::identity(2), &j, Structure::Hamiltonian, &t),
            Err(Error::NotStructured { .. })
        ));
        let r = InnerProduct::perplectic(1).unwrap();
        assert!(assert_structure(r.matrix(), &r, Structure::PerHermitian, &t).is_ok());
        assert!(matches!(
            assert_structure(r.matrix(), &r, Structure::Hamiltonian, &t),
            Err(Error::UnsupportedForm(_))
        ));
    }

    #[test]
    fn structure_names_round_trip() {
        for s in Structure::ALL {
            assert_eq!(s.name().parse::<Structure>().unwrap(), s);
        }
        assert!("frobnicated".parse::<Structure>().is_err());
    }

    #[test]
    fn unitary_symplectic_from_coordinate_frame() {
        let n = 2;
        let v = ComplexMatrix::identity(2 * n).columns(0, n);
        let q = build_unitary_symplectic(&v).unwrap();
        // J^T e_j = e_{n+j}, so Q is the identity
        assert_eq!(q, ComplexMatrix::identity(2 * n));
    }

    #[test]
    fn unitary_symplectic_rejects_non_neutral_frame() {
        let v = ComplexMatrix::identity(4).select_columns(&[0, 2]);
        assert!(matches!(build_unitary_symplectic(&v), Err(Error::NotLagrangianFrame { .. })));
        let v = ComplexMatrix::identity(4).columns(0, 2).scale(c(2.0, 0.0));
        assert!(matches!(build_unitary_symplectic(&v), Err(Error::NotLagrangianFrame { .. })));
    }

    #[test]
    fn unitary_perplectic_examples() {
        let s = 0.5f64.sqrt();
        for v in [
            ComplexMatrix::from_row_slice(2, 1, &[c(s, 0.0), c(0.0, s)]).unwrap(),
            ComplexMatrix::from_real_rows(2, 1, &[1.0, 0.0]).unwrap(),
        ] {
            let q = build_unitary_perplectic(&v).unwrap();
            let r = InnerProduct::perplectic(1).unwrap();
            let rep = classify(&q, &r, &tol()).unwrap();
            assert!(rep.unitary.holds && rep.automorphism.holds);
            // centrosymmetric
            assert!(rel_residual(&(&q * r.matrix()), &(r.matrix() * &q)).unwrap() < 1e-14);
        }
        let bad = ComplexMatrix::from_real_rows(2, 1, &[2.0, 0.0]).unwrap();
        assert!(matches!(build_unitary_perplectic(&bad), Err(Error::NotLagrangianFrame { .. })));
    }
}
