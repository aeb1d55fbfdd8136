//! Structure-preserving diagonalization for matrices that are selfadjoint or
//! skewadjoint with respect to the symplectic form `x^H J y` or the perplectic
//! form `x^H R y`.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: dense complex matrices, linear solves, orthonormalization.
//! * [`forms`]: indefinite inner products, adjoints, Gram matrices, inertia.
//! * [`structure`]: classification against the Hamiltonian/per-Hermitian
//!   family and unitary-symplectic/perplectic frame builders.
//! * [`spectral`]: complex Schur/eigen decomposition, eigenvalue grouping.
//! * [`diag`]: diagonalizability decisions, symplectic/perplectic
//!   diagonalization, unitary refinement and Lagrangian completion.
//! * [`decomposition`]: the additive decomposition `A = N ± N⋆` and the
//!   structured exponential and roots built on it.
//! * [`generators`]: seeded constructors for test and benchmark instances.

// `!(r <= tol)` is deliberate: a NaN residual must fail the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod diag;
mod error;
pub mod forms;
pub mod generators;
pub mod matrix;
pub mod spectral;
pub mod structure;
mod tolerance;

pub use decomposition::{
    decompose_additive, reconstruct_from_n, split_normal, structured_exp, structured_root,
    verify_decomposition, AdditiveDecomposition, DecompositionResiduals, Sign, VerificationReport,
};
pub use diag::{
    canonical_diagonal, complete_to_lagrangian, diagonalizability_report, structured_diagonalize,
    unitary_refine, DiagonalizabilityReport, EigenvalueBalance, StructuredDiagonalization, Variant,
};
pub use error::{Error, Result};
pub use forms::{FormKind, FormTag, Inertia, InertiaUnit, InnerProduct};
pub use matrix::{herm_transpose, orthonormalize_columns, rel_residual, solve_linear, ComplexMatrix};
pub use num_complex::Complex64;
pub use spectral::{AxisClass, EigenDecomposition, EigenGroup};
pub use structure::{classify, Structure, StructureReport};
pub use tolerance::TolerancePolicy;
