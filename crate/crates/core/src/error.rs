use thiserror::Error;

use crate::diag::DiagonalizabilityReport;
use crate::forms::Inertia;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("columns are numerically linearly dependent")]
    RankDeficient,

    #[error("columns are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("matrix is not {structure} (residual {residual:.3e})")]
    NotStructured { structure: String, residual: f64 },

    #[error("operation needs the symplectic or perplectic form, got {0}")]
    UnsupportedForm(String),

    #[error("inertia mismatch: {left} vs {right}")]
    InertiaMismatch { left: Inertia, right: Inertia },

    #[error("not an orthonormal Lagrangian frame: {condition} residual {residual:.3e}")]
    NotLagrangianFrame { condition: String, residual: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("spectrum is not symmetric under conjugation: {0}")]
    SpectrumNotConjugateSymmetric(String),

    #[error("matrix is not diagonalizable")]
    NotDiagonalizable,

    #[error("matrix is not structure-diagonalizable: {}", .0.reason)]
    NotStructuredDiagonalizable(Box<DiagonalizabilityReport>),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("matrix is not normal (residual {residual:.3e})")]
    NotNormal { residual: f64 },

    #[error("frame does not span a neutral subspace (residual {residual:.3e})")]
    NotNeutral { residual: f64 },

    #[error("neutral frame has {columns} columns, at most {max} are possible")]
    FrameTooLarge { columns: usize, max: usize },

    #[error("factor does not annihilate its adjoint (|NN*| {left:.3e}, |N*N| {right:.3e})")]
    NotAnnihilating { left: f64, right: f64 },

    #[error("range of the factor is not neutral (residual {residual:.3e})")]
    NotNeutralRange { residual: f64 },

    #[error("matrix is singular; roots need a nonsingular input")]
    SingularInput,
}

impl Error {
    /// True for outcomes that are mathematical answers ("this matrix does not
    /// have the property") rather than bad input or numerical failure.
    pub fn is_negative_result(&self) -> bool {
        matches!(
            self,
            Error::NotStructured { .. }
                | Error::InertiaMismatch { .. }
                | Error::NotLagrangianFrame { .. }
                | Error::SpectrumNotConjugateSymmetric(_)
                | Error::NotDiagonalizable
                | Error::NotStructuredDiagonalizable(_)
                | Error::NotNormal { .. }
                | Error::NotNeutral { .. }
                | Error::FrameTooLarge { .. }
                | Error::NotAnnihilating { .. }
                | Error::NotNeutralRange { .. }
                | Error::SingularInput
                | Error::UnsupportedForm(_)
        )
    }

    /// True for failures of the numerics themselves.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::NumericalBreakdown(_) | Error::SingularMatrix
        )
    }
}
