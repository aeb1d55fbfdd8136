//! Indefinite inner products `[x, y] = x^H B y`.
//!
//! Covers form construction (`J_2n`, `R_2n`, identity or a custom
//! nonsingular (skew-)Hermitian `B`), adjoints `A⋆ = B⁻¹ A^H B`, Gram
//! matrices, neutrality and nondegeneracy tests, Sylvester inertia and
//! congruence transformations.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, inverse, rel_residual, ComplexMatrix};
use crate::tolerance::TolerancePolicy;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Hermitian,
    SkewHermitian,
}

impl FormKind {
    /// `+1` for Hermitian, `-1` for skew-Hermitian: `B^H = sign · B`.
    fn sign(self) -> f64 {
        match self {
            FormKind::Hermitian => 1.0,
            FormKind::SkewHermitian => -1.0,
        }
    }
}

/// Which inner product a form is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormTag {
    /// `I_m` on `C^m`.
    Euclidean(usize),
    /// `J_2n = [[0, I_n], [-I_n, 0]]`.
    SymplecticJ(usize),
    /// `R_2n`, the `2n × 2n` anti-identity.
    PerplecticR(usize),
    Custom,
}

impl fmt::Display for FormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormTag::Euclidean(m) => write!(f, "euclidean({m})"),
            FormTag::SymplecticJ(n) => write!(f, "symplectic({n})"),
            FormTag::PerplecticR(n) => write!(f, "perplectic({n})"),
            FormTag::Custom => write!(f, "custom"),
        }
    }
}

/// A nondegenerate (skew-)Hermitian sesquilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    matrix: ComplexMatrix,
    inverse: ComplexMatrix,
    kind: FormKind,
    tag: FormTag,
}

impl InnerProduct {
    /// Builds one of the standard forms with exact `0/±1` entries.
    pub fn new(tag: FormTag) -> Result<Self> {
        make_form(tag)
    }

    pub fn symplectic(n: usize) -> Result<Self> {
        make_form(FormTag::SymplecticJ(n))
    }

    pub fn perplectic(n: usize) -> Result<Self> {
        make_form(FormTag::PerplecticR(n))
    }

    pub fn euclidean(m: usize) -> Result<Self> {
        make_form(FormTag::Euclidean(m))
    }

    /// Wraps an arbitrary nonsingular `B` whose symmetry matches `kind`.
    pub fn custom(b: ComplexMatrix, kind: FormKind, tol: &TolerancePolicy) -> Result<Self> {
        if !b.is_square() || b.nrows() == 0 {
            return Err(Error::InvalidSize(format!("form matrix must be square and nonempty, got {}x{}", b.nrows(), b.ncols())));
        }
        let residual = symmetry_residual(&b, kind);
        if residual > tol.structure_tol {
            return Err(Error::NotStructured {
                structure: kind_name(kind).into(),
                residual,
            });
        }
        if b.numerical_rank(tol.rank_tol) < b.nrows() {
            return Err(Error::SingularMatrix);
        }
        let inverse = inverse(&b, tol)?;
        Ok(Self {
            matrix: b,
            inverse,
            kind,
            tag: FormTag::Custom,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn tag(&self) -> FormTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `n` for the `2n`-dimensional symplectic and perplectic forms.
    pub fn half_dim(&self) -> Option<usize> {
        match self.tag {
            FormTag::SymplecticJ(n) | FormTag::PerplecticR(n) => Some(n),
            _ => None,
        }
    }

    /// Like [`half_dim`](Self::half_dim) but an error for other forms.
    pub fn require_structured(&self) -> Result<usize> {
        self.half_dim()
            .ok_or_else(|| Error::UnsupportedForm(self.tag.to_string()))
    }

    /// `[x, y] = x^H B y` for column vectors.
    pub fn apply(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
        (&(&x.herm_transpose() * &self.matrix) * y)[(0, 0)]
    }
}

fn kind_name(kind: FormKind) -> &'static str {
    match kind {
        FormKind::Hermitian => "hermitian",
        FormKind::SkewHermitian => "skew-hermitian",
    }
}

fn symmetry_residual(h: &ComplexMatrix, kind: FormKind) -> f64 {
    let target = h.herm_transpose().scale(Complex64::new(kind.sign(), 0.0));
    rel_residual(h, &target).expect("square matrix")
}

/// Standard form for `tag`: `J_2n` (skew-Hermitian), `R_2n` or `I_m`
/// (Hermitian).
pub fn make_form(tag: FormTag) -> Result<InnerProduct> {
    let (matrix, inverse, kind) = match tag {
        FormTag::Euclidean(m) => {
            if m == 0 {
                return Err(Error::InvalidSize("euclidean form needs m >= 1".into()));
            }
            (ComplexMatrix::identity(m), ComplexMatrix::identity(m), FormKind::Hermitian)
        }
        FormTag::SymplecticJ(n) => {
            if n == 0 {
                return Err(Error::InvalidSize("symplectic form needs n >= 1".into()));
            }
            let j = j_matrix(n);
            let j_inv = j.transpose();
            (j, j_inv, FormKind::SkewHermitian)
        }
        FormTag::PerplecticR(n) => {
            if n == 0 {
                return Err(Error::InvalidSize("perplectic form needs n >= 1".into()));
            }
            let r = anti_identity(2 * n);
            (r.clone(), r, FormKind::Hermitian)
        }
        FormTag::Custom => {
            return Err(Error::InvalidSize("custom forms are built with InnerProduct::custom".into()))
        }
    };
    Ok(InnerProduct {
        matrix,
        inverse,
        kind,
        tag,
    })
}

/// `J_2n = [[0, I_n], [-I_n, 0]]`.
pub fn j_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j == i + n {
            Complex64::new(1.0, 0.0)
        } else if i >= n && j + n == i {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The `m × m` flip matrix (ones on the anti-diagonal).
pub fn anti_identity(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |i, j| {
        if i + j + 1 == m {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn check_square_match(a: &ComplexMatrix, form: &InnerProduct) -> Result<()> {
    if !a.is_square() || a.nrows() != form.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix against a form of dimension {}",
            a.nrows(),
            a.ncols(),
            form.dim()
        )));
    }
    Ok(())
}

/// `A⋆ = B⁻¹ A^H B`, the unique matrix with `[Ax, y] = [x, A⋆y]`.
pub fn adjoint(a: &ComplexMatrix, form: &InnerProduct) -> Result<ComplexMatrix> {
    check_square_match(a, form)?;
    Ok(&(&form.inverse * &a.herm_transpose()) * &form.matrix)
}

/// `V^H B V`.
pub fn gram(v: &ComplexMatrix, form: &InnerProduct) -> Result<ComplexMatrix> {
    if v.nrows() != form.dim() {
        return Err(Error::DimensionMismatch(format!(
            "frame has {} rows, form dimension is {}",
            v.nrows(),
            form.dim()
        )));
    }
    Ok(&(&v.herm_transpose() * &form.matrix) * v)
}

fn require_full_column_rank(v: &ComplexMatrix, tol: &TolerancePolicy) -> Result<()> {
    if v.ncols() > 0 && v.numerical_rank(tol.rank_tol) < v.ncols() {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

/// Scale-free size of the Gram matrix: `‖V^H B V‖_F / max(1, ‖V‖_F² ‖B‖_F)`.
pub fn neutrality_residual(v: &ComplexMatrix, form: &InnerProduct) -> Result<f64> {
    let g = gram(v, form)?;
    let scale = (v.frobenius_norm().powi(2) * form.matrix.frobenius_norm()).max(1.0);
    Ok(g.frobenius_norm() / scale)
}

/// Whether `span(V)` is neutral: its Gram matrix vanishes.
pub fn is_neutral(v: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<bool> {
    require_full_column_rank(v, tol)?;
    Ok(neutrality_residual(v, form)? <= tol.structure_tol)
}

/// Whether `span(V)` is nondegenerate: its Gram matrix has full rank.
pub fn is_nondegenerate(v: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<bool> {
    require_full_column_rank(v, tol)?;
    let g = gram(v, form)?;
    Ok(g.numerical_rank(tol.rank_tol) == v.ncols())
}

/// Unit of the canonical Sylvester form: `1` for Hermitian, `i` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InertiaUnit {
    One,
    I,
}

/// Sylvester inertia `(p, q, r)`: negative, positive and zero counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub alpha: InertiaUnit,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.p + self.q + self.r
    }

    /// Equally many negative and positive values, no zeros.
    pub fn is_balanced(&self) -> bool {
        self.p == self.q && self.r == 0
    }

    fn same_counts(&self, other: &Inertia) -> bool {
        (self.p, self.q, self.r) == (other.p, other.q, other.r)
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.q, self.r)
    }
}

/// Hermitian matrix carrying the inertia of `h`: `h` itself or `-i h`.
fn hermitian_part(h: &ComplexMatrix, kind: FormKind, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("inertia of a {}x{} matrix", h.nrows(), h.ncols())));
    }
    let residual = symmetry_residual(h, kind);
    if residual > tol.structure_tol {
        return Err(Error::NotStructured {
            structure: kind_name(kind).into(),
            residual,
        });
    }
    Ok(match kind {
        FormKind::Hermitian => h.clone(),
        FormKind::SkewHermitian => h.scale(-I),
    })
}

fn unit(kind: FormKind) -> InertiaUnit {
    match kind {
        FormKind::Hermitian => InertiaUnit::One,
        FormKind::SkewHermitian => InertiaUnit::I,
    }
}

/// Inertia of a Hermitian or skew-Hermitian matrix. Eigenvalues with modulus
/// at most `class_tol · ‖H‖_F` count as zero.
pub fn inertia(h: &ComplexMatrix, kind: FormKind, tol: &TolerancePolicy) -> Result<Inertia> {
    let herm = hermitian_part(h, kind, tol)?;
    let (values, _) = hermitian_eigen(&herm);
    Ok(count_inertia(&values, tol.class_tol * h.frobenius_norm(), kind))
}

fn count_inertia(values: &[f64], zero_threshold: f64, kind: FormKind) -> Inertia {
    let mut inertia = Inertia {
        p: 0,
        q: 0,
        r: 0,
        alpha: unit(kind),
    };
    for &v in values {
        if v.abs() <= zero_threshold {
            inertia.r += 1;
        } else if v < 0.0 {
            inertia.p += 1;
        } else {
            inertia.q += 1;
        }
    }
    inertia
}

/// Nonsingular `U` with `U^H H U = diag(-α I_p, α I_q, 0_r)`.
pub fn sylvester_canonical(h: &ComplexMatrix, kind: FormKind, tol: &TolerancePolicy) -> Result<(ComplexMatrix, Inertia)> {
    let herm = hermitian_part(h, kind, tol)?;
    let (values, vectors) = hermitian_eigen(&herm);
    let threshold = tol.class_tol * h.frobenius_norm();
    let inertia = count_inertia(&values, threshold, kind);

    // negatives (ascending), positives (ascending), zeros
    let mut order: Vec<usize> = (0..values.len()).filter(|&k| values[k] < -threshold).collect();
    order.extend((0..values.len()).filter(|&k| values[k] > threshold));
    order.extend((0..values.len()).filter(|&k| values[k].abs() <= threshold));

    let mut u = vectors.select_columns(&order);
    for (c, &k) in order.iter().enumerate() {
        if values[k].abs() > threshold {
            let column = u.column(c).scale(Complex64::new(1.0 / values[k].abs().sqrt(), 0.0));
            u.set_column(c, &column);
        }
    }
    Ok((u, inertia))
}

/// `diag(-α I_p, α I_q, 0_r)`.
pub fn canonical_inertia_matrix(inertia: &Inertia) -> ComplexMatrix {
    let alpha = match inertia.alpha {
        InertiaUnit::One => Complex64::new(1.0, 0.0),
        InertiaUnit::I => I,
    };
    let mut d = vec![-alpha; inertia.p];
    d.extend(std::iter::repeat_n(alpha, inertia.q));
    d.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), inertia.r));
    ComplexMatrix::from_diagonal(&d)
}

/// Nonsingular `S` with `S^H H S = C`, for `H` and `C` of equal kind and inertia.
pub fn congruence_to(h: &ComplexMatrix, c: &ComplexMatrix, kind: FormKind, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    if h.nrows() != c.nrows() || !h.is_square() || !c.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "congruence between {}x{} and {}x{}",
            h.nrows(),
            h.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    let (u_h, inertia_h) = sylvester_canonical(h, kind, tol)?;
    let (u_c, inertia_c) = sylvester_canonical(c, kind, tol)?;
    if !inertia_h.same_counts(&inertia_c) {
        return Err(Error::InertiaMismatch {
            left: inertia_h,
            right: inertia_c,
        });
    }
    // Both canonical forms use the same block order, so S = U_H U_C^{-1}.
    let u_c_inv = inverse(&u_c, tol).map_err(|_| Error::NumericalBreakdown("singular congruence factor".into()))?;
    Ok(&u_h * &u_c_inv)
}
