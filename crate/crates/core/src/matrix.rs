//! Dense complex matrices and the small amount of numerical linear algebra
//! every other module needs: products, norms, LU solves, orthonormalization,
//! singular values and Hermitian eigendecompositions.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::TolerancePolicy;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix.
///
/// All entries are finite; constructors that accept external data check this.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Real entries listed row by row.
    pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_slice(rows, cols, &entries)
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(Self(inner))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    /// Stacks matrices with equal row counts side by side.
    pub fn hstack(blocks: &[&ComplexMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.nrows());
        if blocks.iter().any(|b| b.nrows() != rows) {
            return Err(Error::DimensionMismatch("hstack with unequal row counts".into()));
        }
        let cols = blocks.iter().map(|b| b.ncols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.columns_mut(offset, b.ncols()).copy_from(&b.0);
            offset += b.ncols();
        }
        Ok(Self(out))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn herm_transpose(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Self {
        Self(self.0.columns(j, 1).into_owned())
    }

    /// `count` consecutive columns starting at `start`.
    pub fn columns(&self, start: usize, count: usize) -> Self {
        Self(self.0.columns(start, count).into_owned())
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self(self.0.select_columns(indices))
    }

    pub fn block(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        Self(self.0.view((row, col), (nrows, ncols)).into_owned())
    }

    pub fn set_column(&mut self, j: usize, column: &ComplexMatrix) {
        self.0.set_column(j, &column.0.column(0));
    }

    /// Euclidean inner product `x^H y` of two column vectors.
    pub fn dot_columns(&self, i: usize, other: &ComplexMatrix, j: usize) -> Complex64 {
        self.0.column(i).dotc(&other.0.column(j))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.nrows() == 0 || self.ncols() == 0 {
            return Vec::new();
        }
        let mut sv: Vec<f64> = SVD::new(self.0.clone(), false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Numerical rank: singular values above `rank_tol` times the largest.
    pub fn numerical_rank(&self, rank_tol: f64) -> usize {
        let sv = self.singular_values();
        let Some(&largest) = sv.first() else { return 0 };
        if largest == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rank_tol * largest).count()
    }

    /// Right singular vectors belonging to the `count` smallest singular
    /// values, together with those singular values (ascending). Intended for
    /// square or tall matrices.
    pub fn smallest_right_singular_vectors(&self, count: usize) -> (Vec<f64>, ComplexMatrix) {
        let n = self.ncols();
        let svd = SVD::new(self.0.clone(), false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
        let count = count.min(order.len());
        let mut vectors = DMatrix::zeros(n, count);
        for (c, &k) in order.iter().take(count).enumerate() {
            vectors.set_column(c, &v_t.row(k).adjoint());
        }
        (values[..count].to_vec(), Self(vectors))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.nrows(), self.ncols())?;
        for i in 0..self.nrows() {
            write!(f, "  ")?;
            for j in 0..self.ncols() {
                let z = self.0[(i, j)];
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "matrix product dimension mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// Conjugate transpose `A^H`.
pub fn herm_transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.herm_transpose()
}

/// `‖A − B‖_F / max(1, ‖A‖_F)`.
pub fn rel_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok((a - b).frobenius_norm() / a.frobenius_norm().max(1.0))
}

/// Solves `A X = B` by LU factorization with partial pivoting.
///
/// A pivot below `rank_tol · max|A_ij|` is reported as [`Error::SingularMatrix`].
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {}",
            b.nrows(),
            a.nrows()
        )));
    }
    let n = a.nrows();
    let mut lu = a.0.clone();
    let mut x = b.0.clone();
    let threshold = tol.rank_tol * a.max_abs();
    if n > 0 && a.max_abs() == 0.0 {
        return Err(Error::SingularMatrix);
    }

    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            return Err(Error::SingularMatrix);
        }
        if pivot_row != k {
            lu.swap_rows(k, pivot_row);
            x.swap_rows(k, pivot_row);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            if factor == ZERO {
                continue;
            }
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= factor * u;
            }
            for j in 0..x.ncols() {
                let u = x[(k, j)];
                x[(i, j)] -= factor * u;
            }
        }
    }
    // back substitution on the upper factor
    for j in 0..x.ncols() {
        for k in (0..n).rev() {
            let mut s = x[(k, j)];
            for l in (k + 1)..n {
                s -= lu[(k, l)] * x[(l, j)];
            }
            x[(k, j)] = s / lu[(k, k)];
        }
    }
    ComplexMatrix::from_dmatrix(x).map_err(|_| Error::SingularMatrix)
}

/// `A^{-1}` via [`solve_linear`].
pub fn inverse(a: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    solve_linear(a, &ComplexMatrix::identity(a.nrows()), tol)
}

/// Orthonormal basis of the column span of `v`, one output column per input
/// column, computed by Gram–Schmidt with one full re-orthogonalization pass.
pub fn orthonormalize_columns(v: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    let (w, kept) = gram_schmidt(v, tol.rank_tol);
    if kept.len() < v.ncols() {
        return Err(Error::RankDeficient);
    }
    Ok(w)
}

/// Like [`orthonormalize_columns`] but silently drops columns that are
/// numerically dependent on earlier ones.
pub fn orthonormal_basis(v: &ComplexMatrix, tol: &TolerancePolicy) -> ComplexMatrix {
    gram_schmidt(v, tol.rank_tol).0
}

fn gram_schmidt(v: &ComplexMatrix, rank_tol: f64) -> (ComplexMatrix, Vec<usize>) {
    let m = v.nrows();
    let scale = (0..v.ncols())
        .map(|j| v.0.column(j).norm())
        .fold(0.0_f64, f64::max);
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    let mut kept = Vec::new();
    for j in 0..v.ncols() {
        let mut x = v.0.column(j).into_owned();
        let original = x.norm();
        for _ in 0..2 {
            for q in &basis {
                let coeff = q.dotc(&x);
                x.axpy(-coeff, q, ONE);
            }
        }
        let norm = x.norm();
        if norm == 0.0 || norm <= rank_tol.max(f64::EPSILON * 16.0) * original.max(scale) {
            continue;
        }
        x.unscale_mut(norm);
        basis.push(x);
        kept.push(j);
    }
    let mut out = DMatrix::zeros(m, basis.len());
    for (c, q) in basis.iter().enumerate() {
        out.set_column(c, q);
    }
    (ComplexMatrix(out), kept)
}

/// Eigendecomposition of a Hermitian matrix (symmetrized first): eigenvalues
/// ascending with matching orthonormal eigenvector columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), ComplexMatrix::zeros(0, 0));
    }
    let sym = (&h.0 + h.0.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, ComplexMatrix(vectors))
}
