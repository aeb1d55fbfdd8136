//! Unstructured eigenvalue machinery: complex Schur form by Hessenberg
//! reduction and single-shift QR, eigenspaces, clustering of numerically
//! equal eigenvalues, conjugate pairing and diagonalizability tests.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{orthonormal_basis, ComplexMatrix};
use crate::tolerance::TolerancePolicy;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where an eigenvalue sits relative to the real and imaginary axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisClass {
    Real,
    PurelyImaginary,
    /// On both axes: numerically zero.
    Both,
    Generic,
}

impl AxisClass {
    pub fn of(value: Complex64, class_tol: f64) -> Self {
        let threshold = class_tol * (1.0 + value.norm());
        match (value.im.abs() <= threshold, value.re.abs() <= threshold) {
            (true, true) => AxisClass::Both,
            (true, false) => AxisClass::Real,
            (false, true) => AxisClass::PurelyImaginary,
            (false, false) => AxisClass::Generic,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, AxisClass::Real | AxisClass::Both)
    }

    pub fn is_imaginary(self) -> bool {
        matches!(self, AxisClass::PurelyImaginary | AxisClass::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisClass::Real => "real",
            AxisClass::PurelyImaginary => "purely-imaginary",
            AxisClass::Both => "zero",
            AxisClass::Generic => "generic",
        }
    }
}

/// Eigenvalues with unit-norm eigenvector columns aligned to them.
///
/// For a defective eigenvalue the eigenspace has fewer dimensions than the
/// algebraic multiplicity; its columns then repeat eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// A cluster of numerically equal eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenGroup {
    /// Mean of the member eigenvalues.
    pub value: Complex64,
    /// Algebraic multiplicity (number of members).
    pub multiplicity: usize,
    /// Orthonormal basis of the numerical eigenspace.
    pub basis: ComplexMatrix,
    pub axis_class: AxisClass,
}

impl EigenGroup {
    pub fn geometric_multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Complex Schur form `A = Z T Z^H` with `T` upper triangular, `Z` unitary.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }
}

/// Lexicographic `(Re, Im)` order used for every deterministic sort.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn check_square(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `[[c, s], [-conj(s), c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn zeroing(x: Complex64, y: Complex64) -> Self {
        let ax = x.norm();
        let norm = ax.hypot(y.norm());
        if norm == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Self {
                c: 0.0,
                s: Complex64::new(1.0, 0.0),
            };
        }
        Self {
            c: ax / norm,
            s: (x / ax) * y.conj() / norm,
        }
    }

    /// Rows `i`, `j` of `m`, columns `cols`: `m ← G m`.
    fn apply_left(&self, m: &mut ComplexMatrix, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for col in cols {
            let a = m[(i, col)];
            let b = m[(j, col)];
            m[(i, col)] = a * self.c + self.s * b;
            m[(j, col)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `i`, `j` of `m`, rows `rows`: `m ← m G^H`.
    fn apply_right(&self, m: &mut ComplexMatrix, i: usize, j: usize, rows: std::ops::Range<usize>) {
        for row in rows {
            let a = m[(row, i)];
            let b = m[(row, j)];
            m[(row, i)] = a * self.c + b * self.s.conj();
            m[(row, j)] = -a * self.s + b * self.c;
        }
    }
}

/// Householder reduction to upper Hessenberg form; returns `(H, Q)` with
/// `A = Q H Q^H`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let m = a.nrows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(m);
    for k in 0..m.saturating_sub(2) {
        let len = m - k - 1;
        let mut u: Vec<Complex64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = u[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if u[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            u[0] / u[0].norm()
        };
        u[0] += phase * norm;
        let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / unorm2;
        // P = I - beta u u^H acting on rows/cols k+1..m
        for col in 0..m {
            let mut s = ZERO;
            for i in 0..len {
                s += u[i].conj() * h[(k + 1 + i, col)];
            }
            s *= beta;
            for i in 0..len {
                h[(k + 1 + i, col)] -= u[i] * s;
            }
        }
        for row in 0..m {
            let mut s = ZERO;
            for i in 0..len {
                s += h[(row, k + 1 + i)] * u[i];
            }
            s *= beta;
            for i in 0..len {
                h[(row, k + 1 + i)] -= s * u[i].conj();
            }
        }
        for row in 0..m {
            let mut s = ZERO;
            for i in 0..len {
                s += q[(row, k + 1 + i)] * u[i];
            }
            s *= beta;
            for i in 0..len {
                q[(row, k + 1 + i)] -= s * u[i].conj();
            }
        }
        for i in (k + 2)..m {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition.
///
/// Fails with [`Error::NoConvergence`] after `1000 · m` QR sweeps.
pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    check_square(a)?;
    let m = a.nrows();
    let (mut t, mut z) = hessenberg(a);
    if m <= 1 {
        return Ok(Schur { t, z });
    }
    let ulp = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE * (m as f64 / ulp);
    let max_sweeps = 1000 * m;
    let mut sweeps = 0usize;
    let mut hi = m - 1;
    let mut its = 0usize;

    loop {
        // deflation scan upward from `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(t[(lo, lo - 1)]);
            if sub <= safe_min {
                break;
            }
            let mut tst = abs1(t[(lo - 1, lo - 1)]) + abs1(t[(lo, lo)]);
            if tst == 0.0 {
                if lo >= 2 {
                    tst += t[(lo - 1, lo - 2)].re.abs();
                }
                if lo + 1 < m {
                    tst += t[(lo + 1, lo)].re.abs();
                }
            }
            if sub <= ulp * tst {
                break;
            }
            lo -= 1;
        }
        if lo > 0 {
            t[(lo, lo - 1)] = ZERO;
        }
        if lo == hi {
            if hi == 0 {
                break;
            }
            hi -= 1;
            its = 0;
            continue;
        }
        if hi == 0 {
            break;
        }

        sweeps += 1;
        its += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps });
        }

        let shift = if its % 20 == 10 {
            t[(lo, lo)] + 0.75 * t[(lo + 1, lo)].re.abs()
        } else if its.is_multiple_of(20) {
            t[(hi, hi)] + 0.75 * t[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        // implicit single-shift sweep on the active block lo..=hi
        for k in lo..hi {
            let g = if k == lo {
                Givens::zeroing(t[(lo, lo)] - shift, t[(lo + 1, lo)])
            } else {
                Givens::zeroing(t[(k, k - 1)], t[(k + 1, k - 1)])
            };
            let first_col = if k == lo { lo } else { k - 1 };
            g.apply_left(&mut t, k, k + 1, first_col..m);
            if k > lo {
                t[(k + 1, k - 1)] = ZERO;
            }
            let last_row = (k + 2).min(hi) + 1;
            g.apply_right(&mut t, k, k + 1, 0..last_row);
            g.apply_right(&mut z, k, k + 1, 0..m);
        }
    }

    for j in 0..m {
        for i in (j + 1)..m {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, z })
}

/// Single-linkage clusters of `values` with the given radius, each sorted by
/// index; clusters ordered by ascending `(Re, Im)` of their means.
fn cluster(values: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let k = values.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if (values[i] - values[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[root_slot[r]].push(i);
    }
    clusters.sort_by(|a, b| cmp_complex(&mean(values, a), &mean(values, b)));
    clusters
}

fn mean(values: &[Complex64], members: &[usize]) -> Complex64 {
    members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64
}

fn cluster_radius(values: &[Complex64], tol: &TolerancePolicy) -> f64 {
    let largest = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    tol.cluster_tol * largest.max(1.0)
}

/// Eigendecomposition with the default tolerance policy.
pub fn eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    eigen_with_tol(a, &TolerancePolicy::default())
}

/// Eigenvalues from the Schur form; eigenvectors per eigenvalue cluster from
/// the right singular vectors of `A − μI` for the cluster mean `μ`.
pub fn eigen_with_tol(a: &ComplexMatrix, tol: &TolerancePolicy) -> Result<EigenDecomposition> {
    let m = a.nrows();
    let values = schur(a)?.eigenvalues();
    if m == 0 {
        return Ok(EigenDecomposition {
            values,
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let radius = cluster_radius(&values, tol);
    let norm = a.spectral_norm();
    let mut out_values = Vec::with_capacity(m);
    let mut vectors = ComplexMatrix::zeros(m, m);
    let mut col = 0;
    for members in cluster(&values, radius) {
        let k = members.len();
        let mu = mean(&values, &members);
        let shifted = a - &ComplexMatrix::identity(m).scale(mu);
        let (sv, basis) = shifted.smallest_right_singular_vectors(k);
        let threshold = (tol.rank_tol * norm).max((k + 1) as f64 * radius);
        let g = sv.iter().filter(|&&s| s <= threshold).count().clamp(1, k);
        for (slot, &i) in members.iter().enumerate() {
            out_values.push(values[i]);
            vectors.set_column(col, &basis.column(slot.min(g - 1)));
            col += 1;
        }
    }
    Ok(EigenDecomposition {
        values: out_values,
        vectors,
    })
}

/// Merges numerically equal eigenvalues (single linkage, radius
/// `cluster_tol · max(1, ‖values‖∞)`), sorted by ascending `(Re, Im)`.
pub fn group_eigenvalues(dec: &EigenDecomposition, tol: &TolerancePolicy) -> Vec<EigenGroup> {
    let radius = cluster_radius(&dec.values, tol);
    cluster(&dec.values, radius)
        .into_iter()
        .map(|members| {
            let value = mean(&dec.values, &members);
            let basis = orthonormal_basis(&dec.vectors.select_columns(&members), &TolerancePolicy {
                rank_tol: tol.rank_tol.max(1e-8),
                ..*tol
            });
            EigenGroup {
                value,
                multiplicity: members.len(),
                basis,
                axis_class: AxisClass::of(value, tol.class_tol),
            }
        })
        .collect()
}

/// Groups split into conjugate pairs and self-conjugate singletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// `(λ, conj λ)` group indices; the first has the smaller `(Re, Im)`.
    pub pairs: Vec<(usize, usize)>,
    /// Groups on the real axis.
    pub singletons: Vec<usize>,
}

/// Pairs each non-real group with the group at its conjugate.
pub fn pair_conjugates(groups: &[EigenGroup], tol: &TolerancePolicy) -> Result<Pairing> {
    let values: Vec<Complex64> = groups.iter().map(|g| g.value).collect();
    let match_radius = 2.0 * cluster_radius(&values, tol);
    let mut used = vec![false; groups.len()];
    let mut pairs = Vec::new();
    let mut singletons = Vec::new();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| cmp_complex(&values[a], &values[b]));
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        if groups[i].axis_class.is_real() {
            singletons.push(i);
            continue;
        }
        let target = values[i].conj();
        let partner = order
            .iter()
            .copied()
            .filter(|&j| !used[j] && (values[j] - target).norm() <= match_radius)
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        let Some(j) = partner else {
            return Err(Error::SpectrumNotConjugateSymmetric(format!(
                "no partner for eigenvalue {}",
                fmt_complex(values[i])
            )));
        };
        if groups[i].multiplicity != groups[j].multiplicity {
            return Err(Error::SpectrumNotConjugateSymmetric(format!(
                "eigenvalue {} has multiplicity {} but its conjugate has {}",
                fmt_complex(values[i]),
                groups[i].multiplicity,
                groups[j].multiplicity
            )));
        }
        used[j] = true;
        pairs.push((i, j));
    }
    Ok(Pairing { pairs, singletons })
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{:.6}-{:.6}i", z.re, -z.im)
    } else {
        format!("{:.6}+{:.6}i", z.re, z.im)
    }
}

/// Geometric equals algebraic multiplicity for every eigenvalue group.
pub fn is_diagonalizable(a: &ComplexMatrix, tol: &TolerancePolicy) -> Result<bool> {
    let dec = eigen_with_tol(a, tol)?;
    Ok(diagonalizable_groups(a, &group_eigenvalues(&dec, tol), tol))
}

pub(crate) fn diagonalizable_groups(a: &ComplexMatrix, groups: &[EigenGroup], tol: &TolerancePolicy) -> bool {
    let m = a.nrows();
    // rank relative to ‖A‖, not to ‖A − λI‖, which is pure noise for A ≈ λI
    let threshold = tol.rank_tol.max(tol.cluster_tol) * a.spectral_norm();
    groups.iter().all(|g| {
        let shifted = a - &ComplexMatrix::identity(m).scale(g.value);
        let rank = shifted.singular_values().iter().filter(|&&s| s > threshold).count();
        rank + g.multiplicity == m && g.basis.ncols() == g.multiplicity
    })
}
