//! Symplectic and perplectic diagonalization of selfadjoint and skewadjoint
//! matrices.
//!
//! A diagonalizable matrix `A` that is selfadjoint or skewadjoint with
//! respect to `J_2n` or `R_2n` can be diagonalized by an automorphism of the
//! form iff every eigenvalue on the critical axis (real for selfadjoint,
//! purely imaginary for skewadjoint, zero for both) has an eigenspace whose
//! Gram matrix has equally many positive and negative eigenvalues. The
//! construction here follows the constructive proof: conjugate eigenvalue
//! pairs are normalized against each other, critical eigenspaces are brought
//! to a canonical balanced Gram by congruence, and the pieces are routed into
//! the positions of `B`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{congruence_to, gram, inertia, j_matrix, FormKind, FormTag, Inertia, InnerProduct};
use crate::matrix::{hermitian_eigen, orthonormalize_columns, rel_residual, solve_linear, ComplexMatrix};
use crate::spectral::{
    cmp_complex, diagonalizable_groups, eigen_with_tol, fmt_complex, group_eigenvalues, pair_conjugates, AxisClass,
    EigenGroup,
};
use crate::structure::{build_unitary_automorphism, classify, hermitian_projection};
use crate::tolerance::TolerancePolicy;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Guaranteed bound on every residual of a returned diagonalization.
pub const OUTPUT_TOL: f64 = 1e-8;

/// Bound on the orthonormality and neutrality of completed Lagrangian frames.
pub const FRAME_OUTPUT_TOL: f64 = 1e-9;

/// Whether `A⋆ = A` or `A⋆ = −A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Selfadjoint,
    Skewadjoint,
}

impl Variant {
    /// `+1` for selfadjoint, `−1` for skewadjoint.
    pub fn sign(self) -> f64 {
        match self {
            Variant::Selfadjoint => 1.0,
            Variant::Skewadjoint => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Selfadjoint => "selfadjoint",
            Variant::Skewadjoint => "skewadjoint",
        }
    }
}

/// Balance data for one critical-axis eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueBalance {
    pub value: Complex64,
    pub axis_class: AxisClass,
    pub multiplicity: usize,
    pub gram_inertia: Inertia,
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizabilityReport {
    pub decision: bool,
    pub variant: Variant,
    /// Critical-axis eigenvalues only; the others never block.
    pub per_eigenvalue: Vec<EigenvalueBalance>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct StructuredDiagonalization {
    /// The automorphism `S` with `S⁻¹ A S` diagonal.
    pub transform: ComplexMatrix,
    /// `D` in the canonical diagonal built from it.
    pub core: Vec<Complex64>,
    pub form_tag: FormTag,
    pub variant: Variant,
    pub residual_automorphism: f64,
    pub residual_similarity: f64,
    pub unitary: bool,
}

impl StructuredDiagonalization {
    /// The full `2n × 2n` diagonal.
    pub fn diagonal(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&canonical_values(&self.core, self.form_tag, self.variant))
    }
}

/// Position paired with column `j` in the `2n` layout of the form.
fn partner(tag: FormTag, n: usize, j: usize) -> usize {
    match tag {
        FormTag::PerplecticR(_) => 2 * n - 1 - j,
        _ => n + j,
    }
}

fn canonical_values(core: &[Complex64], tag: FormTag, variant: Variant) -> Vec<Complex64> {
    let n = core.len();
    let mut values = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (j, &d) in core.iter().enumerate() {
        values[j] = d;
        values[partner(tag, n, j)] = d.conj() * variant.sign();
    }
    values
}

/// `D ⊕ ±D^H` for `J`, `D ⊕ ±R_n D^H R_n` for `R`, with `+` for the
/// selfadjoint variant.
pub fn canonical_diagonal(core: &[Complex64], form: &InnerProduct, variant: Variant) -> Result<ComplexMatrix> {
    let n = form.require_structured()?;
    if core.len() != n {
        return Err(Error::DimensionMismatch(format!("core has {} entries, form needs {n}", core.len())));
    }
    Ok(ComplexMatrix::from_diagonal(&canonical_values(core, form.tag(), variant)))
}

/// Determines the variant of `a`, or fails with `NotStructured`.
pub fn variant_of(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<Variant> {
    form.require_structured()?;
    let report = classify(a, form, tol)?;
    if report.selfadjoint.holds {
        Ok(Variant::Selfadjoint)
    } else if report.skewadjoint.holds {
        Ok(Variant::Skewadjoint)
    } else {
        Err(Error::NotStructured {
            structure: "selfadjoint or skewadjoint".into(),
            residual: report.selfadjoint.residual.min(report.skewadjoint.residual),
        })
    }
}

/// Eigenstructure of the selfadjoint matrix `Â` (`A` or `iA`).
struct Analysis {
    variant: Variant,
    groups: Vec<EigenGroup>,
}

impl Analysis {
    /// Eigenvalue of `A` for an eigenvalue of `Â`.
    fn original(&self, hat: Complex64) -> Complex64 {
        match self.variant {
            Variant::Selfadjoint => hat,
            Variant::Skewadjoint => hat * -I,
        }
    }

    /// Critical-axis value of `A` snapped onto its axis exactly.
    fn snapped(&self, hat: Complex64) -> Complex64 {
        let real = Complex64::new(hat.re, 0.0);
        self.original(real)
    }
}

fn analyze(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<Analysis> {
    let variant = variant_of(a, form, tol)?;
    let a_hat = match variant {
        Variant::Selfadjoint => a.clone(),
        Variant::Skewadjoint => a.scale(I),
    };
    let dec = eigen_with_tol(&a_hat, tol)?;
    let groups = group_eigenvalues(&dec, tol);
    if !diagonalizable_groups(&a_hat, &groups, tol) {
        return Err(Error::NotDiagonalizable);
    }
    Ok(Analysis { variant, groups })
}

fn projected_gram(basis: &ComplexMatrix, form: &InnerProduct) -> Result<ComplexMatrix> {
    let g = gram(basis, form)?;
    Ok(hermitian_projection(&g, form.kind() == FormKind::SkewHermitian))
}

fn report_from(analysis: &Analysis, form: &InnerProduct, tol: &TolerancePolicy) -> Result<DiagonalizabilityReport> {
    let mut per_eigenvalue = Vec::new();
    for g in analysis.groups.iter().filter(|g| g.axis_class.is_real()) {
        let value = analysis.snapped(g.value);
        let gram_inertia = inertia(&projected_gram(&g.basis, form)?, form.kind(), tol)?;
        per_eigenvalue.push(EigenvalueBalance {
            value,
            axis_class: AxisClass::of(value, tol.class_tol),
            multiplicity: g.multiplicity,
            gram_inertia,
            balanced: gram_inertia.is_balanced(),
        });
    }
    per_eigenvalue.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    let unbalanced: Vec<String> = per_eigenvalue
        .iter()
        .filter(|e| !e.balanced)
        .map(|e| format!("eigenvalue {} has eigenspace Gram inertia {}", fmt_complex(e.value), e.gram_inertia))
        .collect();
    let decision = unbalanced.is_empty();
    let reason = if decision {
        if per_eigenvalue.is_empty() {
            "no eigenvalues on the critical axis".to_string()
        } else {
            "every critical-axis eigenvalue is balanced".to_string()
        }
    } else {
        format!("unbalanced: {}", unbalanced.join("; "))
    };
    Ok(DiagonalizabilityReport {
        decision,
        variant: analysis.variant,
        per_eigenvalue,
        reason,
    })
}

/// Balance test for every critical-axis eigenvalue of a diagonalizable
/// selfadjoint or skewadjoint `a`.
pub fn diagonalizability_report(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<DiagonalizabilityReport> {
    let analysis = analyze(a, form, tol)?;
    report_from(&analysis, form, tol)
}

/// A column of the final transform, its partner column and the eigenvalue
/// of `A` belonging to the first.
struct Slot {
    value: Complex64,
    left: ComplexMatrix,
    right: ComplexMatrix,
}

/// Balanced target Gram for a critical eigenspace of dimension `2m`.
fn critical_target(form: &InnerProduct, m: usize) -> ComplexMatrix {
    match form.kind() {
        FormKind::SkewHermitian => j_matrix(m),
        FormKind::Hermitian => ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
            if j == i + m || i == j + m {
                ONE
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
    }
}

fn pair_slots(analysis: &Analysis, lambda: &EigenGroup, conj: &EigenGroup, form: &InnerProduct, tol: &TolerancePolicy) -> Result<Vec<Slot>> {
    let cross = &(&lambda.basis.herm_transpose() * form.matrix()) * &conj.basis;
    let k = cross.nrows();
    // S_λ ← S_λ Ŝ^{-H}
    let correction = solve_linear(&cross.herm_transpose(), &ComplexMatrix::identity(k), tol)
        .map_err(|_| Error::NumericalBreakdown(format!("singular cross Gram for eigenvalue pair at {}", fmt_complex(analysis.original(lambda.value)))))?;
    let left = &lambda.basis * &correction;
    let value = analysis.original(lambda.value);
    Ok((0..k)
        .map(|t| Slot {
            value,
            left: left.column(t),
            right: conj.basis.column(t),
        })
        .collect())
}

fn critical_slots(analysis: &Analysis, group: &EigenGroup, form: &InnerProduct, tol: &TolerancePolicy) -> Result<Vec<Slot>> {
    let dim = group.basis.ncols();
    if !dim.is_multiple_of(2) {
        return Err(Error::NumericalBreakdown(format!(
            "critical eigenvalue {} has odd eigenspace dimension {dim}",
            fmt_complex(analysis.snapped(group.value))
        )));
    }
    let m = dim / 2;
    let target = critical_target(form, m);
    let g = projected_gram(&group.basis, form)?;
    let t = congruence_to(&g, &target, form.kind(), tol).map_err(|e| match e {
        Error::InertiaMismatch { .. } | Error::NumericalBreakdown(_) => Error::NumericalBreakdown(format!(
            "congruence to the balanced pattern failed for eigenvalue {}: {e}",
            fmt_complex(analysis.snapped(group.value))
        )),
        other => other,
    })?;
    let basis = &group.basis * &t;
    let check = (&gram(&basis, form)? - &target).frobenius_norm();
    if check > 1e-9 * (dim as f64).max(1.0) {
        return Err(Error::NumericalBreakdown(format!(
            "critical block congruence residual {check:.3e} for eigenvalue {}",
            fmt_complex(analysis.snapped(group.value))
        )));
    }
    let value = analysis.snapped(group.value);
    Ok((0..m)
        .map(|t| Slot {
            value,
            left: basis.column(t),
            right: basis.column(m + t),
        })
        .collect())
}

fn finish(
    a: &ComplexMatrix,
    form: &InnerProduct,
    variant: Variant,
    transform: ComplexMatrix,
    core: Vec<Complex64>,
    tol: &TolerancePolicy,
) -> Result<StructuredDiagonalization> {
    let diagonal = ComplexMatrix::from_diagonal(&canonical_values(&core, form.tag(), variant));
    let residual_automorphism = rel_residual(&gram(&transform, form)?, form.matrix())?;
    let similar = solve_linear(&transform, &(a * &transform), tol)
        .map_err(|_| Error::NumericalBreakdown("diagonalizing transform is singular".into()))?;
    let residual_similarity = rel_residual(&similar, &diagonal)?;
    let unitary_residual = rel_residual(&(&transform.herm_transpose() * &transform), &ComplexMatrix::identity(transform.ncols()))?;
    for (name, r) in [("automorphism", residual_automorphism), ("similarity", residual_similarity)] {
        if !(r <= OUTPUT_TOL) {
            return Err(Error::NumericalBreakdown(format!("{name} residual {r:.3e} exceeds {OUTPUT_TOL:e}")));
        }
    }
    Ok(StructuredDiagonalization {
        transform,
        core,
        form_tag: form.tag(),
        variant,
        residual_automorphism,
        residual_similarity,
        unitary: unitary_residual <= OUTPUT_TOL,
    })
}

/// Diagonalizes `a` by an automorphism of `form` (symplectic or perplectic).
pub fn structured_diagonalize(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<StructuredDiagonalization> {
    let n = form.require_structured()?;
    let analysis = analyze(a, form, tol)?;
    let report = report_from(&analysis, form, tol)?;
    if !report.decision {
        return Err(Error::NotStructuredDiagonalizable(Box::new(report)));
    }
    let pairing = pair_conjugates(&analysis.groups, tol)?;

    let mut slots = Vec::with_capacity(n);
    for &(i, j) in &pairing.pairs {
        let (gi, gj) = (&analysis.groups[i], &analysis.groups[j]);
        // the λ side is the one whose eigenvalue of A sorts first
        let (lambda, conj) = if cmp_complex(&analysis.original(gi.value), &analysis.original(gj.value)).is_le() {
            (gi, gj)
        } else {
            (gj, gi)
        };
        slots.extend(pair_slots(&analysis, lambda, conj, form, tol)?);
    }
    for &i in &pairing.singletons {
        slots.extend(critical_slots(&analysis, &analysis.groups[i], form, tol)?);
    }
    if slots.len() != n {
        return Err(Error::NumericalBreakdown(format!("assembled {} column pairs, expected {n}", slots.len())));
    }
    slots.sort_by(|a, b| cmp_complex(&a.value, &b.value));

    let mut transform = ComplexMatrix::zeros(2 * n, 2 * n);
    for (j, slot) in slots.iter().enumerate() {
        transform.set_column(j, &slot.left);
        transform.set_column(partner(form.tag(), n, j), &slot.right);
    }
    let core = slots.iter().map(|s| s.value).collect();
    finish(a, form, analysis.variant, transform, core, tol)
}

/// Makes the first entry of significant size real and positive.
fn normalize_phase(v: &mut ComplexMatrix) {
    for j in 0..v.ncols() {
        let column = v.column(j);
        let largest = column.max_abs();
        let Some(lead) = (0..column.nrows()).map(|i| column[(i, 0)]).find(|z| z.norm() > 1e-8 * largest) else {
            continue;
        };
        let phase = lead.conj() / lead.norm();
        v.set_column(j, &column.scale(phase));
    }
}

/// Unitary automorphism diagonalizing a Euclidean-normal structured `a`.
pub fn unitary_refine(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<StructuredDiagonalization> {
    let n = form.require_structured()?;
    let report = classify(a, form, tol)?;
    if !report.euclidean_normal.holds {
        return Err(Error::NotNormal {
            residual: report.euclidean_normal.residual,
        });
    }
    let diag = structured_diagonalize(a, form, tol)?;
    let first = diag.transform.columns(0, n);

    let mut frame = ComplexMatrix::zeros(2 * n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && diag.core[end] == diag.core[start] {
            end += 1;
        }
        let block = orthonormalize_columns(&first.columns(start, end - start), tol)
            .map_err(|_| Error::NumericalBreakdown("eigenvector block lost rank during orthonormalization".into()))?;
        for c in 0..block.ncols() {
            frame.set_column(start + c, &block.column(c));
        }
        start = end;
    }
    normalize_phase(&mut frame);

    let q = build_unitary_automorphism(&frame, form).map_err(|e| match e {
        Error::NotLagrangianFrame { condition, residual } => {
            Error::NumericalBreakdown(format!("refined frame failed {condition} (residual {residual:.3e})"))
        }
        other => other,
    })?;
    let diagonal = ComplexMatrix::from_diagonal(&canonical_values(&diag.core, form.tag(), diag.variant));
    let residual_similarity = rel_residual(&(&(&q.herm_transpose() * a) * &q), &diagonal)?;
    let residual_automorphism = rel_residual(&gram(&q, form)?, form.matrix())?;
    let unitary_residual = rel_residual(&(&q.herm_transpose() * &q), &ComplexMatrix::identity(2 * n))?;
    for (name, r) in [
        ("automorphism", residual_automorphism),
        ("similarity", residual_similarity),
        ("unitarity", unitary_residual),
    ] {
        if !(r <= OUTPUT_TOL) {
            return Err(Error::NumericalBreakdown(format!("{name} residual {r:.3e} exceeds {OUTPUT_TOL:e}")));
        }
    }
    Ok(StructuredDiagonalization {
        transform: q,
        core: diag.core,
        form_tag: form.tag(),
        variant: diag.variant,
        residual_automorphism,
        residual_similarity,
        unitary: true,
    })
}

/// Extends an orthonormal frame with neutral span to an orthonormal
/// Lagrangian frame (`2n × n`) whose first columns are `v`.
pub fn complete_to_lagrangian(v: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    let n = form.require_structured()?;
    let m = 2 * n;
    let k = v.ncols();
    if k > 0 && v.nrows() != m {
        return Err(Error::DimensionMismatch(format!("frame has {} rows, form dimension is {m}", v.nrows())));
    }
    if k > n {
        return Err(Error::FrameTooLarge { columns: k, max: n });
    }
    let v = if k == 0 { ComplexMatrix::zeros(m, 0) } else { v.clone() };
    let input_tol = tol.structure_tol * (k.max(1) as f64);
    if k > 0 {
        let orth = (&(&v.herm_transpose() * &v) - &ComplexMatrix::identity(k)).frobenius_norm();
        if orth > input_tol {
            return Err(Error::NotOrthonormal { residual: orth });
        }
        let neutral = gram(&v, form)?.frobenius_norm();
        if neutral > input_tol {
            return Err(Error::NotNeutral { residual: neutral });
        }
    }
    if k == n {
        return Ok(v);
    }

    // W: orthonormal basis of the complement of span(V) + span(BV)
    let y = ComplexMatrix::hstack(&[&v, &(form.matrix() * &v)])?;
    let projector = &ComplexMatrix::identity(m) - &(&y * &y.herm_transpose());
    let (pvals, pvecs) = hermitian_eigen(&projector);
    let keep: Vec<usize> = (0..m).filter(|&i| pvals[i] > 0.5).collect();
    let free = n - k;
    if keep.len() != 2 * free {
        return Err(Error::NumericalBreakdown(format!(
            "complement has dimension {}, expected {}",
            keep.len(),
            2 * free
        )));
    }
    let w = pvecs.select_columns(&keep);

    let restricted = gram(&w, form)?;
    let h = match form.kind() {
        FormKind::Hermitian => hermitian_projection(&restricted, false),
        FormKind::SkewHermitian => hermitian_projection(&restricted.scale(-I), false),
    };
    let (hvals, hvecs) = hermitian_eigen(&h);
    if hvals[free - 1] >= 0.0 || hvals[free] <= 0.0 {
        return Err(Error::NumericalBreakdown("restricted form is not balanced".into()));
    }
    let mut x = ComplexMatrix::zeros(2 * free, free);
    for i in 0..free {
        let (neg, pos) = (hvals[i], hvals[free + i]);
        let col = &hvecs.column(free + i).scale(Complex64::new((-neg).sqrt(), 0.0))
            + &hvecs.column(i).scale(Complex64::new(pos.sqrt(), 0.0));
        let norm = col.frobenius_norm();
        x.set_column(i, &col.scale(Complex64::new(1.0 / norm, 0.0)));
    }
    let added = &w * &x;
    let frame = ComplexMatrix::hstack(&[&v, &added])?;

    let orth = (&(&frame.herm_transpose() * &frame) - &ComplexMatrix::identity(n)).frobenius_norm();
    let neutral = gram(&frame, form)?.frobenius_norm();
    if orth > FRAME_OUTPUT_TOL || neutral > FRAME_OUTPUT_TOL {
        return Err(Error::NumericalBreakdown(format!(
            "completed frame residuals {orth:.3e} (orthonormality), {neutral:.3e} (neutrality)"
        )));
    }
    Ok(frame)
}
