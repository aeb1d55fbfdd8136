//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! printed.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use common::{expm_taylor, run, spectrum_distance};
use structdiag_cli::mtx;
use structdiag_core::forms::{adjoint, anti_identity, gram, inertia, j_matrix};
use structdiag_core::generators::{
    counterexample_unbalanced, kind_form, block_example, random_annihilating_factor, random_lagrangian_frame,
    random_structured_diagonalizable, PlantedInstance, SeededRng,
};
use structdiag_core::spectral::{eigen, is_diagonalizable, schur};
use structdiag_core::{
    classify, complete_to_lagrangian, decompose_additive, diagonalizability_report, reconstruct_from_n,
    rel_residual, structured_diagonalize, structured_exp, structured_root, unitary_refine, Complex64, ComplexMatrix,
    Error, FormKind, FormTag, InnerProduct, Sign, Structure, TolerancePolicy, Variant,
};

const KINDS: [Structure; 4] = [
    Structure::SkewHamiltonian,
    Structure::Hamiltonian,
    Structure::PerHermitian,
    Structure::PerskewHermitian,
];

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn sign_of(variant: Variant) -> Sign {
    match variant {
        Variant::Selfadjoint => Sign::Plus,
        Variant::Skewadjoint => Sign::Minus,
    }
}

/// Running record for one criterion: case count, worst residuals and the
/// first few failures.
struct Tally {
    cases: usize,
    worst: Vec<(&'static str, f64)>,
    failures: Vec<String>,
    failure_count: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            cases: 0,
            worst: Vec::new(),
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    fn fail(&mut self, message: String) {
        self.failure_count += 1;
        if self.failures.len() < 5 {
            self.failures.push(message);
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.fail(message());
        }
    }

    /// Records `value` and fails unless `value <= bound` (NaN fails).
    fn bound(&mut self, name: &'static str, value: f64, bound: f64, context: impl FnOnce() -> String) {
        match self.worst.iter_mut().find(|(n, _)| *n == name) {
            Some((_, w)) => *w = w.max(value),
            None => self.worst.push((name, value)),
        }
        let within = value <= bound;
        if !within {
            self.fail(format!("{}: {name} {value:.3e} > {bound:.0e}", context()));
        }
    }

    fn summary(&self, extra: &str) -> String {
        let mut parts = vec![format!("{} cases", self.cases)];
        parts.extend(self.worst.iter().map(|(n, w)| format!("worst {n} {w:.1e}")));
        if !extra.is_empty() {
            parts.push(extra.to_string());
        }
        parts.join(", ")
    }
}

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
    failures: Vec<String>,
}

fn outcome(id: usize, title: &'static str, tally: Tally, extra: &str) -> Outcome {
    let mut detail = tally.summary(extra);
    if tally.failure_count > 0 {
        detail.push_str(&format!(", {} failures", tally.failure_count));
    }
    Outcome {
        id,
        title,
        passed: tally.failure_count == 0 && tally.cases > 0,
        detail,
        failures: tally.failures,
    }
}

fn is_exactly_diagonal(m: &ComplexMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

/// `d[partner(j)] == ±conj(d[j])` bit for bit, with the partner layout of
/// the form.
fn has_canonical_pattern(d: &[Complex64], tag: FormTag, variant: Variant) -> bool {
    let n = d.len() / 2;
    (0..n).all(|j| {
        let p = match tag {
            FormTag::PerplecticR(_) => 2 * n - 1 - j,
            _ => n + j,
        };
        d[p] == d[j].conj() * variant.sign()
    })
}

fn instances() -> Vec<(Structure, usize, u64)> {
    let mut out = Vec::new();
    for kind in KINDS {
        for n in [1, 2, 4, 8] {
            for seed in 0..50 {
                out.push((kind, n, seed));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1. round-trip diagonalization
// ---------------------------------------------------------------------------

fn criterion_1(planted: &[(Structure, usize, u64, PlantedInstance)]) -> Outcome {
    let mut t = Tally::new();
    let mut slowest = Duration::ZERO;
    for (kind, n, seed, inst) in planted {
        t.cases += 1;
        let ctx = || format!("{kind} n={n} seed={seed}");
        let start = Instant::now();
        let out = structured_diagonalize(&inst.matrix, &inst.form, &tol());
        slowest = slowest.max(start.elapsed());
        let out = match out {
            Ok(o) => o,
            Err(e) => {
                t.fail(format!("{}: {e}", ctx()));
                continue;
            }
        };
        let b = inst.form.matrix();
        let s = &out.transform;
        t.bound("automorphism", rel_residual(&(&(&s.herm_transpose() * b) * s), b).unwrap(), 1e-8, ctx);
        let d = out.diagonal();
        let s_inv = structdiag_core::matrix::inverse(s, &tol()).unwrap();
        t.bound("similarity", rel_residual(&(&(&s_inv * &inst.matrix) * s), &d).unwrap(), 1e-8, ctx);
        let values = d.diagonal();
        t.check(is_exactly_diagonal(&d) && has_canonical_pattern(&values, inst.form.tag(), inst.variant), || {
            format!("{}: diagonal does not have the canonical pattern", ctx())
        });
        t.bound("spectrum", spectrum_distance(&values, &inst.diagonal.diagonal()), 1e-8, ctx);
    }
    let ok_time = slowest < Duration::from_secs(1);
    if !ok_time {
        t.fail(format!("slowest instance took {slowest:?}"));
    }
    outcome(1, "round-trip diagonalization", t, &format!("slowest {:.1} ms", slowest.as_secs_f64() * 1e3))
}

// ---------------------------------------------------------------------------
// 2. negative decisions
// ---------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let mut t = Tally::new();
    let strict = TolerancePolicy::with_structure_tol(1e-9).unwrap();
    for n in [2, 3, 4] {
        let form = InnerProduct::symplectic(n).unwrap();
        for seed in 0..20 {
            t.cases += 1;
            let ctx = || format!("counterexample n={n} seed={seed}");
            let a = counterexample_unbalanced(n, seed).unwrap();
            let report = classify(&a, &form, &strict).unwrap();
            t.bound("skew-hamiltonian", report.selfadjoint.residual, 1e-9, ctx);
            t.check(is_diagonalizable(&a, &tol()).unwrap_or(false), || format!("{}: not diagonalizable", ctx()));
            let decision = diagonalizability_report(&a, &form, &tol()).map(|r| r.decision);
            t.check(decision.as_ref().is_ok_and(|d| !d), || format!("{}: decision {decision:?}", ctx()));
            let diag = structured_diagonalize(&a, &form, &tol());
            t.check(matches!(diag, Err(Error::NotStructuredDiagonalizable(_))), || {
                format!("{}: diagonalize returned {:?}", ctx(), diag.map(|d| d.core))
            });
        }
    }
    for n in 1..=4 {
        t.cases += 1;
        let form = InnerProduct::symplectic(n).unwrap();
        let decision = diagonalizability_report(&j_matrix(n), &form, &tol()).map(|r| r.decision);
        t.check(decision.as_ref().is_ok_and(|d| !d), || format!("J_{}: decision {decision:?}", 2 * n));
    }
    outcome(2, "negative decisions (unbalanced, J_2n)", t, "")
}

// ---------------------------------------------------------------------------
// 3. block example [[A, B], [B, -A]]
// ---------------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let mut t = Tally::new();
    for n in [1, 2, 4] {
        let form = InnerProduct::symplectic(n).unwrap();
        for seed in 0..20 {
            t.cases += 1;
            let ctx = || format!("n={n} seed={seed}");
            let m = block_example(n, seed).unwrap();
            let decision = diagonalizability_report(&m, &form, &tol()).map(|r| r.decision);
            t.check(decision.as_ref().is_ok_and(|d| *d), || format!("{}: decision {decision:?}", ctx()));
            match structured_diagonalize(&m, &form, &tol()) {
                Ok(out) => {
                    t.bound("automorphism", out.residual_automorphism, 1e-8, ctx);
                    t.bound("similarity", out.residual_similarity, 1e-8, ctx);
                }
                Err(e) => t.fail(format!("{}: {e}", ctx())),
            }
            let real = eigen(&m).unwrap().values.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            t.bound("real part", real, 1e-8, ctx);
        }
    }
    outcome(3, "block example [[A,B],[B,-A]] diagonalizable", t, "")
}

// ---------------------------------------------------------------------------
// 4. Sylvester invariance
// ---------------------------------------------------------------------------

/// Random `(skew-)Hermitian` `U diag(d) U^H`: nonzero `|d|` in `[0.5, 2]`
/// with random signs, and `zeros` exact zeros.
fn conditioned_form(rng: &mut SeededRng, m: usize, zeros: usize, kind: FormKind) -> ComplexMatrix {
    let u = rng.unitary(m);
    let d: Vec<Complex64> = (0..m)
        .map(|k| {
            if k < zeros {
                return Complex64::new(0.0, 0.0);
            }
            let x = rng.uniform_in(0.5, 2.0) * if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            match kind {
                FormKind::Hermitian => Complex64::new(x, 0.0),
                FormKind::SkewHermitian => Complex64::new(0.0, x),
            }
        })
        .collect();
    &(&u * &ComplexMatrix::from_diagonal(&d)) * &u.herm_transpose()
}

/// Random congruence `U_1 Σ U_2` with singular values in `[0.5, 2]`.
fn conditioned_congruence(rng: &mut SeededRng, m: usize) -> ComplexMatrix {
    let sigma: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.uniform_in(0.5, 2.0), 0.0)).collect();
    &(&rng.unitary(m) * &ComplexMatrix::from_diagonal(&sigma)) * &rng.unitary(m)
}

fn criterion_4() -> Outcome {
    let mut t = Tally::new();
    let mut rng = SeededRng::new(0x5eed);
    // Inertia is only well posed away from the zero threshold, so spectra
    // and congruences are kept well conditioned.
    for kind in [FormKind::Hermitian, FormKind::SkewHermitian] {
        for trial in 0..100 {
            t.cases += 1;
            let m = 1 + trial % 12;
            // exact zeros every fifth trial so the zero count is exercised
            let zeros = if trial % 5 == 4 { m / 2 } else { 0 };
            let h = conditioned_form(&mut rng, m, zeros, kind);
            let before = inertia(&h, kind, &tol()).unwrap();
            t.check(before.r == zeros, || format!("{kind:?} m={m} trial={trial}: inertia {before}, {zeros} zeros planted"));
            for _ in 0..5 {
                let s = conditioned_congruence(&mut rng, m);
                let after = inertia(&(&(&s.herm_transpose() * &h) * &s), kind, &tol());
                t.check(after.as_ref().is_ok_and(|a| *a == before), || {
                    format!("{kind:?} m={m} trial={trial}: {before} became {after:?}")
                });
            }
        }
    }
    for n in 1..=8 {
        t.cases += 2;
        let j = inertia(&j_matrix(n), FormKind::SkewHermitian, &tol()).unwrap();
        let r = inertia(&anti_identity(2 * n), FormKind::Hermitian, &tol()).unwrap();
        t.check((j.p, j.q, j.r) == (n, n, 0), || format!("inertia of J_{} is {j}", 2 * n));
        t.check((r.p, r.q, r.r) == (n, n, 0), || format!("inertia of R_{} is {r}", 2 * n));
    }
    outcome(4, "Sylvester inertia invariance", t, "")
}

// ---------------------------------------------------------------------------
// 5. unitary refinement
// ---------------------------------------------------------------------------

fn criterion_5(planted: &[(Structure, usize, u64, PlantedInstance)]) -> Outcome {
    let mut t = Tally::new();
    for (kind, n, seed, inst) in planted {
        t.cases += 1;
        let ctx = || format!("{kind} n={n} seed={seed}");
        match unitary_refine(&inst.matrix, &inst.form, &tol()) {
            Ok(out) => {
                let q = &out.transform;
                let b = inst.form.matrix();
                let qh = q.herm_transpose();
                t.bound("unitary", rel_residual(&(&qh * q), &ComplexMatrix::identity(2 * n)).unwrap(), 1e-8, ctx);
                t.bound("automorphism", rel_residual(&(&(&qh * b) * q), b).unwrap(), 1e-8, ctx);
                t.bound("similarity", rel_residual(&(&(&qh * &inst.matrix) * q), &out.diagonal()).unwrap(), 1e-8, ctx);
            }
            Err(e) => t.fail(format!("{}: {e}", ctx())),
        }
    }
    outcome(5, "unitary refinement", t, "")
}

// ---------------------------------------------------------------------------
// 6 and 7. additive decomposition and spectral containment
// ---------------------------------------------------------------------------

/// Nonzero eigenvalues of `n` (computed independently) that have no match
/// in the spectrum of `a` within `1e-8`; returns the worst distance.
fn containment_gap(n: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
    let spectrum_a = eigen(a).unwrap().values;
    let scale = n.spectral_norm().max(1.0);
    eigen(n)
        .unwrap()
        .values
        .iter()
        .filter(|z| z.norm() > 1e-6 * scale)
        .map(|z| spectrum_a.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// `σ_min(A) / max(1, σ_max(A))`.
fn relative_smallest_singular_value(a: &ComplexMatrix) -> f64 {
    let sv = a.singular_values();
    sv.last().copied().unwrap_or(0.0) / sv[0].max(1.0)
}

fn criteria_6_and_7(planted: &[(Structure, usize, u64, PlantedInstance)]) -> (Outcome, Outcome) {
    let mut t6 = Tally::new();
    let mut t7 = Tally::new();
    let mut forward = 0;
    for (kind, n, seed, inst) in planted {
        forward += 1;
        t6.cases += 1;
        let ctx = || format!("forward {kind} n={n} seed={seed}");
        let dec = match decompose_additive(&inst.matrix, &inst.form, &tol()) {
            Ok(d) => d,
            Err(e) => {
                t6.fail(format!("{}: {e}", ctx()));
                continue;
            }
        };
        t6.check(dec.sign == sign_of(inst.variant), || format!("{}: sign {}", ctx(), dec.sign));
        for (name, r) in dec.residuals.named() {
            t6.bound(name, r, 1e-8, ctx);
        }
        t7.cases += 1;
        t7.bound("containment", containment_gap(&dec.factor, &inst.matrix), 1e-8, ctx);
        // planted cores have modulus at least 0.5, so N has full rank n
        t7.check(relative_smallest_singular_value(&inst.matrix) > 1e-10, || format!("{}: A singular", ctx()));
    }

    let mut reverse = 0;
    for kind in KINDS {
        let (form, variant) = kind_form(kind, 4).unwrap();
        for seed in 0..50u64 {
            // ranks cycle through 0..=4, covering rank 1 and rank n - 1
            let rank = (seed % 5) as usize;
            reverse += 1;
            t6.cases += 1;
            let ctx = || format!("reverse {kind} rank={rank} seed={seed}");
            let planted = random_annihilating_factor(&form, variant, rank, 1000 + seed).unwrap();
            let (a, diag) = match reconstruct_from_n(&planted.factor, sign_of(variant), &form, &tol()) {
                Ok(r) => r,
                Err(e) => {
                    t6.fail(format!("{}: {e}", ctx()));
                    continue;
                }
            };
            let decision = diagonalizability_report(&a, &form, &tol()).map(|r| r.decision);
            t6.check(decision.as_ref().is_ok_and(|d| *d), || format!("{}: decision {decision:?}", ctx()));
            t6.check(diag.unitary, || format!("{}: transform not unitary", ctx()));
            let q = &diag.transform;
            let b = form.matrix();
            t6.bound("reverse automorphism", rel_residual(&(&(&q.herm_transpose() * b) * q), b).unwrap(), 1e-8, ctx);
            t6.bound(
                "reverse similarity",
                rel_residual(&(&(&q.herm_transpose() * &a) * q), &diag.diagonal()).unwrap(),
                1e-8,
                ctx,
            );
            let n_star = adjoint(&planted.factor, &form).unwrap();
            let rebuilt = match variant {
                Variant::Selfadjoint => &planted.factor + &n_star,
                Variant::Skewadjoint => &planted.factor - &n_star,
            };
            t6.bound("reverse reconstruction", rel_residual(&a, &rebuilt).unwrap(), 1e-8, ctx);

            t7.cases += 1;
            t7.bound("containment", containment_gap(&planted.factor, &a), 1e-8, ctx);
            if rank == 4 {
                t7.check(relative_smallest_singular_value(&a) > 1e-10, || format!("{}: A singular", ctx()));
            }
        }
    }
    (
        outcome(6, "additive decomposition A = N ± N⋆", t6, &format!("{forward} forward, {reverse} reverse")),
        outcome(7, "spectral containment σ(N)∖{0} ⊆ σ(A)", t7, ""),
    )
}

// ---------------------------------------------------------------------------
// 8. structured exponential and roots
// ---------------------------------------------------------------------------

/// `exp(A)` from a unitary diagonalization of the normal `A` itself.
fn expm_normal(a: &ComplexMatrix) -> ComplexMatrix {
    let s = schur(a).unwrap();
    let values: Vec<Complex64> = s.t.diagonal().iter().map(|z| z.exp()).collect();
    &(&s.z * &ComplexMatrix::from_diagonal(&values)) * &s.z.herm_transpose()
}

fn criterion_8() -> Outcome {
    let mut t = Tally::new();
    for kind in KINDS {
        for n in [1, 2, 4] {
            for seed in 0..10 {
                t.cases += 1;
                let ctx = || format!("exp {kind} n={n} seed={seed}");
                let inst = random_structured_diagonalizable(kind, n, seed).unwrap();
                let dec = decompose_additive(&inst.matrix, &inst.form, &tol()).unwrap();
                let (exp_a, _) = structured_exp(&dec, &inst.form).unwrap();
                t.bound("exp vs eigen oracle", rel_residual(&exp_a, &expm_normal(&inst.matrix)).unwrap(), 1e-8, ctx);
                t.bound("exp vs Taylor oracle", rel_residual(&exp_a, &expm_taylor(&inst.matrix)).unwrap(), 1e-8, ctx);
                if inst.variant == Variant::Skewadjoint {
                    let b = inst.form.matrix();
                    let g = rel_residual(&(&(&exp_a.herm_transpose() * b) * &exp_a), b).unwrap();
                    t.bound("exp automorphism", g, 1e-8, ctx);
                }
            }
        }
    }
    for kind in [Structure::SkewHamiltonian, Structure::PerHermitian] {
        for n in [1, 2, 4] {
            for p in [2u32, 3] {
                for seed in 0..10 {
                    t.cases += 1;
                    let ctx = || format!("root p={p} {kind} n={n} seed={seed}");
                    let inst = random_structured_diagonalizable(kind, n, seed).unwrap();
                    let x = match structured_root(&inst.matrix, p, &inst.form, &tol()) {
                        Ok(x) => x,
                        Err(e) => {
                            t.fail(format!("{}: {e}", ctx()));
                            continue;
                        }
                    };
                    let mut power = x.clone();
                    for _ in 1..p {
                        power = &power * &x;
                    }
                    let rel = (&power - &inst.matrix).frobenius_norm() / inst.matrix.frobenius_norm();
                    t.bound("root power", rel, 1e-7, ctx);
                    let rep = classify(&x, &inst.form, &tol()).unwrap();
                    t.check(rep.selfadjoint.holds && rep.euclidean_normal.holds, || {
                        format!("{}: root is not selfadjoint and normal", ctx())
                    });
                }
            }
        }
    }
    outcome(8, "structured exp and roots", t, "")
}

// ---------------------------------------------------------------------------
// 9. Lagrangian completion
// ---------------------------------------------------------------------------

fn criterion_9() -> Outcome {
    let mut t = Tally::new();
    for n in [2, 4] {
        for form in [InnerProduct::symplectic(n).unwrap(), InnerProduct::perplectic(n).unwrap()] {
            for k in 0..=n {
                for trial in 0..100u64 {
                    t.cases += 1;
                    let ctx = || format!("{} k={k} trial={trial}", form.tag());
                    let mut rng = SeededRng::new((n as u64) << 32 | (k as u64) << 16 | trial);
                    // orthonormal neutral frame, rotated so it is not a prefix of a standard frame
                    let lagrangian = random_lagrangian_frame(&form, &mut rng).unwrap();
                    let v = &lagrangian.columns(0, k) * &rng.unitary(k);
                    let out = match complete_to_lagrangian(&v, &form, &tol()) {
                        Ok(o) => o,
                        Err(e) => {
                            t.fail(format!("{}: {e}", ctx()));
                            continue;
                        }
                    };
                    t.check(out.ncols() == n, || format!("{}: {} columns", ctx(), out.ncols()));
                    t.check(out.columns(0, k) == v, || format!("{}: input columns changed", ctx()));
                    let ortho = (&(&out.herm_transpose() * &out) - &ComplexMatrix::identity(out.ncols())).frobenius_norm();
                    t.bound("orthonormality", ortho, 1e-9, ctx);
                    t.bound("neutrality", gram(&out, &form).unwrap().frobenius_norm(), 1e-9, ctx);
                }
            }
        }
    }
    outcome(9, "Lagrangian completion", t, "")
}

// ---------------------------------------------------------------------------
// 10. CLI end-to-end
// ---------------------------------------------------------------------------

fn expect_code(t: &mut Tally, dir: &Path, args: &[&str], code: i32) -> bool {
    let r = run(dir, args);
    let ok = r.code == code;
    t.check(ok, || format!("`{}` exited {} (wanted {code}): {}", args.join(" "), r.code, r.stderr.trim()));
    ok
}

fn round_trips(path: &Path) -> bool {
    let bytes = std::fs::read(path).unwrap();
    let m = mtx::parse_matrix(std::str::from_utf8(&bytes).unwrap()).unwrap();
    let text = mtx::format_matrix(&m);
    text.as_bytes() == bytes.as_slice() && mtx::parse_matrix(&text).unwrap() == m
}

fn criterion_10(suite_start: Instant) -> Outcome {
    let mut t = Tally::new();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for kind in KINDS {
        let form = if matches!(kind, Structure::SkewHamiltonian | Structure::Hamiltonian) {
            "symplectic"
        } else {
            "perplectic"
        };
        for n in [1, 2, 4] {
            for seed in 0..3 {
                t.cases += 1;
                let gen_kind = format!("{}-diagonalizable", kind.name());
                let (n_s, seed_s) = (n.to_string(), seed.to_string());
                if !expect_code(&mut t, p, &["generate", "--kind", &gen_kind, "--n", &n_s, "--seed", &seed_s, "a.mtx"], 0) {
                    continue;
                }
                expect_code(&mut t, p, &["analyze", "--form", form, "--expect", kind.name(), "a.mtx"], 0);
                expect_code(&mut t, p, &["diagonalize", "--form", form, "a.mtx", "--out", "a"], 0);
                expect_code(&mut t, p, &["verify", "--mode", "diag", "--form", form, "a.mtx", "a.S.mtx"], 0);
                expect_code(&mut t, p, &["diagonalize", "--form", form, "--unitary", "a.mtx", "--out", "q"], 0);
                expect_code(&mut t, p, &["verify", "--mode", "diag", "--form", form, "a.mtx", "q.S.mtx"], 0);
                expect_code(&mut t, p, &["decompose", "--form", form, "a.mtx", "--out", "a"], 0);
                expect_code(&mut t, p, &["verify", "--mode", "decomp", "--form", form, "a.mtx", "a.N.mtx"], 0);
                for file in ["a.mtx", "a.S.mtx", "a.D.mtx", "q.S.mtx", "a.N.mtx"] {
                    let path = p.join(file);
                    t.check(path.exists() && round_trips(&path), || format!("{file} does not round-trip"));
                }
            }
        }
    }
    for n in [2, 3] {
        for seed in 0..3 {
            t.cases += 1;
            let (n_s, seed_s) = (n.to_string(), seed.to_string());
            expect_code(&mut t, p, &["generate", "--kind", "counterexample", "--n", &n_s, "--seed", &seed_s, "c.mtx"], 0);
            let r = run(p, &["analyze", "--form", "symplectic", "c.mtx"]);
            let decision = serde_json::from_str::<serde_json::Value>(&r.stdout)
                .ok()
                .and_then(|d| d["payload"]["diagonalizability"]["decision"].as_bool());
            t.check(r.code == 0 && decision == Some(false), || format!("counterexample n={n} seed={seed}: analyze gave {decision:?}"));
            expect_code(&mut t, p, &["diagonalize", "--form", "symplectic", "c.mtx", "--out", "c"], 1);
        }
    }
    let elapsed = suite_start.elapsed();
    t.check(elapsed < Duration::from_secs(120), || format!("acceptance suite took {elapsed:?}"));
    outcome(10, "CLI end-to-end", t, &format!("suite time {:.1} s", elapsed.as_secs_f64()))
}

fn main() {
    let start = Instant::now();
    let planted: Vec<(Structure, usize, u64, PlantedInstance)> = instances()
        .into_iter()
        .map(|(kind, n, seed)| (kind, n, seed, random_structured_diagonalizable(kind, n, seed).unwrap()))
        .collect();

    let mut results = vec![criterion_1(&planted), criterion_2(), criterion_3(), criterion_4(), criterion_5(&planted)];
    let (six, seven) = criteria_6_and_7(&planted);
    results.extend([six, seven, criterion_8(), criterion_9()]);
    results.push(criterion_10(start));

    println!();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}  {}: {}", r.id, r.title, r.detail);
        for f in &r.failures {
            println!("       {f}");
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("\nacceptance: {} of {} criteria passed\n", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
