//! Implementation of the subcommands. Each returns an [`Outcome`] holding the
//! exit code and the text for stdout; nothing here prints or exits.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use structdiag_core::decomposition::verify_factor;
use structdiag_core::diag::variant_of;
use structdiag_core::generators::{
    counterexample_unbalanced, block_example, random_automorphism, random_structured,
    random_structured_diagonalizable, random_structured_diagonalizable_nonnormal,
};
use structdiag_core::matrix::inverse;
use structdiag_core::structure::FormFamily;
use structdiag_core::{
    classify, decompose_additive, diagonalizability_report, rel_residual, structured_diagonalize, unitary_refine,
    ComplexMatrix, Error, InnerProduct, Sign, Structure, StructuredDiagonalization, TolerancePolicy, Variant,
};

use crate::mtx::{self, MtxError};
use crate::report::{
    pair, sha256_hex, Classification, Decomposition, Diagonalizability, Expectation, Factors, Failure, NamedCheck,
    Payload, ReportDocument, Verification,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

type Residuals = Vec<(&'static str, f64)>;

/// Residual bound every `verify` check has to meet.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormChoice {
    Symplectic,
    Perplectic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Diag,
    Decomp,
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    /// One-line summary for stderr on non-zero exits.
    pub message: Option<String>,
}

impl Outcome {
    fn document(code: i32, doc: &ReportDocument, message: Option<String>) -> Self {
        Self {
            code,
            stdout: doc.to_json(),
            message,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mtx(_) | CliError::Usage(_) => EXIT_INPUT,
            CliError::Core(e) if e.is_negative_result() => EXIT_NEGATIVE,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_INPUT,
        }
    }
}

pub fn tolerance(structure_tol: Option<f64>) -> Result<TolerancePolicy, CliError> {
    Ok(match structure_tol {
        Some(t) => TolerancePolicy::with_structure_tol(t)?,
        None => TolerancePolicy::default(),
    })
}

/// The form of the requested family whose dimension matches `a`.
pub fn form_for(choice: FormChoice, a: &ComplexMatrix) -> Result<InnerProduct, CliError> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(CliError::Usage(format!("expected a nonempty square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    let m = a.nrows();
    if choice != FormChoice::Euclidean && !m.is_multiple_of(2) {
        return Err(CliError::Usage(format!("{choice:?} form needs an even dimension, got {m}").to_lowercase()));
    }
    Ok(match choice {
        FormChoice::Symplectic => InnerProduct::symplectic(m / 2)?,
        FormChoice::Perplectic => InnerProduct::perplectic(m / 2)?,
        FormChoice::Euclidean => InnerProduct::euclidean(m)?,
    })
}

/// A parsed input file together with the digest of its bytes.
struct Input {
    matrix: ComplexMatrix,
    bytes: Vec<u8>,
}

/// Reads and parses `path`. On failure also returns the digest of whatever
/// bytes were read, empty when the file could not be read at all.
fn load(path: &Path) -> Result<Input, (String, CliError)> {
    let bytes = std::fs::read(path).map_err(|source| {
        let e = MtxError::Io {
            path: path.display().to_string(),
            source,
        };
        (String::new(), e.into())
    })?;
    let in_file = |line: usize, message: String| -> (String, CliError) {
        let e = MtxError::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        };
        (sha256_hex(&[&bytes]), e.into())
    };
    let text = std::str::from_utf8(&bytes).map_err(|_| in_file(0, "not UTF-8 text".into()))?;
    let matrix = mtx::parse_matrix(text).map_err(|e| match e {
        MtxError::Parse { line, message } => in_file(line, message),
        other => (sha256_hex(&[&bytes]), other.into()),
    })?;
    Ok(Input { matrix, bytes })
}

fn digest(inputs: &[&Input]) -> String {
    let chunks: Vec<&[u8]> = inputs.iter().map(|i| i.bytes.as_slice()).collect();
    sha256_hex(&chunks)
}

/// Structure residuals of `a`, attached to every report that has a matrix.
fn structure_residuals(a: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Vec<(&'static str, f64)> {
    classify(a, form, tol)
        .map(|r| r.named_checks().into_iter().map(|(n, c)| (n, c.residual)).collect())
        .unwrap_or_default()
}

fn failure(command: &str, input_digest: String, err: &CliError) -> ReportDocument {
    let diagonalizability = match err {
        CliError::Core(Error::NotStructuredDiagonalizable(rep)) => Some(Diagonalizability::from(rep.as_ref())),
        _ => None,
    };
    ReportDocument::new(
        command,
        input_digest,
        Payload::Failure(Failure {
            error: err.to_string(),
            exit_code: err.exit_code(),
            diagonalizability,
        }),
    )
}

fn failed(command: &str, input_digest: String, err: CliError, residuals: Vec<(&str, f64)>) -> Outcome {
    let doc = failure(command, input_digest, &err).with_residuals(residuals);
    Outcome::document(err.exit_code(), &doc, Some(err.to_string()))
}

fn structured_family(form: &InnerProduct) -> Option<FormFamily> {
    match form.tag() {
        structdiag_core::FormTag::SymplecticJ(_) => Some(FormFamily::Symplectic),
        structdiag_core::FormTag::PerplecticR(_) => Some(FormFamily::Perplectic),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn analyze_one(path: &Path, choice: FormChoice, expect: Option<Structure>, tol: &TolerancePolicy) -> (i32, ReportDocument) {
    let input = match load(path) {
        Ok(i) => i,
        Err((d, e)) => return (e.exit_code(), failure("analyze", d, &e)),
    };
    let input_digest = digest(&[&input]);
    match analyze_matrix(&input.matrix, choice, expect, tol) {
        Ok((code, payload, residuals)) => {
            (code, ReportDocument::new("analyze", input_digest, payload).with_residuals(residuals))
        }
        Err(e) => (e.exit_code(), failure("analyze", input_digest, &e)),
    }
}

fn analyze_matrix(
    a: &ComplexMatrix,
    choice: FormChoice,
    expect: Option<Structure>,
    tol: &TolerancePolicy,
) -> Result<(i32, Payload, Residuals), CliError> {
    let form = form_for(choice, a)?;
    let report = classify(a, &form, tol)?;
    let checks = report.named_checks();
    let structures = checks
        .iter()
        .map(|(name, c)| NamedCheck {
            name: name.to_string(),
            holds: c.holds,
            residual: c.residual,
        })
        .collect();

    let mut code = EXIT_OK;
    let expect = match expect {
        None => None,
        Some(s) => {
            let check = report
                .check(s)
                .ok_or_else(|| CliError::Usage(format!("structure '{s}' does not apply to the {} form", form.tag())))?;
            if !check.holds {
                code = EXIT_NEGATIVE;
            }
            Some(Expectation {
                structure: s.name().to_string(),
                holds: check.holds,
            })
        }
    };

    let structured = report.selfadjoint.holds || report.skewadjoint.holds;
    let diagonalizability = if structured && structured_family(&form).is_some() {
        match diagonalizability_report(a, &form, tol) {
            Ok(r) => Some(Diagonalizability::from(&r)),
            Err(e) if e.is_negative_result() => Some(Diagonalizability {
                decision: false,
                variant: if report.selfadjoint.holds { Variant::Selfadjoint } else { Variant::Skewadjoint }
                    .name()
                    .to_string(),
                reason: e.to_string(),
                eigenvalues: Vec::new(),
            }),
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let residuals = checks.iter().map(|(n, c)| (*n, c.residual)).collect();
    let payload = Payload::Classification(Classification {
        form: form.tag().to_string(),
        structures,
        expect,
        diagonalizability,
    });
    Ok((code, payload, residuals))
}

/// Classifies every file, `jobs` at a time. One file prints one document,
/// several print a JSON array in argument order. The exit code is the
/// largest over the files.
pub fn analyze(files: &[PathBuf], choice: FormChoice, expect: Option<&str>, jobs: Option<usize>, tol: &TolerancePolicy) -> Outcome {
    let expect = match expect.map(str::parse::<Structure>).transpose() {
        Ok(e) => e,
        Err(e) => {
            let err = CliError::Usage(e.to_string());
            return failed("analyze", String::new(), err, Vec::new());
        }
    };
    let run = || -> Vec<(i32, ReportDocument)> {
        files
            .par_iter()
            .map(|f| analyze_one(f, choice, expect, tol))
            .collect()
    };
    let results = match jobs {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(e) => return failed("analyze", String::new(), CliError::Usage(e.to_string()), Vec::new()),
        },
        None => run(),
    };
    let code = results.iter().map(|(c, _)| *c).max().unwrap_or(EXIT_OK);
    let stdout = if results.len() == 1 {
        results[0].1.to_json()
    } else {
        let docs: Vec<&ReportDocument> = results.iter().map(|(_, d)| d).collect();
        serde_json::to_string_pretty(&docs).expect("reports serialize")
    };
    let message = results.iter().find_map(|(c, d)| match &d.payload {
        Payload::Failure(f) if *c != EXIT_OK => Some(f.error.clone()),
        Payload::Classification(Classification { expect: Some(e), .. }) if !e.holds => {
            Some(format!("matrix is not {}", e.structure))
        }
        _ => None,
    });
    Outcome { code, stdout, message }
}

// ---------------------------------------------------------------------------
// diagonalize
// ---------------------------------------------------------------------------

fn factor_path(prefix: &Path, tag: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!(".{tag}.mtx"));
    PathBuf::from(name)
}

pub fn diagonalize(file: &Path, choice: FormChoice, unitary: bool, out: Option<&Path>, tol: &TolerancePolicy) -> Outcome {
    let input = match load(file) {
        Ok(i) => i,
        Err((d, e)) => return failed("diagonalize", d, e, Vec::new()),
    };
    let input_digest = digest(&[&input]);
    let a = &input.matrix;
    let form = match form_for(choice, a) {
        Ok(f) => f,
        Err(e) => return failed("diagonalize", input_digest, e, Vec::new()),
    };
    let result = if unitary {
        unitary_refine(a, &form, tol)
    } else {
        structured_diagonalize(a, &form, tol)
    };
    let diag = match result {
        Ok(d) => d,
        Err(e) => return failed("diagonalize", input_digest, e.into(), structure_residuals(a, &form, tol)),
    };
    let (transform_file, diagonal_file) = match out {
        Some(prefix) => {
            let s_path = factor_path(prefix, "S");
            let d_path = factor_path(prefix, "D");
            let written = mtx::write_matrix(&s_path, &diag.transform).and_then(|_| mtx::write_matrix(&d_path, &diag.diagonal()));
            if let Err(e) = written {
                return failed("diagonalize", input_digest, e.into(), diagonalization_residuals(&diag));
            }
            (Some(s_path.display().to_string()), Some(d_path.display().to_string()))
        }
        None => (None, None),
    };
    let doc = ReportDocument::new(
        "diagonalize",
        input_digest,
        Payload::Factors(Factors {
            form: form.tag().to_string(),
            variant: diag.variant.name().to_string(),
            unitary: diag.unitary,
            core: diag.core.iter().copied().map(pair).collect(),
            transform_file,
            diagonal_file,
        }),
    )
    .with_residuals(diagonalization_residuals(&diag));
    Outcome::document(EXIT_OK, &doc, None)
}

fn diagonalization_residuals(diag: &StructuredDiagonalization) -> Vec<(&'static str, f64)> {
    let mut out = vec![
        ("automorphism", diag.residual_automorphism),
        ("similarity", diag.residual_similarity),
    ];
    if diag.unitary {
        let q = &diag.transform;
        let r = rel_residual(&(&q.herm_transpose() * q), &ComplexMatrix::identity(q.ncols())).unwrap_or(f64::INFINITY);
        out.push(("unitarity", r));
    }
    out
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

pub fn decompose(file: &Path, choice: FormChoice, out: Option<&Path>, tol: &TolerancePolicy) -> Outcome {
    let input = match load(file) {
        Ok(i) => i,
        Err((d, e)) => return failed("decompose", d, e, Vec::new()),
    };
    let input_digest = digest(&[&input]);
    let a = &input.matrix;
    let form = match form_for(choice, a) {
        Ok(f) => f,
        Err(e) => return failed("decompose", input_digest, e, Vec::new()),
    };
    let dec = match decompose_additive(a, &form, tol) {
        Ok(d) => d,
        Err(e) => return failed("decompose", input_digest, e.into(), structure_residuals(a, &form, tol)),
    };
    let residuals: Vec<(&str, f64)> = dec.residuals.named().to_vec();
    let factor_file = match out {
        Some(prefix) => {
            let path = factor_path(prefix, "N");
            if let Err(e) = mtx::write_matrix(&path, &dec.factor) {
                return failed("decompose", input_digest, e.into(), residuals);
            }
            Some(path.display().to_string())
        }
        None => None,
    };
    let doc = ReportDocument::new(
        "decompose",
        input_digest,
        Payload::Decomposition(Decomposition {
            form: form.tag().to_string(),
            sign: dec.sign.name().to_string(),
            rank: dec.core.iter().filter(|z| z.norm() > 0.0).count(),
            core: dec.core.iter().copied().map(pair).collect(),
            factor_file,
        }),
    )
    .with_residuals(residuals);
    Outcome::document(EXIT_OK, &doc, None)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

const BASE_KINDS: [Structure; 4] = [
    Structure::SkewHamiltonian,
    Structure::Hamiltonian,
    Structure::PerHermitian,
    Structure::PerskewHermitian,
];

/// Names accepted by `generate --kind`.
pub fn generator_kinds() -> Vec<String> {
    let mut kinds = Vec::new();
    for k in BASE_KINDS {
        kinds.push(k.name().to_string());
        kinds.push(format!("{}-diagonalizable", k.name()));
        kinds.push(format!("{}-nonnormal", k.name()));
    }
    kinds.extend(["symplectic", "perplectic", "counterexample", "block-example"].map(String::from));
    kinds
}

pub fn generate_matrix(kind: &str, n: usize, seed: u64) -> Result<ComplexMatrix, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let base = |name: &str| BASE_KINDS.into_iter().find(|k| k.name() == name);
    if let Some(k) = base(kind) {
        return Ok(random_structured(k, n, seed)?);
    }
    if let Some(k) = kind.strip_suffix("-diagonalizable").and_then(base) {
        return Ok(random_structured_diagonalizable(k, n, seed)?.matrix);
    }
    if let Some(k) = kind.strip_suffix("-nonnormal").and_then(base) {
        return Ok(random_structured_diagonalizable_nonnormal(k, n, seed)?.matrix);
    }
    let m = match kind {
        "symplectic" => random_automorphism(&InnerProduct::symplectic(n)?, seed)?,
        "perplectic" => random_automorphism(&InnerProduct::perplectic(n)?, seed)?,
        "counterexample" => {
            if n < 2 {
                return Err(CliError::Usage("counterexample needs --n 2 or larger".into()));
            }
            counterexample_unbalanced(n, seed)?
        }
        "block-example" => block_example(n, seed)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind '{other}'; expected one of {}",
                generator_kinds().join(", ")
            )))
        }
    };
    Ok(m)
}

/// Writes the matrix and prints `<sha256>  <path>` like `sha256sum`.
pub fn generate(kind: &str, n: usize, seed: u64, out: &Path) -> Outcome {
    let result = generate_matrix(kind, n, seed).and_then(|m| {
        let text = mtx::format_matrix(&m);
        std::fs::write(out, &text).map_err(|source| MtxError::Io {
            path: out.display().to_string(),
            source,
        })?;
        Ok(sha256_hex(&[text.as_bytes()]))
    });
    match result {
        Ok(hex) => Outcome {
            code: EXIT_OK,
            stdout: format!("{hex}  {}", out.display()),
            message: None,
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            message: Some(e.to_string()),
        },
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// `‖S^H B S − B‖` and the off-diagonal part of `S⁻¹ A S`, both relative.
pub fn diag_residuals(a: &ComplexMatrix, s: &ComplexMatrix, form: &InnerProduct, tol: &TolerancePolicy) -> Result<(f64, f64), CliError> {
    if s.nrows() != a.nrows() || s.ncols() != a.ncols() {
        return Err(CliError::Usage(format!(
            "transform is {}x{}, matrix is {}x{}",
            s.nrows(),
            s.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    let b = form.matrix();
    let automorphism = rel_residual(&(&(&s.herm_transpose() * b) * s), b)?;
    let similarity = match inverse(s, tol) {
        Ok(s_inv) => {
            let d = &(&s_inv * a) * s;
            rel_residual(&d, &ComplexMatrix::from_diagonal(&d.diagonal()))?
        }
        Err(_) => f64::INFINITY,
    };
    Ok((automorphism, similarity))
}

fn check_failures(residuals: &[(&str, f64)]) -> Vec<String> {
    residuals
        .iter()
        .filter(|(_, r)| !(*r <= VERIFY_TOL))
        .map(|(name, r)| format!("{name} residual {r:.3e} exceeds {VERIFY_TOL:e}"))
        .collect()
}

/// Re-checks factors written by `diagonalize` or `decompose` without
/// factorizing anything.
pub fn verify(a_file: &Path, factor_file: &Path, mode: VerifyMode, choice: FormChoice, sign: Option<Sign>, tol: &TolerancePolicy) -> Outcome {
    let (a_in, f_in) = match load(a_file).and_then(|a| Ok((a, load(factor_file)?))) {
        Ok(pair) => pair,
        Err((d, e)) => return failed("verify", d, e, Vec::new()),
    };
    let input_digest = digest(&[&a_in, &f_in]);
    let a = &a_in.matrix;
    let form = match form_for(choice, a) {
        Ok(f) => f,
        Err(e) => return failed("verify", input_digest, e, Vec::new()),
    };
    let checked = match mode {
        VerifyMode::Diag => diag_residuals(a, &f_in.matrix, &form, tol).map(|(auto, sim)| {
            let residuals = vec![("automorphism", auto), ("similarity", sim)];
            (check_failures(&residuals), residuals, None)
        }),
        VerifyMode::Decomp => verify_decomp(a, &f_in.matrix, &form, sign, tol),
    };
    let (failures, residuals, sign) = match checked {
        Ok(c) => c,
        Err(e) => return failed("verify", input_digest, e, structure_residuals(a, &form, tol)),
    };
    let passed = failures.is_empty();
    let message = (!passed).then(|| failures.join("; "));
    let doc = ReportDocument::new(
        "verify",
        input_digest,
        Payload::Verification(Verification {
            mode: match mode {
                VerifyMode::Diag => "diag",
                VerifyMode::Decomp => "decomp",
            }
            .to_string(),
            passed,
            sign: sign.map(|s: Sign| s.name().to_string()),
            failures,
        }),
    )
    .with_residuals(residuals);
    Outcome::document(if passed { EXIT_OK } else { EXIT_NEGATIVE }, &doc, message)
}

type Checked = (Vec<String>, Residuals, Option<Sign>);

fn verify_decomp(a: &ComplexMatrix, n: &ComplexMatrix, form: &InnerProduct, sign: Option<Sign>, tol: &TolerancePolicy) -> Result<Checked, CliError> {
    if n.nrows() != a.nrows() || n.ncols() != a.ncols() {
        return Err(CliError::Usage(format!("factor is {}x{}, matrix is {}x{}", n.nrows(), n.ncols(), a.nrows(), a.ncols())));
    }
    let sign = match sign {
        Some(s) => s,
        None => match variant_of(a, form, tol)? {
            Variant::Selfadjoint => Sign::Plus,
            Variant::Skewadjoint => Sign::Minus,
        },
    };
    let report = verify_factor(a, n, sign, form, tol)?;
    let mut residuals: Vec<(&'static str, f64)> = report.residuals.named().to_vec();
    residuals.push(("structure", report.structure));
    residuals.push(("normality_A", report.normality_a));
    Ok((report.failures, residuals, Some(sign)))
}
