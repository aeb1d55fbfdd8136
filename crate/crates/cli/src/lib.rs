//! Command-line front end: `analyze`, `diagonalize`, `decompose`, `generate`
//! and `verify` over Matrix Market files, with JSON reports on stdout.
//!
//! Exit codes: 0 success, 1 mathematical negative (not structured, not
//! diagonalizable, verification failed), 2 IO or parse error, 3 numerical
//! breakdown.

// `!(r <= tol)` is deliberate: a NaN residual must fail the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use structdiag_core::Sign;

pub mod commands;
pub mod mtx;
pub mod report;

use commands::{FormChoice, Outcome, VerifyMode};

#[derive(Debug, Parser)]
#[command(name = "structdiag", version, about = "Symplectic and perplectic structure-preserving diagonalization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Structure tolerance (relative Frobenius residual).
    #[arg(long, global = true, env = "STRUCTDIAG_TOL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Symplectic,
    Perplectic,
    Euclidean,
}

impl From<FormArg> for FormChoice {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Symplectic => FormChoice::Symplectic,
            FormArg::Perplectic => FormChoice::Perplectic,
            FormArg::Euclidean => FormChoice::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Diag,
    Decomp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify matrices and decide structured diagonalizability.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Exit 1 unless the matrix has this structure (e.g. hamiltonian).
        #[arg(long)]
        expect: Option<String>,
        /// Number of files analyzed in parallel.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compute S with S^H B S = B and S^-1 A S diagonal.
    Diagonalize {
        file: PathBuf,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Require a unitary S (input must be normal).
        #[arg(long)]
        unitary: bool,
        /// Write <PREFIX>.S.mtx and <PREFIX>.D.mtx.
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Split a normal structured A into N ± N⋆ with N N⋆ = N⋆ N = 0.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Write <PREFIX>.N.mtx.
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Write a seeded random instance and print its SHA-256.
    Generate {
        /// e.g. hamiltonian, per-hermitian-diagonalizable, counterexample.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        out: PathBuf,
    },
    /// Re-check factors against the input without refactorizing.
    Verify {
        matrix: PathBuf,
        /// S for --mode diag, N for --mode decomp.
        factor: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Sign of A = N ± N⋆; inferred from A when omitted.
        #[arg(long, value_enum)]
        sign: Option<SignArg>,
    },
}

pub fn run(cli: Cli) -> Outcome {
    let tol = match commands::tolerance(cli.tol) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                code: e.exit_code(),
                stdout: String::new(),
                message: Some(e.to_string()),
            }
        }
    };
    match cli.command {
        Command::Analyze { files, form, expect, jobs } => {
            commands::analyze(&files, form.into(), expect.as_deref(), jobs, &tol)
        }
        Command::Diagonalize { file, form, unitary, out } => {
            commands::diagonalize(&file, form.into(), unitary, out.as_deref(), &tol)
        }
        Command::Decompose { file, form, out } => commands::decompose(&file, form.into(), out.as_deref(), &tol),
        Command::Generate { kind, n, seed, out } => commands::generate(&kind, n, seed, &out),
        Command::Verify { matrix, factor, mode, form, sign } => {
            let mode = match mode {
                ModeArg::Diag => VerifyMode::Diag,
                ModeArg::Decomp => VerifyMode::Decomp,
            };
            let sign = sign.map(|s| match s {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            });
            commands::verify(&matrix, &factor, mode, form.into(), sign, &tol)
        }
    }
}
