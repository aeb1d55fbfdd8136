//! Shared inputs for the benchmarks.

use structdiag_core::generators::{random_structured_diagonalizable, PlantedInstance};
use structdiag_core::Structure;

/// Half-dimensions benchmarked for every kind.
pub const SIZES: [usize; 4] = [2, 4, 8, 16];

pub const KINDS: [Structure; 2] = [Structure::Hamiltonian, Structure::PerHermitian];

/// A fixed planted instance so every run measures the same matrix.
pub fn instance(kind: Structure, n: usize) -> PlantedInstance {
    random_structured_diagonalizable(kind, n, 42).expect("generator accepts n >= 1")
}
