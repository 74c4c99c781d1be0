//! Dense statevector and density-matrix simulation on a handful of qubits.
//!
//! Conventions: little-endian basis indices (bit `i` is qubit `i`), bitstrings
//! printed qubit 0 first, and rotations `R_P(θ) = exp(-iθP/2)`.

mod channel;
mod eigen;
mod gate;
mod kernel;
mod matrix;
mod sample;
mod state;

pub use channel::{KrausChannel, COMPLETENESS_TOL};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, JACOBI_TOL};
pub use gate::{circuit_depth, GateKind, GateOp, Pauli, PauliString};
pub use kernel::PauliMasks;
pub(crate) use kernel::apply_local;
pub use matrix::{Matrix, C64};
pub use sample::{exact_distribution, format_bitstring, parse_bitstring, sample_counts, OutcomeSampler};
pub use state::{DensityMatrix, QuantumState, Statevector, NORM_TOL};
