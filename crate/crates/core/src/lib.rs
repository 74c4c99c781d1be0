//! Noise studies of the variational quantum eigensolver on small molecular Hamiltonians.
//!
//! The crate bundles a dense statevector/density-matrix simulator, Kraus noise
//! channels, the hardware-efficient and UCCSD ansatzes for H₂, a term-wise energy
//! estimator with exact, shot-sampled and noisy backends, six classical optimizers,
//! and the experiment drivers that sweep noise intensities and fit the resulting
//! noise-energy curves.

pub mod ansatz;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod hamiltonian;
pub mod noise;
pub mod optimize;
pub mod seed;
pub mod sim;

pub use ansatz::{build_ansatz, AnsatzKind, ParametrizedCircuit};
pub use error::{Error, Result};
pub use estimator::{estimate_energy, BackendConfig, BackendMode, EnergyEstimate, Estimator};
pub use hamiltonian::{h2_hamiltonian, Hamiltonian, PauliTerm, H2_GROUND_ENERGY};
pub use noise::NoiseModel;
pub use optimize::{OptimizationTrace, OptimizerConfig};
pub use sim::{DensityMatrix, GateOp, QuantumState, Statevector};

/// Version of this library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
