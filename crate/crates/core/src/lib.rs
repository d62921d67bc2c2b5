//! Non-Hermitian coupled-mode chains: complex spectra, exceptional points,
//! resultant winding numbers, no-jump dynamics and the analysis used to read
//! eigenenergies and entanglement back out of simulated traces.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod spectra;
pub mod state;
pub mod topology;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use model::{build_chain_hamiltonian, build_reference_model, ChainParams, ReferenceModel};
pub use state::StateVector;
