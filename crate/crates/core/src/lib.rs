//! Desk-scale simulation of a programmable trapped-ion phononic network.
//!
//! The crate follows the life of a phonon through the network:
//!
//! - [`ionchain`]: equilibrium positions and transverse normal modes of a linear
//!   ion chain, ion/mode assignment and large-chain scaling studies.
//! - [`fock`]: fixed-phonon-number Fock sectors, permanents and the lifting of
//!   mode unitaries to Fock space.
//! - [`network`]: physically parameterized beam splitters, interferometer
//!   composition, ac Stark phase compensation and binary detection.
//! - [`dynamics`]: time-domain simulations (full sideband Hamiltonian, Lindblad
//!   noise), thermal-state thermometry and fidelity fits.
//! - [`tomography`]: boson-sampling tomography (superoperator, configuration
//!   optimization, linear inversion and maximum-likelihood projection).
//!
//! Frequencies are ordinary frequencies in Hz throughout the public API; the
//! conversion to angular frequency happens inside the dynamics and beam-splitter
//! code. Mode and ion indices are 0-based in the API and 1-based in files and
//! command-line output.
//!
//! Data-parallel loops (lifting rows, sweeps, Monte Carlo seeds, multi-start
//! optimization) run on rayon when the `parallel` feature is enabled (default)
//! and sequentially otherwise; see [`Exec`].

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod fock;
pub mod ionchain;
pub mod linalg;
pub mod network;
pub mod tomography;
pub mod units;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{CMat, CVec, C64};

/// Crate version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
