//! Boson-sampling tomography of fixed-phonon-number states.
//!
//! An input state on a few modes is padded with vacuum ancillas, sent through one or
//! more interferometer settings and measured in the Fock basis. The map from input
//! density-matrix elements to the output probabilities of all settings is a linear
//! superoperator `L`; the state is recovered with its pseudo-inverse and projected
//! onto the physical states in Frobenius norm.

mod measure;
mod optimize;
mod reconstruct;
mod superop;

pub use measure::{
    exact_probabilities, probabilities_from_records, sample_counts, simulate_measurement, CountEntry,
    MeasurementOptions, MeasurementRecord, SimulatedMeasurement,
};
pub use optimize::{
    log_det_gram, optimize_configuration, ConfigTemplate, FreeParameter, OptimizeOptions,
    OptimizedConfiguration, ParameterKind,
};
pub use reconstruct::{
    fidelity_to_pure, ml_project, reconstruct, state_fidelity, ReconstructionResult,
    COND_LIMIT, SV_CUTOFF,
};
pub use superop::{build_superoperator, build_superoperator_with, SuperOperator, TomographySetup};
