//! Beam splitters, interferometer composition, ac Stark phase bookkeeping and
//! binary fluorescence detection.
//!
//! Angles are radians internally. A beam splitter with angle `theta` transfers
//! `sin^2(theta)` of a single phonon, so `theta = pi/4` is 50:50. Files and presets
//! use the tabulated notation in which the listed angle is `2 theta` in units of pi
//! (`0.5` is 50:50) and the phase is `phi` in units of pi.

mod beamsplitter;
mod config;
mod detection;
pub mod presets;
mod stark;

pub use beamsplitter::{bs_angle_from_params, bs_mode_unitary, BeamSplitterSpec, PhysicalParams};
pub use config::{
    compose_interferometer, BeamSplitterEntry, Compensation, ConfigFile, InterferometerConfig,
};
pub use detection::{
    binary_pattern_distribution, correct_readout, infer_fock_from_binary, Confusion,
    CorrectedReadout, DetectionModel, Pattern,
};
pub use stark::{ac_stark_shifts, compensate_phases, compose_with_stark_phases, stark_phases};

/// Internal angle (rad) from the tabulated angle in units of pi.
pub fn theta_from_table(pi_units: f64) -> f64 {
    pi_units * std::f64::consts::FRAC_PI_2
}

/// Tabulated angle (units of pi) from the internal angle.
pub fn theta_to_table(theta: f64) -> f64 {
    theta / std::f64::consts::FRAC_PI_2
}
