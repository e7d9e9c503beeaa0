//! Time-domain simulations: the full laser-driven beam-splitter Hamiltonian
//! with spin, carrier and spectator modes; Lindblad noise; thermal-state and
//! heating-rate analysis; fidelity fits and parameter sweeps.
//!
//! Frequencies in public types are in Hz; Hamiltonians are built in rad/s.

pub mod fits;
pub mod hamiltonian;
pub mod hilbert;
pub mod lindblad;
pub mod ode;
pub mod propagate;
pub mod sweeps;
pub mod thermal;

pub use fits::{fit_fidelity_decay, linear_fit, population_fidelity, total_variation, FidelityDecay, LinearFit};
pub use hamiltonian::{drive_hamiltonian, effective_bs_hamiltonian, Coefficient, DriveSpec, Envelope, Hamiltonian, Tone};
pub use hilbert::{SparseOp, TruncatedHilbert};
pub use lindblad::{check_density, phonon_distribution_rho, simulate_lindblad, HeatingChannel, NoiseModel};
pub use ode::{integrate, OdeOptions};
pub use propagate::{
    phonon_distribution, propagate_state, sample_times, simulate_bs_full, FullModelOptions, Trajectory, LEAKAGE_LIMIT,
};
pub use sweeps::{
    bs_population_error, calibrate_ramp_fraction, error_scan, landscape_point, r1r2_landscape, reduced_bs_simulation,
    single_phonon_amplitudes, BudgetSetup, LandscapePoint, LandscapeSetup, LANDSCAPE_RAMP,
};
pub use thermal::{
    bsb_signal, fit_heating, fit_nbar, thermal_cutoff, thermal_distribution, thermal_state, BsbModel, BsbTrace,
    HeatingFit,
};
