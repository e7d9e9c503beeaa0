//! Linear Coulomb chains: equilibrium, transverse normal modes, ion assignment and
//! large-chain scaling.

mod assign;
mod equilibrium;
mod fit;
mod modes;
mod scaling;

pub use assign::{assign_ion_for_mode, assign_ion_for_pair};
pub use equilibrium::{dimensionless_equilibrium, equilibrium_positions, length_scale};
pub use fit::{fit_axial_frequency, AxialFit};
pub use modes::{transverse_modes, Chain, ChainReport, ModeReport, ModeTable};
pub use scaling::{
    connectivity_stats, connectivity_stats_with, fifty_fifty_duration, mode_spacing_scaling,
    spacing_estimate, zigzag_frequency_estimate, ConnectivityStats, SpacingMode, SpacingRow,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    pub n_ions: usize,
    /// Transverse centre-of-mass frequency (Hz).
    pub nu_com_transverse: f64,
    /// Axial trap frequency (Hz). Unused when `fixed_spacing` is set.
    pub nu_axial: f64,
    /// Equal ion spacing (m); bypasses the harmonic equilibrium solve.
    pub fixed_spacing: Option<f64>,
    pub ion_mass: f64,
    /// Net Raman wavevector along the transverse direction (1/m).
    pub raman_wavevector: f64,
}

impl TrapParams {
    /// Harmonic 171Yb+ chain driven by 355 nm Raman beams.
    pub fn yb171(n_ions: usize, nu_com_transverse: f64, nu_axial: f64) -> Self {
        Self {
            n_ions,
            nu_com_transverse,
            nu_axial,
            fixed_spacing: None,
            ion_mass: units::YB171_MASS,
            raman_wavevector: units::RAMAN_355_WAVEVECTOR,
        }
    }

    /// Equally spaced 171Yb+ chain.
    pub fn yb171_equal(n_ions: usize, nu_com_transverse: f64, spacing: f64) -> Self {
        Self {
            fixed_spacing: Some(spacing),
            ..Self::yb171(n_ions, nu_com_transverse, 0.0)
        }
    }

    pub fn with_ions(&self, n_ions: usize) -> Self {
        Self {
            n_ions,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
            }
        };
        if self.n_ions == 0 {
            return Err(Error::invalid("n_ions", "must be at least 1"));
        }
        positive("nu_com_transverse", self.nu_com_transverse)?;
        positive("ion_mass", self.ion_mass)?;
        positive("raman_wavevector", self.raman_wavevector)?;
        match self.fixed_spacing {
            Some(d) => positive("fixed_spacing", d)?,
            None => {
                positive("nu_axial", self.nu_axial)?;
                if self.nu_axial >= self.nu_com_transverse {
                    return Err(Error::invalid(
                        "nu_axial",
                        format!(
                            "must be below the transverse COM frequency ({} Hz >= {} Hz)",
                            self.nu_axial, self.nu_com_transverse
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}
