use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Drive parameters of a beam splitter (ordinary frequencies, Hz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Detuning from the two red sidebands.
    pub delta_hz: f64,
    /// Sideband coupling `eta_{j,m} Omega_{j,m}` of mode m.
    pub coupling_m_hz: f64,
    pub coupling_n_hz: f64,
    pub duration_s: f64,
    /// Length of each raised-sine edge as a fraction of the pulse, in `[0, 0.5]`.
    pub ramp_fraction: f64,
}

impl PhysicalParams {
    /// Pulse length weighted by the squared envelope, `T (1 - r)`.
    pub fn effective_duration(&self) -> f64 {
        self.duration_s * (1.0 - self.ramp_fraction)
    }

    /// Peak effective beam-splitter rate `c_m c_n / (4 |Delta|)` in Hz.
    pub fn exchange_rate_hz(&self) -> f64 {
        (self.coupling_m_hz * self.coupling_n_hz).abs() / (4.0 * self.delta_hz.abs())
    }

    pub fn theta(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.exchange_rate_hz() * self.effective_duration()
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("delta_hz", self.delta_hz),
            ("coupling_m_hz", self.coupling_m_hz),
            ("coupling_n_hz", self.coupling_n_hz),
            ("duration_s", self.duration_s),
            ("ramp_fraction", self.ramp_fraction),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, "must be finite"));
            }
        }
        if self.duration_s < 0.0 {
            return Err(Error::invalid("duration_s", "must be >= 0"));
        }
        if !(0.0..=0.5).contains(&self.ramp_fraction) {
            return Err(Error::invalid("ramp_fraction", "must lie in [0, 0.5]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    pub mode_m: usize,
    pub mode_n: usize,
    /// Assisting ion (0-based).
    pub ion: usize,
    /// Mixing angle (rad); `pi/4` is 50:50.
    pub theta: f64,
    /// Phase (rad).
    pub phi: f64,
    /// Eigenvalue of `sigma_z` of the assisting ion during the pulse.
    pub spin_sign: f64,
    pub physical: Option<PhysicalParams>,
}

impl BeamSplitterSpec {
    pub fn new(mode_m: usize, mode_n: usize, ion: usize, theta: f64, phi: f64) -> Self {
        Self {
            mode_m,
            mode_n,
            ion,
            theta,
            phi,
            spin_sign: 1.0,
            physical: None,
        }
    }

    /// Spec whose angle follows from the drive parameters.
    pub fn from_physical(mode_m: usize, mode_n: usize, ion: usize, phi: f64, p: PhysicalParams) -> Result<Self> {
        let mut spec = Self::new(mode_m, mode_n, ion, 0.0, phi);
        spec.physical = Some(p);
        spec.theta = bs_angle_from_params(&spec)?;
        Ok(spec)
    }

    pub fn with_physical(mut self, p: PhysicalParams) -> Self {
        self.physical = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_m == self.mode_n {
            return Err(Error::InvalidPair {
                m: self.mode_m,
                n: self.mode_n,
            });
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        if self.spin_sign != 1.0 && self.spin_sign != -1.0 {
            return Err(Error::invalid("spin_sign", "must be +1 or -1"));
        }
        if let Some(p) = &self.physical {
            p.validate()?;
        }
        Ok(())
    }

    /// Relative mismatch between `theta` and the angle implied by the drive
    /// parameters, if any are attached.
    pub fn angle_mismatch(&self) -> Option<f64> {
        let p = self.physical.as_ref()?;
        if p.delta_hz == 0.0 {
            return None;
        }
        let implied = p.theta();
        let scale = implied.abs().max(self.theta.abs()).max(f64::MIN_POSITIVE);
        Some((self.theta - implied).abs() / scale)
    }
}

/// `theta = 2 pi c_m c_n T (1 - r) / (4 |Delta|)` in radians.
pub fn bs_angle_from_params(spec: &BeamSplitterSpec) -> Result<f64> {
    let p = spec.physical.as_ref().ok_or(Error::IncompleteSpec { index: 0 })?;
    p.validate()?;
    if p.delta_hz == 0.0 {
        return Err(Error::Resonance {
            mode: spec.mode_m,
            tone: spec.mode_n,
        });
    }
    Ok(p.theta())
}

/// Mode matrix of one beam splitter on `n_modes` modes:
/// `[[cos t, i s e^{i phi} sin t], [i s e^{-i phi} sin t, cos t]]` on rows/columns (m, n).
pub fn bs_mode_unitary(spec: &BeamSplitterSpec, n_modes: usize) -> Result<CMat> {
    spec.validate()?;
    for idx in [spec.mode_m, spec.mode_n] {
        if idx >= n_modes {
            return Err(Error::ModeOutOfRange { index: idx, n_modes });
        }
    }
    let (m, n) = (spec.mode_m, spec.mode_n);
    let (s, c) = spec.theta.sin_cos();
    let mut u = CMat::identity(n_modes, n_modes);
    let off = C64::new(0.0, spec.spin_sign * s);
    u[(m, m)] = C64::new(c, 0.0);
    u[(n, n)] = C64::new(c, 0.0);
    u[(m, n)] = off * C64::from_polar(1.0, spec.phi);
    u[(n, m)] = off * C64::from_polar(1.0, -spec.phi);
    Ok(u)
}
