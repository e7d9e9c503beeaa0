use super::{bs_mode_unitary, BeamSplitterSpec, Compensation, InterferometerConfig};
use crate::error::{Error, Result};
use crate::ionchain::ModeTable;
use crate::linalg::{CMat, C64};
use std::f64::consts::PI;

/// Mode-frequency shifts (Hz) induced by one beam-splitter pulse at peak drive,
/// one entry per chain mode.
///
/// Each drive tone `t` (aimed at the red sideband of mode `t`) sits at detuning
/// `delta_{k,t} = Delta + nu_k - nu_t` from the red sideband of mode `k`. The two
/// driven modes get `(eta_{j,k}^2 / 4) sum_t Omega_t^2 / delta_{k,t}`; every other
/// mode gets `sum_t (eta_{j,k} Omega_t)^2 / (2 delta_{k,t})`.
pub fn ac_stark_shifts(spec: &BeamSplitterSpec, modes: &ModeTable) -> Result<Vec<f64>> {
    let p = spec.physical.as_ref().ok_or(Error::IncompleteSpec { index: 0 })?;
    let n_modes = modes.n_modes();
    for idx in [spec.mode_m, spec.mode_n] {
        if idx >= n_modes {
            return Err(Error::ModeOutOfRange { index: idx, n_modes });
        }
    }
    if spec.ion >= modes.n_ions() {
        return Err(Error::invalid("ion", format!("ion {} is not in the chain", spec.ion + 1)));
    }
    let j = spec.ion;
    let tones = [(spec.mode_m, p.coupling_m_hz), (spec.mode_n, p.coupling_n_hz)];
    let mut rabi = [0.0; 2];
    for (r, &(t, c)) in rabi.iter_mut().zip(&tones) {
        let eta = modes.eta(j, t);
        if eta == 0.0 {
            return Err(Error::invalid(
                "ion",
                format!("ion {} does not couple to mode {}", j + 1, t + 1),
            ));
        }
        *r = c / eta;
    }
    let nu = &modes.frequencies;
    let scale = p.delta_hz.abs().max(1.0);
    (0..n_modes)
        .map(|k| {
            let eta_k = modes.eta(j, k);
            let driven = k == spec.mode_m || k == spec.mode_n;
            let mut shift = 0.0;
            for (&(t, _), &omega) in tones.iter().zip(&rabi) {
                let detuning = p.delta_hz + nu[k] - nu[t];
                if detuning.abs() < 1e-12 * scale {
                    return Err(Error::Resonance { mode: k, tone: t });
                }
                let coupling2 = (eta_k * omega).powi(2);
                shift += if driven {
                    coupling2 / (4.0 * detuning)
                } else {
                    coupling2 / (2.0 * detuning)
                };
            }
            Ok(shift)
        })
        .collect()
}

/// Phase (rad) each mode accumulates during each pulse:
/// `2 pi s shift_k T (1 - r)`, the time integral of the shift under the squared envelope.
pub fn stark_phases(config: &InterferometerConfig, modes: &ModeTable) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    if config.n_modes > modes.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} network modes but only {} chain modes",
            config.n_modes,
            modes.n_modes()
        )));
    }
    config
        .beamsplitters
        .iter()
        .enumerate()
        .map(|(index, bs)| {
            let p = bs.physical.as_ref().ok_or(Error::IncompleteSpec { index })?;
            let shifts = ac_stark_shifts(bs, modes)?;
            let area = 2.0 * PI * p.effective_duration() * bs.spin_sign;
            Ok(shifts[..config.n_modes].iter().map(|s| s * area).collect())
        })
        .collect()
}

/// Offsets each phase by the Stark phases accumulated on its two modes during all
/// earlier pulses: `phi_b -> phi_b - (Phi_m - Phi_n)`. Angles are left untouched.
/// A configuration already marked [`Compensation::Analytic`] is returned unchanged.
pub fn compensate_phases(config: &InterferometerConfig, modes: &ModeTable) -> Result<InterferometerConfig> {
    if config.compensation == Compensation::Analytic {
        return Ok(config.clone());
    }
    let phases = stark_phases(config, modes)?;
    let mut out = config.clone();
    let mut acc = vec![0.0; config.n_modes];
    for (bs, kick) in out.beamsplitters.iter_mut().zip(&phases) {
        bs.phi -= acc[bs.mode_m] - acc[bs.mode_n];
        for (a, k) in acc.iter_mut().zip(kick) {
            *a += k;
        }
    }
    out.compensation = Compensation::Analytic;
    Ok(out)
}

/// Mode propagator including the Stark phase kick `diag(e^{-i Phi_k})` after each
/// pulse. With compensated phases this equals the ideal propagator up to output phases.
pub fn compose_with_stark_phases(config: &InterferometerConfig, modes: &ModeTable) -> Result<CMat> {
    let phases = stark_phases(config, modes)?;
    let m = config.n_modes;
    let mut u = CMat::identity(m, m);
    for (bs, kick) in config.beamsplitters.iter().zip(&phases) {
        let mut step = bs_mode_unitary(bs, m)?;
        for (k, phi) in kick.iter().enumerate() {
            let f = C64::from_polar(1.0, -phi);
            step.row_mut(k).iter_mut().for_each(|x| *x *= f);
        }
        u = step * u;
    }
    Ok(u)
}
