use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fits::{population_fidelity, total_variation};
use super::hamiltonian::{effective_bs_hamiltonian, DriveSpec};
use super::hilbert::TruncatedHilbert;
use super::lindblad::{phonon_distribution_rho, simulate_lindblad, NoiseModel};
use super::ode::OdeOptions;
use super::propagate::{phonon_distribution, simulate_bs_full, FullModelOptions, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ionchain::{assign_ion_for_pair, fit_axial_frequency, ModeTable, TrapParams};
use crate::linalg::{CMat, CVec};
use crate::network::{BeamSplitterSpec, PhysicalParams};

/// Two-mode beam splitter used for noise budgeting, in the effective
/// mode-space picture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetSetup {
    pub theta: f64,
    pub duration_s: f64,
    /// Include the assisting spin (needed for spin dephasing).
    pub with_spin: bool,
}

impl Default for BudgetSetup {
    fn default() -> Self {
        Self {
            theta: FRAC_PI_4,
            duration_s: 250e-6,
            with_spin: true,
        }
    }
}

/// Added population error of a noisy beam splitter: total-variation distance
/// between noisy and noiseless output phonon distributions for input `|1,0>`.
/// The per-mode cutoff starts at 3 and grows until leakage is negligible.
pub fn bs_population_error(noise: &NoiseModel, setup: &BudgetSetup) -> Result<f64> {
    let mut last = None;
    for cutoff in 3..=10 {
        match bs_population_error_at(noise, setup, cutoff) {
            Err(e @ Error::Truncation { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("loop ran"))
}

fn bs_population_error_at(noise: &NoiseModel, setup: &BudgetSetup, cutoff: u32) -> Result<f64> {
    let spin = setup.with_spin.then_some(0);
    let hil = TruncatedHilbert::new(vec![0, 1], vec![cutoff, cutoff], None, spin)?;
    let h = effective_bs_hamiltonian(&hil, 0, 1, setup.theta, 0.0, 1.0, setup.duration_s)?;
    let psi = hil.basis_state(&[1, 0], false)?;
    let rho0: CMat = &psi * psi.adjoint();
    let times = [setup.duration_s];
    let ode = OdeOptions::default();
    let ideal = simulate_lindblad(&h, &NoiseModel::default(), &hil, &rho0, &times, &ode)?;
    let noisy = simulate_lindblad(&h, noise, &hil, &rho0, &times, &ode)?;
    Ok(total_variation(
        &phonon_distribution_rho(&hil, &ideal[0]),
        &phonon_distribution_rho(&hil, &noisy[0]),
    ))
}

/// `(value, error)` rows for a family of noise models.
pub fn error_scan(
    values: &[f64],
    noise_for: impl Fn(f64) -> NoiseModel + Sync,
    setup: &BudgetSetup,
    exec: Exec,
) -> Result<Vec<(f64, f64)>> {
    exec.try_map_range(values.len(), |i| {
        let v = values[i];
        Ok((v, bs_population_error(&noise_for(v), setup)?))
    })
}

/// Chain and drive geometry for R1/R2 studies.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeSetup {
    pub modes: ModeTable,
    pub ion: usize,
    pub mode_m: usize,
    pub mode_n: usize,
    /// Average mode spacing entering `R2`, Hz.
    pub spacing_hz: f64,
    pub ramp_fraction: f64,
    pub carrier: bool,
    /// Stretch each pulse until both driven modes end equally populated,
    /// instead of using the leading-order duration.
    pub calibrate_duration: bool,
}

/// Ramp fraction used for landscape studies: full raised-sine edges.
pub const LANDSCAPE_RAMP: f64 = 0.5;

impl LandscapeSetup {
    /// `n_modes` modes spaced by `spacing_hz` above `lowest_hz`, one ion with
    /// Lamb-Dicke parameter `eta` on all of them, splitter on the lowest pair.
    pub fn equally_spaced(n_modes: usize, spacing_hz: f64, lowest_hz: f64, eta: f64) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::invalid("n_modes", "at least two modes are needed"));
        }
        Ok(Self {
            modes: ModeTable {
                frequencies: (0..n_modes).map(|k| lowest_hz + k as f64 * spacing_hz).collect(),
                mode_vectors: DMatrix::from_element(1, n_modes, 1.0),
                lamb_dicke: DMatrix::from_element(1, n_modes, eta),
            },
            ion: 0,
            mode_m: 0,
            mode_n: 1,
            spacing_hz,
            ramp_fraction: LANDSCAPE_RAMP,
            carrier: true,
            calibrate_duration: false,
        })
    }

    /// A real chain with its spectrum stretched about the highest mode so
    /// that the average spacing is `spacing_hz`; the ion is the best coupled
    /// one for the pair.
    pub fn rescaled_chain(modes: &ModeTable, spacing_hz: f64, mode_m: usize, mode_n: usize) -> Result<Self> {
        let f = &modes.frequencies;
        let m = f.len();
        if m < 2 {
            return Err(Error::invalid("modes", "at least two modes are needed"));
        }
        let top = f.iter().copied().fold(f64::MIN, f64::max);
        let bottom = f.iter().copied().fold(f64::MAX, f64::min);
        let avg = (top - bottom) / (m - 1) as f64;
        if !(avg > 0.0) {
            return Err(Error::invalid("modes", "spectrum is degenerate"));
        }
        let scale = spacing_hz / avg;
        let mut table = modes.clone();
        table.frequencies = f.iter().map(|v| top - (top - v) * scale).collect();
        let ion = assign_ion_for_pair(&table, mode_m, mode_n)?;
        Ok(Self {
            modes: table,
            ion,
            mode_m,
            mode_n,
            spacing_hz,
            ramp_fraction: LANDSCAPE_RAMP,
            carrier: true,
            calibrate_duration: false,
        })
    }

    /// The five-ion chain fitted to the measured spectrum, stretched to
    /// `spacing_hz`, splitter on the two lowest modes.
    pub fn five_ion(spacing_hz: f64) -> Result<Self> {
        let spectrum = crate::network::presets::FIVE_ION_SPECTRUM_HZ;
        let guess = TrapParams::yb171(5, spectrum[4], 0.4e6);
        let fit = fit_axial_frequency(&spectrum, &guess)?;
        Self::rescaled_chain(&fit.modes, spacing_hz, 0, 1)
    }

    /// Physical parameters of a 50:50 splitter at the given ratios:
    /// `Delta = spacing / R2`, `c = Delta / R1`, `T (1 - r) = R1^2 R2 / (2 spacing)`.
    pub fn physical(&self, r1: f64, r2: f64) -> Result<PhysicalParams> {
        if !(r1 > 0.0 && r2 > 0.0) {
            return Err(Error::invalid("R1/R2", "must be positive"));
        }
        let delta = self.spacing_hz / r2;
        let c = delta / r1;
        let p = PhysicalParams {
            delta_hz: delta,
            coupling_m_hz: c,
            coupling_n_hz: c,
            duration_s: r1 * r1 * r2 / (2.0 * self.spacing_hz) / (1.0 - self.ramp_fraction),
            ramp_fraction: self.ramp_fraction,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub r1: f64,
    pub r2: f64,
    pub fidelity: f64,
    pub duration_s: f64,
}

/// Noiseless 50:50 population fidelity for one `(R1, R2)` point, input
/// `|1_m>` with the spin down, all modes of the setup included.
///
/// With `calibrate_duration` the pulse is first stretched to balance the two
/// driven modes, so the fidelity measures only leakage into the spin,
/// spectators and carrier.
pub fn landscape_point(setup: &LandscapeSetup, r1: f64, r2: f64) -> Result<LandscapePoint> {
    let table = &setup.modes;
    let n_modes = table.n_modes();
    let base = setup.physical(r1, r2)?;
    let hil = TruncatedHilbert::for_phonons_total((0..n_modes).collect(), 1, Some(setup.ion))?;
    let mut occ = vec![0u32; n_modes];
    occ[setup.mode_m] = 1;
    let psi = hil.basis_state(&occ, false)?;
    let opts = FullModelOptions {
        carrier: setup.carrier,
        ..Default::default()
    };
    let (lm, ln) = (hil.local(setup.mode_m)?, hil.local(setup.mode_n)?);
    let run = |duration: f64| -> Result<(f64, Vec<f64>)> {
        let p = PhysicalParams {
            duration_s: duration,
            ..base
        };
        let spec = BeamSplitterSpec::from_physical(setup.mode_m, setup.mode_n, setup.ion, 0.0, p)?;
        let drive = DriveSpec::for_beamsplitter(&spec, table, setup.carrier)?;
        let traj = simulate_bs_full(&drive, table, &hil, &psi, &[duration], &opts)?;
        let pops = traj.mode_populations.last().expect("final sample");
        Ok((pops[lm] - pops[ln], phonon_distribution(&hil, traj.final_state())))
    };
    let duration = if setup.calibrate_duration {
        balance_duration(base.duration_s, |t| Ok(run(t)?.0))?
    } else {
        base.duration_s
    };
    let got = run(duration)?.1;
    let mut ideal = vec![0.0; got.len()];
    for k in [setup.mode_m, setup.mode_n] {
        let mut o = vec![0u32; n_modes];
        o[k] = 1;
        let i = hil.occupations().iter().position(|x| *x == o).expect("single-phonon state");
        ideal[i] = 0.5;
    }
    let s: f64 = got.iter().sum();
    let got: Vec<f64> = got.iter().map(|v| v / s).collect();
    Ok(LandscapePoint {
        r1,
        r2,
        fidelity: population_fidelity(&got, &ideal)?,
        duration_s: duration,
    })
}

/// Root of a decreasing imbalance `f(T)` near `t0`: geometric bracketing, then
/// Illinois regula falsi.
fn balance_duration(t0: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let step = 1.15;
    let (mut a, mut fa) = (t0, f(t0)?);
    let (mut b, mut fb) = (a, fa);
    for _ in 0..16 {
        b = if fa > 0.0 { b * step } else { b / step };
        fb = f(b)?;
        if fb.signum() != fa.signum() {
            break;
        }
        a = b;
        fa = fb;
    }
    if fb.signum() == fa.signum() {
        return Err(Error::SearchFailure("no pulse length balances the splitter".into()));
    }
    let mut side = 0i8;
    for _ in 0..40 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc.abs() < 1e-7 || (b - a).abs() < 1e-9 * t0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    Ok((a * fb - b * fa) / (fb - fa))
}

/// Fidelity/duration over the grid `r1s x r2s`, row-major in `r1`.
pub fn r1r2_landscape(setup: &LandscapeSetup, r1s: &[f64], r2s: &[f64], exec: Exec) -> Result<Vec<LandscapePoint>> {
    let n2 = r2s.len();
    exec.try_map_range(r1s.len() * n2, |i| landscape_point(setup, r1s[i / n2], r2s[i % n2]))
}

/// Two-mode reduction of a beam-splitter drive: the spin and the two driven
/// modes (cutoff `N + 2`), carrier included, spectators dropped.
pub fn reduced_bs_simulation(spec: &BeamSplitterSpec, chain: &ModeTable, samples: usize) -> Result<Trajectory> {
    let drive = DriveSpec::for_beamsplitter(spec, chain, true)?;
    let hil = TruncatedHilbert::for_phonons(vec![spec.mode_m, spec.mode_n], 1, Some(spec.ion))?;
    let psi = hil.basis_state(&[1, 0], false)?;
    let times = super::propagate::sample_times(drive.duration_s, samples);
    simulate_bs_full(&drive, chain, &hil, &psi, &times, &FullModelOptions::default())
}

/// Ramp fraction at which the reduced two-mode simulation of `spec` ends
/// with equal populations in both driven modes. Searched by bisection on
/// `[0, 0.5]`.
pub fn calibrate_ramp_fraction(spec: &BeamSplitterSpec, chain: &ModeTable) -> Result<f64> {
    let base = spec.physical.ok_or(Error::IncompleteSpec { index: 0 })?;
    let imbalance = |r: f64| -> Result<f64> {
        let mut s = spec.clone();
        s.physical = Some(PhysicalParams {
            ramp_fraction: r,
            ..base
        });
        let tr = reduced_bs_simulation(&s, chain, 1)?;
        let p = tr.mode_populations.last().expect("final sample");
        Ok(p[0] - p[1])
    };
    let (mut lo, mut hi) = (0.0, 0.5);
    let (flo, fhi) = (imbalance(lo)?, imbalance(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::SearchFailure(format!(
            "no ramp fraction in [0, 0.5] balances the splitter (imbalance {flo:.3} .. {fhi:.3})"
        )));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if imbalance(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Amplitudes of `|1_m>` and `|1_n>` (spin down) in a reduced-model state.
pub fn single_phonon_amplitudes(hil: &TruncatedHilbert, psi: &CVec) -> (crate::linalg::C64, crate::linalg::C64) {
    (
        super::propagate::amplitude(psi, hil, &[1, 0], false),
        super::propagate::amplitude(psi, hil, &[0, 1], false),
    )
}
