use serde::{Deserialize, Serialize};

use super::hamiltonian::{drive_hamiltonian, DriveSpec, Hamiltonian};
use super::hilbert::TruncatedHilbert;
use super::ode::{integrate, OdeOptions};
use crate::error::{Error, Result};
use crate::ionchain::ModeTable;
use crate::linalg::{CVec, C64};

/// Largest tolerated population on the truncation edge.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullModelOptions {
    /// Include the off-resonant carrier terms.
    pub carrier: bool,
    pub ode: OdeOptions,
}

impl Default for FullModelOptions {
    fn default() -> Self {
        Self {
            carrier: true,
            ode: OdeOptions::default(),
        }
    }
}

/// Time series produced by [`simulate_bs_full`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<CVec>,
    /// Mean phonon number of every included mode at each time.
    pub mode_populations: Vec<Vec<f64>>,
    /// Spin-up population at each time.
    pub spin_up: Vec<f64>,
    /// `atan2(sqrt(<n_n>), sqrt(<n_m>))` for the first two driven modes.
    pub theta: Vec<f64>,
    pub max_leakage: f64,
    pub max_norm_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &CVec {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// Integrates the Schrodinger equation, checking truncation leakage at every
/// output time.
pub fn propagate_state(
    h: &Hamiltonian,
    hilbert: &TruncatedHilbert,
    initial: &CVec,
    times: &[f64],
    ode: &OdeOptions,
) -> Result<Vec<CVec>> {
    if initial.len() != h.dim() || hilbert.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for a {}-dimensional space",
            initial.len(),
            h.dim()
        )));
    }
    let out = integrate(
        |t, y, dy| h.schrodinger_rhs(t, y, dy),
        0.0,
        initial.as_slice(),
        times,
        h.breakpoints(),
        ode,
    )?;
    let states: Vec<CVec> = out.into_iter().map(CVec::from_vec).collect();
    for s in &states {
        let leak = hilbert.edge_population(|i| s[i].norm_sqr());
        if leak > LEAKAGE_LIMIT {
            return Err(Error::Truncation {
                leakage: leak,
                limit: LEAKAGE_LIMIT,
            });
        }
    }
    Ok(states)
}

/// Full time-domain beam-splitter simulation with spin, carrier and
/// red-sideband terms on every mode of `hilbert`.
pub fn simulate_bs_full(
    drive: &DriveSpec,
    chain: &ModeTable,
    hilbert: &TruncatedHilbert,
    initial: &CVec,
    times: &[f64],
    opts: &FullModelOptions,
) -> Result<Trajectory> {
    let h = drive_hamiltonian(drive, chain, hilbert, opts.carrier)?;
    let states = propagate_state(&h, hilbert, initial, times, &opts.ode)?;
    let n0 = initial.norm_squared();
    let pair: Vec<usize> = drive
        .tones
        .iter()
        .take(2)
        .map(|t| hilbert.local(t.mode))
        .collect::<Result<_>>()?;
    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(states.len()),
        mode_populations: Vec::with_capacity(states.len()),
        spin_up: Vec::with_capacity(states.len()),
        theta: Vec::with_capacity(states.len()),
        max_leakage: 0.0,
        max_norm_drift: 0.0,
    };
    for s in states {
        let prob = |i: usize| s[i].norm_sqr();
        let occ = hilbert.occupations();
        let mut pops = vec![0.0; hilbert.n_modes()];
        let mut up = 0.0;
        for i in 0..hilbert.dim() {
            let (o, spin_up) = hilbert.split(i);
            let p = prob(i);
            for (k, &n) in occ[o].iter().enumerate() {
                pops[k] += p * f64::from(n);
            }
            if spin_up {
                up += p;
            }
        }
        let theta = if pair.len() == 2 {
            pops[pair[1]].sqrt().atan2(pops[pair[0]].sqrt())
        } else {
            0.0
        };
        traj.max_leakage = traj.max_leakage.max(hilbert.edge_population(prob));
        traj.max_norm_drift = traj.max_norm_drift.max((s.norm_squared() - n0).abs());
        traj.mode_populations.push(pops);
        traj.spin_up.push(up);
        traj.theta.push(theta);
        traj.states.push(s);
    }
    Ok(traj)
}

/// Evenly spaced sample times `0, T/n, ..., T`.
pub fn sample_times(duration: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| duration * i as f64 / n as f64).collect()
}

/// Phonon-number distribution (spin traced out) of a pure state.
pub fn phonon_distribution(hilbert: &TruncatedHilbert, psi: &CVec) -> Vec<f64> {
    hilbert.occupation_probabilities(|i| psi[i].norm_sqr())
}

pub(crate) fn amplitude(psi: &CVec, hilbert: &TruncatedHilbert, occ: &[u32], spin_up: bool) -> C64 {
    hilbert.index(occ, spin_up).map_or(C64::default(), |i| psi[i])
}
