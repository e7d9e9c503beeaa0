use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fits::{golden_section, linear_fit, LinearFit};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Largest tolerated thermal mass above the cutoff.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-8;

/// Occupation probabilities `nbar^n / (nbar + 1)^(n + 1)` for `n <= cutoff`,
/// renormalized.
pub fn thermal_distribution(nbar: f64, cutoff: usize) -> Result<Vec<f64>> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::invalid("nbar", "must be finite and non-negative"));
    }
    let q = nbar / (nbar + 1.0);
    let tail = q.powi(cutoff as i32 + 1);
    if tail > THERMAL_TAIL_LIMIT {
        return Err(Error::Truncation {
            leakage: tail,
            limit: THERMAL_TAIL_LIMIT,
        });
    }
    let mut p = Vec::with_capacity(cutoff + 1);
    let mut v = 1.0 / (nbar + 1.0);
    for _ in 0..=cutoff {
        p.push(v);
        v *= q;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    Ok(p)
}

/// Smallest cutoff whose thermal tail is below `tail`.
pub fn thermal_cutoff(nbar: f64, tail: f64) -> usize {
    if nbar <= 0.0 {
        return 0;
    }
    let q = nbar / (nbar + 1.0);
    ((tail.ln() / q.ln()).ceil() as usize).saturating_sub(1)
}

/// Single-mode thermal density matrix on `0..=cutoff` phonons.
pub fn thermal_state(nbar: f64, cutoff: usize) -> Result<CMat> {
    let p = thermal_distribution(nbar, cutoff)?;
    Ok(CMat::from_diagonal(&p.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>().into()))
}

/// Blue-sideband excitation `P_up(t) = sum_n p_n (1 - e^{-gamma t} cos(sqrt(n+1) Omega t)) / 2`
/// for a thermal distribution, with `Omega = 2 pi rabi_hz`. `gamma = 0` gives
/// `sum_n p_n sin^2(sqrt(n+1) Omega t / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsbModel {
    pub rabi_hz: f64,
    /// Contrast decay rate, 1/s.
    pub decay: f64,
}

impl BsbModel {
    pub fn new(rabi_hz: f64) -> Self {
        Self { rabi_hz, decay: 0.0 }
    }

    pub fn signal(&self, nbar: f64, t: f64) -> f64 {
        let cutoff = thermal_cutoff(nbar, 1e-12).max(1);
        let p = thermal_distribution(nbar, cutoff).expect("cutoff chosen to satisfy the tail bound");
        self.signal_with(&p, t)
    }

    pub fn signal_with(&self, p: &[f64], t: f64) -> f64 {
        let w = 2.0 * PI * self.rabi_hz * t;
        let c = (-self.decay * t).exp();
        p.iter()
            .enumerate()
            .map(|(n, pn)| pn * 0.5 * (1.0 - c * (((n + 1) as f64).sqrt() * w).cos()))
            .sum()
    }

    pub fn trace(&self, nbar: f64, times: &[f64]) -> Vec<f64> {
        let cutoff = thermal_cutoff(nbar, 1e-12).max(1);
        let p = thermal_distribution(nbar, cutoff).expect("cutoff chosen to satisfy the tail bound");
        times.iter().map(|&t| self.signal_with(&p, t)).collect()
    }
}

/// Blue-sideband signal of a thermal state.
pub fn bsb_signal(nbar: f64, rabi_hz: f64, t: f64) -> f64 {
    BsbModel::new(rabi_hz).signal(nbar, t)
}

/// One BSB time trace taken after a heating wait.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsbTrace {
    pub wait_s: f64,
    pub times_s: Vec<f64>,
    pub p_up: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatingFit {
    /// `(wait_s, nbar)` per trace.
    pub nbar: Vec<(f64, f64)>,
    /// Heating rate, quanta/s.
    pub rate: f64,
    pub rate_stderr: f64,
    /// 95% confidence interval of the rate.
    pub rate_ci95: (f64, f64),
    pub line: LinearFit,
}

/// Upper end of the per-trace `nbar` search.
pub const NBAR_SEARCH_MAX: f64 = 30.0;

/// Least-squares `nbar` for a single trace.
pub fn fit_nbar(model: &BsbModel, times: &[f64], p_up: &[f64]) -> Result<f64> {
    if times.len() != p_up.len() || times.len() < 3 {
        return Err(Error::FitFailure("a BSB trace needs at least three matched samples".into()));
    }
    let mean = p_up.iter().sum::<f64>() / p_up.len() as f64;
    let var = p_up.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / p_up.len() as f64;
    if var < 1e-10 {
        return Err(Error::FitFailure("BSB trace is flat".into()));
    }
    let sse = |nbar: f64| -> f64 {
        model
            .trace(nbar, times)
            .iter()
            .zip(p_up)
            .map(|(a, b)| (a - b).powi(2))
            .sum()
    };
    let grid: Vec<f64> = (0..=120).map(|i| NBAR_SEARCH_MAX * (i as f64 / 120.0).powi(2)).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, sse(x)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    Ok(golden_section(sse, lo, hi, 1e-9).max(0.0))
}

/// Fits `nbar` for every trace and a linear heating rate across wait times.
pub fn fit_heating(traces: &[BsbTrace], model: &BsbModel) -> Result<HeatingFit> {
    if traces.len() < 2 {
        return Err(Error::FitFailure("heating fit needs at least two wait times".into()));
    }
    let nbar: Vec<(f64, f64)> = traces
        .iter()
        .map(|tr| Ok((tr.wait_s, fit_nbar(model, &tr.times_s, &tr.p_up)?)))
        .collect::<Result<_>>()?;
    let (w, n): (Vec<f64>, Vec<f64>) = nbar.iter().copied().unzip();
    let line = linear_fit(&w, &n)?;
    Ok(HeatingFit {
        nbar,
        rate: line.slope,
        rate_stderr: line.slope_stderr,
        rate_ci95: line.slope_interval(0.95),
        line,
    })
}
