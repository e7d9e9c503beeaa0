use super::modes::{coulomb_laplacian, sorted_eigen};
use super::{dimensionless_equilibrium, transverse_modes, ModeTable, TrapParams};
use crate::error::{Error, Result};
use crate::ionchain::equilibrium_positions;

const GRID: usize = 400;

/// Result of fitting the axial frequency to a measured transverse spectrum.
#[derive(Clone, Debug)]
pub struct AxialFit {
    pub nu_axial: f64,
    pub nu_com: f64,
    /// RMS difference between measured and model frequencies (Hz).
    pub rms_residual_hz: f64,
    pub params: TrapParams,
    pub modes: ModeTable,
}

/// Model frequencies `sqrt(nu_x^2 - s * lambda_k)` for `s = nu_axial^2`.
struct Spectrum {
    nu_com: f64,
    /// Laplacian eigenvalues in units of `w_z^2`, descending (so that the model
    /// frequencies come out ascending); only the compared ones are kept.
    lambdas: Vec<f64>,
    measured: Vec<f64>,
}

impl Spectrum {
    fn model(&self, s: f64, k: usize) -> f64 {
        (self.nu_com * self.nu_com - s * self.lambdas[k]).max(0.0).sqrt()
    }

    fn cost(&self, s: f64) -> f64 {
        (0..self.measured.len())
            .map(|k| (self.model(s, k) - self.measured[k]).powi(2))
            .sum()
    }

    fn s_max(&self) -> f64 {
        self.nu_com * self.nu_com / self.lambdas[0]
    }

    fn golden(&self, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (self.cost(x1), self.cost(x2));
        for _ in 0..200 {
            if (b - a).abs() <= 1e-14 * b.abs() {
                break;
            }
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = self.cost(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = self.cost(x2);
            }
        }
        0.5 * (a + b)
    }

    fn gauss_newton(&self, mut s: f64) -> f64 {
        for _ in 0..50 {
            let (mut num, mut den) = (0.0, 0.0);
            for k in 0..self.measured.len() {
                let nu = self.model(s, k);
                let r = nu - self.measured[k];
                let jac = -self.lambdas[k] / (2.0 * nu);
                num += r * jac;
                den += jac * jac;
            }
            if den == 0.0 {
                break;
            }
            let step = num / den;
            let trial = s - step;
            if !(trial > 0.0 && trial < self.s_max()) || self.cost(trial) > self.cost(s) {
                break;
            }
            s = trial;
            if step.abs() <= 1e-15 * s {
                break;
            }
        }
        s
    }
}

/// Least-squares axial frequency for a measured transverse spectrum (Hz).
///
/// With `n_ions` measured values the COM frequency is pinned to the largest one.
/// With `n_ions - 1` values the COM mode is taken as unmeasured, the COM frequency
/// is taken from `params`, and the values are compared to the lowest modes.
pub fn fit_axial_frequency(measured: &[f64], params: &TrapParams) -> Result<AxialFit> {
    let n = params.n_ions;
    if n < 2 {
        return Err(Error::invalid(
            "n_ions",
            "a single ion carries no information about the axial confinement",
        ));
    }
    if measured.len() != n && measured.len() != n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} measured frequencies for {} ions (expected {} or {})",
            measured.len(),
            n,
            n,
            n - 1
        )));
    }
    if measured.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::invalid("measured_freqs", "frequencies must be finite and > 0"));
    }
    let mut sorted = measured.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nu_com = if measured.len() == n {
        *sorted.last().unwrap()
    } else {
        params.nu_com_transverse
    };

    let u = dimensionless_equilibrium(n)?;
    let (lap_vals, _) = sorted_eigen(coulomb_laplacian(&u, 1.0));
    let mut lambdas: Vec<f64> = lap_vals.into_iter().rev().collect();
    lambdas.truncate(sorted.len());
    let spec = Spectrum {
        nu_com,
        lambdas,
        measured: sorted,
    };

    let s_max = spec.s_max();
    let grid: Vec<f64> = (0..GRID).map(|i| s_max * (i as f64 + 0.5) / GRID as f64).collect();
    let costs: Vec<f64> = grid.iter().map(|&s| spec.cost(s)).collect();
    let best = (0..GRID).min_by(|&a, &b| costs[a].total_cmp(&costs[b])).unwrap();
    if best == 0 || best == GRID - 1 {
        return Err(Error::SearchFailure(
            "least-squares minimum lies on the edge of the stable axial-frequency range".into(),
        ));
    }
    let s = spec.gauss_newton(spec.golden(grid[best - 1], grid[best + 1]));
    let rms = (spec.cost(s) / spec.measured.len() as f64).sqrt();

    let fitted = TrapParams {
        nu_axial: s.sqrt(),
        nu_com_transverse: nu_com,
        fixed_spacing: None,
        ..params.clone()
    };
    let modes = transverse_modes(&fitted, &equilibrium_positions(&fitted)?)?;
    Ok(AxialFit {
        nu_axial: fitted.nu_axial,
        nu_com,
        rms_residual_hz: rms,
        params: fitted,
        modes,
    })
}
