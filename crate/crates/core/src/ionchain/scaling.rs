use serde::{Deserialize, Serialize};

use super::modes::{coulomb_laplacian, sorted_eigen};
use super::{dimensionless_equilibrium, Chain, TrapParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::units;

const ZETA3: f64 = 1.202_056_903_159_594_3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingMode {
    Harmonic,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityStats {
    pub n_ions: usize,
    /// Fraction of mode pairs whose best single-ion product reaches `1/N`.
    pub fraction_above_threshold: f64,
    /// Mean of `max_j |b_jm b_jn|` over pairs, in units of `eta^2`.
    pub mean_best_product: f64,
    pub std_best_product: f64,
}

pub fn connectivity_stats(n_ions: usize, spacing: SpacingMode) -> Result<ConnectivityStats> {
    connectivity_stats_with(n_ions, spacing, Exec::default())
}

/// Best-ion coupling products over all mode pairs.
///
/// Mode vectors depend only on the chain geometry, so no trap frequencies are needed.
pub fn connectivity_stats_with(
    n_ions: usize,
    spacing: SpacingMode,
    exec: Exec,
) -> Result<ConnectivityStats> {
    if n_ions < 2 {
        return Err(Error::invalid("n_ions", "connectivity needs at least two ions"));
    }
    let z: Vec<f64> = match spacing {
        SpacingMode::Harmonic => dimensionless_equilibrium(n_ions)?,
        SpacingMode::Equal => (0..n_ions).map(|i| i as f64).collect(),
    };
    let (_, b) = sorted_eigen(coulomb_laplacian(&z, 1.0));
    let per_mode: Vec<Vec<f64>> = exec.map_range(n_ions, |m| {
        (m + 1..n_ions)
            .map(|n| {
                (0..n_ions)
                    .map(|j| (b[(j, m)] * b[(j, n)]).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    });
    let best: Vec<f64> = per_mode.into_iter().flatten().collect();
    let threshold = 1.0 / n_ions as f64;
    let count = best.len() as f64;
    let above = best.iter().filter(|&&p| p >= threshold * (1.0 - 1e-9)).count() as f64;
    let mean = best.iter().sum::<f64>() / count;
    let var = best.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / count;
    Ok(ConnectivityStats {
        n_ions,
        fraction_above_threshold: above / count,
        mean_best_product: mean,
        std_best_product: var.sqrt(),
    })
}

/// Average transverse mode spacing `(nu_com - nu_min) / N`.
pub fn spacing_estimate(nu_com: f64, nu_min: f64, n_ions: usize) -> Result<f64> {
    if n_ions < 2 {
        return Err(Error::invalid("n_ions", "mode spacing is undefined for a single ion"));
    }
    Ok((nu_com - nu_min) / n_ions as f64)
}

/// Lowest (zig-zag) transverse frequency of an infinite chain with spacing `d`,
/// `sqrt(w_x^2 - (7/2) zeta(3) e^2 / (4 pi eps0 m d^3)) / 2 pi`.
pub fn zigzag_frequency_estimate(nu_com: f64, ion_mass: f64, spacing: f64) -> Result<f64> {
    let wx = units::angular(nu_com);
    let k0 = units::coulomb_constant() / (ion_mass * spacing.powi(3));
    let w2 = wx * wx - 3.5 * ZETA3 * k0;
    if w2 <= 0.0 {
        return Err(Error::Instability {
            mode: 0,
            omega_sq: w2,
        });
    }
    Ok(w2.sqrt() / units::angular(1.0))
}

/// Duration of a 50:50 beam splitter at the given `R1`, `R2` and mode spacing:
/// `R1^2 R2 / (2 dnu) / (1 - ramp_fraction)`.
pub fn fifty_fifty_duration(r1: f64, r2: f64, mode_spacing_hz: f64, ramp_fraction: f64) -> f64 {
    r1 * r1 * r2 / (2.0 * mode_spacing_hz) / (1.0 - ramp_fraction)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingRow {
    pub n_ions: usize,
    pub nu_com_hz: f64,
    pub nu_min_hz: f64,
    /// Exact `(max - min) / N` from the eigensolve.
    pub spacing_hz: f64,
    pub nu_min_estimate_hz: f64,
    /// `(nu_com - nu_min_estimate) / N`.
    pub spacing_estimate_hz: f64,
}

/// Exact and estimated average mode spacing for each chain length.
///
/// The estimate uses the infinite-chain zig-zag frequency with the chain's
/// smallest ion spacing.
pub fn mode_spacing_scaling(n_range: &[usize], params: &TrapParams, exec: Exec) -> Result<Vec<SpacingRow>> {
    exec.try_map_range(n_range.len(), |i| {
        let n = n_range[i];
        if n < 2 {
            return Err(Error::invalid("n_ions", "mode spacing is undefined for a single ion"));
        }
        let chain = Chain::new(params.with_ions(n))?;
        let f = &chain.modes.frequencies;
        let (nu_min, nu_com) = (f[0], f[n - 1]);
        let d_min = chain
            .positions
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let est_min = zigzag_frequency_estimate(nu_com, params.ion_mass, d_min)?;
        Ok(SpacingRow {
            n_ions: n,
            nu_com_hz: nu_com,
            nu_min_hz: nu_min,
            spacing_hz: (nu_com - nu_min) / n as f64,
            nu_min_estimate_hz: est_min,
            spacing_estimate_hz: (nu_com - est_min) / n as f64,
        })
    })
}
