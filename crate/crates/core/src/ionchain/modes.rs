use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{equilibrium_positions, TrapParams};
use crate::error::{Error, Result};
use crate::units;

/// Transverse normal modes of a chain, ordered by ascending frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeTable {
    /// Mode frequencies (Hz), ascending. The last entry is the COM mode.
    pub frequencies: Vec<f64>,
    /// `b[(j, m)]`: participation of ion `j` in mode `m`; columns are orthonormal.
    pub mode_vectors: DMatrix<f64>,
    /// `eta[(j, m)] = eta_m * b[(j, m)]`.
    pub lamb_dicke: DMatrix<f64>,
}

impl ModeTable {
    pub fn n_ions(&self) -> usize {
        self.mode_vectors.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn com_index(&self) -> usize {
        self.n_modes() - 1
    }

    pub fn eta(&self, ion: usize, mode: usize) -> f64 {
        self.lamb_dicke[(ion, mode)]
    }

    /// `max |B^T B - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let b = &self.mode_vectors;
        let g = b.transpose() * b;
        let n = g.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - t).abs());
            }
        }
        worst
    }
}

/// Graph Laplacian of the transverse Coulomb coupling for axial positions `z`,
/// scaled by `scale` (i.e. `L_ij = -scale / |z_i - z_j|^3`).
pub(crate) fn coulomb_laplacian(z: &[f64], scale: f64) -> DMatrix<f64> {
    let n = z.len();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let k = scale / (z[i] - z[j]).abs().powi(3);
                l[(i, j)] = -k;
                l[(i, i)] += k;
            }
        }
    }
    l
}

/// Eigenpairs of a real symmetric matrix with eigenvalues ascending and a
/// deterministic sign: the first significant component of each vector is positive.
pub(crate) fn sorted_eigen(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    for k in 0..n {
        let col = vectors.column(k);
        let peak = col.amax();
        let first = col.iter().copied().find(|x| x.abs() > 1e-6 * peak).unwrap_or(1.0);
        if first < 0.0 {
            vectors.column_mut(k).neg_mut();
        }
    }
    (values, vectors)
}

/// Transverse modes for the given axial positions (m).
pub fn transverse_modes(params: &TrapParams, positions: &[f64]) -> Result<ModeTable> {
    params.validate()?;
    if positions.len() != params.n_ions {
        return Err(Error::DimensionMismatch(format!(
            "{} positions for {} ions",
            positions.len(),
            params.n_ions
        )));
    }
    let n = params.n_ions;
    let wx = units::angular(params.nu_com_transverse);
    let wx2 = wx * wx;
    // Work in units of wx^2 for conditioning.
    let k_scale = units::coulomb_constant() / params.ion_mass / wx2;
    let lap = coulomb_laplacian(positions, k_scale);
    let hessian = DMatrix::<f64>::identity(n, n) - lap;
    let (values, vectors) = sorted_eigen(hessian);
    for (m, &v) in values.iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::Instability {
                mode: m,
                omega_sq: v * wx2,
            });
        }
    }
    let frequencies: Vec<f64> = values.iter().map(|v| params.nu_com_transverse * v.sqrt()).collect();
    let mut lamb_dicke = vectors.clone();
    for (m, &nu) in frequencies.iter().enumerate() {
        let eta_m = params.raman_wavevector
            * (units::HBAR / (2.0 * params.ion_mass * units::angular(nu))).sqrt();
        lamb_dicke.column_mut(m).scale_mut(eta_m);
    }
    Ok(ModeTable {
        frequencies,
        mode_vectors: vectors,
        lamb_dicke,
    })
}

/// A chain with its equilibrium and mode table.
#[derive(Clone, Debug)]
pub struct Chain {
    pub params: TrapParams,
    pub positions: Vec<f64>,
    pub modes: ModeTable,
}

impl Chain {
    pub fn new(params: TrapParams) -> Result<Self> {
        let positions = equilibrium_positions(&params)?;
        let modes = transverse_modes(&params, &positions)?;
        Ok(Self {
            params,
            positions,
            modes,
        })
    }

    pub fn report(&self) -> ChainReport {
        let modes = &self.modes;
        ChainReport {
            n_ions: self.params.n_ions,
            nu_axial_hz: self.params.fixed_spacing.map_or(self.params.nu_axial, |_| 0.0),
            nu_com_hz: self.params.nu_com_transverse,
            positions_m: self.positions.clone(),
            modes: (0..modes.n_modes())
                .map(|m| ModeReport {
                    freq_hz: modes.frequencies[m],
                    vector: modes.mode_vectors.column(m).iter().copied().collect(),
                    eta: modes.lamb_dicke.column(m).iter().copied().collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub freq_hz: f64,
    pub vector: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Serialized form of a chain and its mode table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n_ions: usize,
    pub nu_axial_hz: f64,
    pub nu_com_hz: f64,
    pub positions_m: Vec<f64>,
    pub modes: Vec<ModeReport>,
}

impl ChainReport {
    pub fn to_mode_table(&self) -> Result<ModeTable> {
        let n = self.n_ions;
        if self.modes.len() != n || self.modes.iter().any(|m| m.vector.len() != n || m.eta.len() != n) {
            return Err(Error::DimensionMismatch("mode table does not match n_ions".into()));
        }
        Ok(ModeTable {
            frequencies: self.modes.iter().map(|m| m.freq_hz).collect(),
            mode_vectors: DMatrix::from_fn(n, n, |j, m| self.modes[m].vector[j]),
            lamb_dicke: DMatrix::from_fn(n, n, |j, m| self.modes[m].eta[j]),
        })
    }
}
