use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FockSector, Occupation};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, trace, CMat, CVec, C64};

#[derive(Clone, Debug)]
pub struct FockState {
    sector: Arc<FockSector>,
    amplitudes: CVec,
}

impl FockState {
    /// Pure state; the amplitudes must have unit norm within `1e-10`.
    pub fn new(sector: Arc<FockSector>, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != sector.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a sector of dimension {}",
                amplitudes.len(),
                sector.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { sector, amplitudes })
    }

    pub fn basis_state(sector: Arc<FockSector>, occ: &[u32]) -> Result<Self> {
        let i = sector.index_of_slice(occ).ok_or_else(|| {
            Error::invalid("occupation", format!("{occ:?} is not in the sector"))
        })?;
        let mut amps = CVec::zeros(sector.dim());
        amps[i] = C64::new(1.0, 0.0);
        Ok(Self {
            sector,
            amplitudes: amps,
        })
    }

    pub fn sector(&self) -> &Arc<FockSector> {
        &self.sector
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            sector: self.sector.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    sector: Arc<FockSector>,
    matrix: CMat,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity (`1e-10`) and unit trace (`1e-10`).
    pub fn new(sector: Arc<FockSector>, matrix: CMat) -> Result<Self> {
        let rho = Self::new_unchecked(sector, matrix)?;
        let herm = hermiticity_residual(&rho.matrix);
        if herm > 1e-10 {
            return Err(Error::Validation(format!("density matrix is not Hermitian ({herm:.2e})")));
        }
        let tr = trace(&rho.matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Validation(format!("density matrix trace {tr:.6} differs from 1")));
        }
        Ok(rho)
    }

    /// Only checks the shape; used for raw reconstructions.
    pub fn new_unchecked(sector: Arc<FockSector>, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != sector.dim() || matrix.ncols() != sector.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a sector of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                sector.dim()
            )));
        }
        Ok(Self { sector, matrix })
    }

    pub fn sector(&self) -> &Arc<FockSector> {
        &self.sector
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.matrix * &self.matrix)).re
    }

    /// `rho (x) |0..0><0..0|` on `ancillas` extra modes appended after the existing ones.
    pub fn with_ancillas(&self, ancillas: usize) -> Result<Self> {
        let big = FockSector::new(self.sector.n_modes() + ancillas, self.sector.n_phonons())?;
        let map: Vec<usize> = self
            .sector
            .basis()
            .iter()
            .map(|o| big.index_of(&o.with_vacuum(ancillas)).expect("embedded occupation"))
            .collect();
        let mut m = CMat::zeros(big.dim(), big.dim());
        for (a, &ia) in map.iter().enumerate() {
            for (b, &ib) in map.iter().enumerate() {
                m[(ia, ib)] = self.matrix[(a, b)];
            }
        }
        Ok(Self {
            sector: big,
            matrix: m,
        })
    }
}

fn checked_probabilities(rho: &DensityMatrix, evolved: CMat) -> Result<Vec<f64>> {
    let tr = trace(rho.matrix());
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-6 {
        return Err(Error::Validation(format!("input trace {tr:.6} differs from 1")));
    }
    Ok(evolved.diagonal().iter().map(|z| z.re).collect())
}

fn check_dims(rho: &DensityMatrix, u: &CMat) -> Result<()> {
    if u.nrows() != rho.sector().dim() || u.ncols() != rho.sector().dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Fock unitary for a sector of dimension {}",
            u.nrows(),
            u.ncols(),
            rho.sector().dim()
        )));
    }
    Ok(())
}

/// `p_nu = <nu| U^dag rho U |nu>`.
pub fn output_probabilities(rho: &DensityMatrix, u_f: &CMat) -> Result<Vec<f64>> {
    check_dims(rho, u_f)?;
    checked_probabilities(rho, u_f.adjoint() * rho.matrix() * u_f)
}

/// `p_nu = <nu| V rho V^dag |nu>` for a forward (Schrodinger-picture) propagator `V`.
/// Identical to [`output_probabilities`] with `U = V^dag`.
pub fn forward_probabilities(rho: &DensityMatrix, v_f: &CMat) -> Result<Vec<f64>> {
    check_dims(rho, v_f)?;
    checked_probabilities(rho, v_f * rho.matrix() * v_f.adjoint())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledProbability {
    pub occupation: Occupation,
    pub p: f64,
}

pub fn labeled_probabilities(sector: &FockSector, p: &[f64]) -> Vec<LabeledProbability> {
    sector
        .basis()
        .iter()
        .zip(p)
        .map(|(o, &p)| LabeledProbability {
            occupation: o.clone(),
            p,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;

    #[test]
    fn identity_keeps_basis_state() {
        let s = enumerate_basis(4, 1).unwrap();
        let rho = FockState::basis_state(s.clone(), &[1, 0, 0, 0]).unwrap().density();
        let p = output_probabilities(&rho, &CMat::identity(4, 4)).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ancilla_embedding_preserves_entries() {
        let s = enumerate_basis(2, 2).unwrap();
        let rho = FockState::basis_state(s, &[1, 1]).unwrap().density();
        let big = rho.with_ancillas(2).unwrap();
        assert_eq!(big.sector().dim(), 10);
        let i = big.sector().index_of_slice(&[1, 1, 0, 0]).unwrap();
        assert_eq!(big.matrix()[(i, i)], C64::new(1.0, 0.0));
        assert!((big.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_trace() {
        let s = enumerate_basis(2, 1).unwrap();
        let m = CMat::identity(2, 2);
        assert!(DensityMatrix::new(s, m).is_err());
    }
}
