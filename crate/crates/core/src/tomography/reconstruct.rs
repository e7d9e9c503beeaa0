use serde::{Serialize, Serializer};

use super::SuperOperator;
use crate::error::{Error, Result};
use crate::fock::Occupation;
use crate::linalg::{from_spectrum, hermitian_eigen, hermitize, psd_sqrt, trace, CMat, CVec, C64};

/// Singular values of `L` below this fraction of the largest are discarded.
pub const SV_CUTOFF: f64 = 1e-10;
/// Largest accepted condition number of `L^dag L`.
pub const COND_LIMIT: f64 = 1e12;
/// Per-setting tolerance on the normalization of measured probabilities.
const BLOCK_SUM_TOL: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    pub input_basis: Vec<Occupation>,
    /// Pseudo-inverse estimate.
    #[serde(serialize_with = "ser_cmat")]
    pub rho_raw: CMat,
    /// Nearest physical state to `rho_raw`.
    #[serde(rename = "rho", serialize_with = "ser_cmat")]
    pub rho_ml: CMat,
    pub fidelity: Option<f64>,
    pub purity: f64,
    pub condition_number: f64,
    /// Total weight of the negative eigenvalues of `rho_raw`.
    pub clipped_eigenmass: f64,
    pub dropped_singular_values: usize,
}

fn ser_cmat<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
    rows.serialize(s)
}

/// Linear inversion `rho = L^+ p` followed by [`ml_project`].
///
/// `p` stacks the output probabilities of all settings in the row order of `l`.
/// With a target, the fidelity of the projected state is reported.
pub fn reconstruct(p: &[f64], l: &SuperOperator, target: Option<&CMat>) -> Result<ReconstructionResult> {
    if p.len() != l.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for a superoperator with {} rows",
            p.len(),
            l.rows()
        )));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("p", "probabilities must be finite"));
    }
    for (g, block) in p.chunks(l.output_dim()).enumerate() {
        let s: f64 = block.iter().sum();
        if (s - 1.0).abs() > BLOCK_SUM_TOL {
            return Err(Error::Validation(format!(
                "probabilities of setting {} sum to {s:.4}",
                g + 1
            )));
        }
    }
    let svd = l.matrix.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = if l.matrix.nrows() < l.matrix.ncols() { 0.0 } else { svd.singular_values.min() };
    let cond = if s_min > 0.0 { (s_max / s_min).powi(2) } else { f64::INFINITY };
    if !(cond <= COND_LIMIT) {
        return Err(Error::IllConditioned { cond });
    }
    let cutoff = SV_CUTOFF * s_max;
    let dropped = svd.singular_values.iter().filter(|&&s| s < cutoff).count();
    let pinv = svd.pseudo_inverse(cutoff).map_err(|e| Error::SolverFailure(e.to_string()))?;
    let pv = CVec::from_iterator(p.len(), p.iter().map(|&x| C64::new(x, 0.0)));
    let x = pinv * pv;
    let d = l.input_dim();
    let rho_raw = CMat::from_fn(d, d, |a, b| x[a * d + b]);
    let (vals, _) = hermitian_eigen(&rho_raw);
    let clipped = vals.iter().filter(|&&v| v < 0.0).fold(0.0, |acc, v| acc - v);
    let rho_ml = ml_project(&rho_raw);
    let fidelity = match target {
        Some(t) => Some(state_fidelity(&rho_ml, t)?),
        None => None,
    };
    Ok(ReconstructionResult {
        input_basis: l.input_basis.clone(),
        purity: trace(&(&rho_ml * &rho_ml)).re,
        rho_raw,
        rho_ml,
        fidelity,
        condition_number: cond,
        clipped_eigenmass: clipped,
        dropped_singular_values: dropped,
    })
}

/// Closest positive semidefinite unit-trace matrix in Frobenius norm.
///
/// The eigenvalues `mu_i` of the Hermitian part are replaced by
/// `max(mu_i - t, 0)` with the shift `t` chosen so that they sum to one.
pub fn ml_project(rho: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(&hermitize(rho));
    let mut desc = vals.clone();
    desc.reverse();
    let mut shift = desc[0] - 1.0;
    let mut acc = 0.0;
    for (k, &mu) in desc.iter().enumerate() {
        acc += mu;
        let t = (acc - 1.0) / (k + 1) as f64;
        if mu - t > 0.0 {
            shift = t;
        }
    }
    let clipped: Vec<C64> = vals.iter().map(|&mu| C64::new((mu - shift).max(0.0), 0.0)).collect();
    hermitize(&from_spectrum(&clipped, &vecs))
}

fn check_state(rho: &CMat, name: &str) -> Result<Vec<f64>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(format!("{name} is not square")));
    }
    if crate::linalg::hermiticity_residual(rho) > 1e-6 {
        return Err(Error::Validation(format!("{name} is not Hermitian")));
    }
    let tr = trace(rho);
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-6 {
        return Err(Error::Validation(format!("{name} has trace {tr:.6}")));
    }
    let (vals, _) = hermitian_eigen(rho);
    if vals[0] < -1e-6 {
        return Err(Error::Validation(format!(
            "{name} has a negative eigenvalue {:.3e}",
            vals[0]
        )));
    }
    Ok(vals)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// When either argument is pure this reduces to `<psi|other|psi>`, which is
/// evaluated directly.
pub fn state_fidelity(rho: &CMat, sigma: &CMat) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{} states",
            rho.nrows(),
            rho.ncols(),
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    check_state(rho, "rho")?;
    check_state(sigma, "sigma")?;
    let pure_vector = |m: &CMat| -> Option<CVec> {
        let purity = trace(&(m * m)).re;
        if purity > 1.0 - 1e-9 {
            let (_, vecs) = hermitian_eigen(m);
            Some(vecs.column(m.ncols() - 1).into_owned())
        } else {
            None
        }
    };
    let f = if let Some(psi) = pure_vector(sigma) {
        fidelity_to_pure(rho, &psi)
    } else if let Some(psi) = pure_vector(rho) {
        fidelity_to_pure(sigma, &psi)
    } else {
        let s = psd_sqrt(rho);
        let inner = &s * sigma * &s;
        let (vals, _) = hermitian_eigen(&inner);
        vals.iter().map(|v| v.max(0.0).sqrt()).sum::<f64>().powi(2)
    };
    Ok(f.clamp(0.0, 1.0))
}

/// `<psi|rho|psi> / <psi|psi>`; `rho` need not be a valid state.
pub fn fidelity_to_pure(rho: &CMat, psi: &CVec) -> f64 {
    let num = (psi.adjoint() * rho * psi)[(0, 0)].re;
    num / psi.norm_squared()
}
