use serde::{Deserialize, Serialize};

use super::hamiltonian::Hamiltonian;
use super::hilbert::{SparseOp, TruncatedHilbert};
use super::ode::{integrate, OdeOptions};
use super::propagate::LEAKAGE_LIMIT;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_residual, trace, CMat, C64};

/// Form of the per-mode heating dissipator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatingChannel {
    /// Single jump operator `alpha_m a^dag a`, as written for the error budget.
    #[default]
    NumberOperator,
    /// Jump pair `sqrt(alpha_m) a^dag`, `sqrt(alpha_m) a` (thermal bath).
    Standard,
}

/// Markovian noise acting on the included modes and spin.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Heating rate per included mode, quanta/s.
    pub heating: Vec<f64>,
    /// Motional dephasing rate per included mode, 1/s (jump `sqrt(k) a^dag a`).
    pub motional_dephasing: Vec<f64>,
    /// Spin dephasing rate per ion, 1/s (jump `sqrt(k) sigma_z`).
    pub spin_dephasing: Vec<f64>,
    /// Initial thermal occupation per included mode.
    pub thermal_nbar: Vec<f64>,
    #[serde(default)]
    pub heating_channel: HeatingChannel,
}

impl NoiseModel {
    pub fn noiseless(n_modes: usize) -> Self {
        Self {
            heating: vec![0.0; n_modes],
            motional_dephasing: vec![0.0; n_modes],
            spin_dephasing: Vec::new(),
            thermal_nbar: vec![0.0; n_modes],
            heating_channel: HeatingChannel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("heating", &self.heating),
            ("motional_dephasing", &self.motional_dephasing),
            ("spin_dephasing", &self.spin_dephasing),
            ("thermal_nbar", &self.thermal_nbar),
        ] {
            if let Some(i) = v.iter().position(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::invalid(format!("{name}[{i}]"), "must be finite and non-negative"));
            }
        }
        Ok(())
    }

    /// Jump operators on `hilbert`. Per-mode vectors may be shorter than the
    /// mode list; missing entries are zero.
    pub fn jump_operators(&self, hilbert: &TruncatedHilbert) -> Result<Vec<SparseOp>> {
        self.validate()?;
        let mut ops = Vec::new();
        let rate = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
        for k in 0..hilbert.n_modes() {
            let a = hilbert.lower(k);
            let alpha = rate(&self.heating, k);
            if alpha > 0.0 {
                match self.heating_channel {
                    HeatingChannel::NumberOperator => {
                        ops.push(hilbert.number(k).scale(C64::new(alpha, 0.0)));
                    }
                    HeatingChannel::Standard => {
                        let s = C64::new(alpha.sqrt(), 0.0);
                        ops.push(a.scale(s));
                        ops.push(a.adjoint().scale(s));
                    }
                }
            }
            let kappa = rate(&self.motional_dephasing, k);
            if kappa > 0.0 {
                ops.push(hilbert.number(k).scale(C64::new(kappa.sqrt(), 0.0)));
            }
        }
        if let Some(ion) = hilbert.spin {
            let kappa = rate(&self.spin_dephasing, ion);
            if kappa > 0.0 {
                ops.push(hilbert.sigma_z()?.scale(C64::new(kappa.sqrt(), 0.0)));
            }
        }
        Ok(ops)
    }
}

struct Jump {
    l: SparseOp,
    l_dag: SparseOp,
    l_dag_l: SparseOp,
}

/// Checks that `rho` is a density matrix within `tol`.
pub fn check_density(rho: &CMat, tol: f64) -> Result<()> {
    let herm = hermiticity_residual(rho);
    if herm > tol {
        return Err(Error::Validation(format!("density matrix not Hermitian (residual {herm:.2e})")));
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Validation(format!("density matrix trace {tr}")));
    }
    let (vals, _) = hermitian_eigen(rho);
    if vals[0] < -tol {
        return Err(Error::Validation(format!("density matrix eigenvalue {:.2e}", vals[0])));
    }
    Ok(())
}

/// Integrates the Lindblad master equation
/// `d rho/dt = -i[H, rho] + sum_L (L rho L^dag - {L^dag L, rho}/2)`
/// and returns `rho` at each of `times`. Trace, Hermiticity and positivity are
/// checked at every output to 1e-8, truncation leakage to 1e-6.
pub fn simulate_lindblad(
    h: &Hamiltonian,
    noise: &NoiseModel,
    hilbert: &TruncatedHilbert,
    rho0: &CMat,
    times: &[f64],
    ode: &OdeOptions,
) -> Result<Vec<CMat>> {
    let n = h.dim();
    if hilbert.dim() != n || rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "rho0 is {}x{}, space has dimension {n}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    check_density(rho0, 1e-8)?;
    let jumps: Vec<Jump> = noise
        .jump_operators(hilbert)?
        .into_iter()
        .map(|l| {
            let l_dag = l.adjoint();
            let l_dag_l = l_dag.mul(&l);
            Jump { l, l_dag, l_dag_l }
        })
        .collect();
    let mut scratch = vec![C64::default(); n * n];
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let minus_half = C64::new(-0.5, 0.0);
    let rhs = |t: f64, rho: &[C64], out: &mut [C64]| {
        out.fill(C64::default());
        h.left_mul_add(t, minus_i, rho, out);
        h.right_mul_add(t, plus_i, rho, out);
        for j in &jumps {
            scratch.fill(C64::default());
            j.l.left_mul_add(one, rho, &mut scratch, n);
            j.l_dag.right_mul_add(one, &scratch, out, n);
            j.l_dag_l.left_mul_add(minus_half, rho, out, n);
            j.l_dag_l.right_mul_add(minus_half, rho, out, n);
        }
    };
    let out = integrate(rhs, 0.0, rho0.as_slice(), times, h.breakpoints(), ode)?;
    let mut result = Vec::with_capacity(out.len());
    for v in out {
        let rho = CMat::from_column_slice(n, n, &v);
        check_density(&rho, 1e-8)?;
        let leak = hilbert.edge_population(|i| rho[(i, i)].re);
        if leak > LEAKAGE_LIMIT {
            return Err(Error::Truncation {
                leakage: leak,
                limit: LEAKAGE_LIMIT,
            });
        }
        result.push(rho);
    }
    Ok(result)
}

/// Phonon-number distribution (spin traced out) of a density matrix.
pub fn phonon_distribution_rho(hilbert: &TruncatedHilbert, rho: &CMat) -> Vec<f64> {
    hilbert.occupation_probabilities(|i| rho[(i, i)].re)
}
