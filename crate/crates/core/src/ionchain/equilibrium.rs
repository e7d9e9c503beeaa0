use nalgebra::{DMatrix, DVector};

use super::TrapParams;
use crate::error::{Error, Result};
use crate::units;

const MAX_NEWTON: usize = 200;
const FORCE_TOL: f64 = 1e-13;

/// Characteristic length `(e^2 / (4 pi eps0 m w_z^2))^(1/3)` of a harmonic chain (m).
pub fn length_scale(ion_mass: f64, nu_axial: f64) -> f64 {
    let wz = units::angular(nu_axial);
    (units::coulomb_constant() / (ion_mass * wz * wz)).cbrt()
}

fn forces(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut f = -u[i];
            for j in 0..n {
                if j != i {
                    let d = u[i] - u[j];
                    f += d.signum() / (d * d);
                }
            }
            f
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Equilibrium of `n` ions in a unit harmonic well with unit Coulomb repulsion,
/// solved by damped Newton iteration. Positions are ascending and antisymmetric.
pub fn dimensionless_equilibrium(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n_ions", "must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Vec<f64> = (0..n)
        .map(|i| spacing * (i as f64 - (n as f64 - 1.0) / 2.0))
        .collect();
    let mut f = forces(&u);
    for _ in 0..MAX_NEWTON {
        if max_abs(&f) < FORCE_TOL {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jac[(i, i)] = 1.0;
            for j in 0..n {
                if j != i {
                    let k = 2.0 / (u[i] - u[j]).abs().powi(3);
                    jac[(i, i)] += k;
                    jac[(i, j)] -= k;
                }
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_vec(f.clone()))
            .ok_or_else(|| Error::SolverFailure("singular Jacobian in equilibrium solve".into()))?;
        let base = max_abs(&f);
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x + lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let ft = forces(&trial);
                if max_abs(&ft) < base || lambda < 1e-3 {
                    u = trial;
                    f = ft;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                return Err(Error::SolverFailure("line search stalled in equilibrium solve".into()));
            }
        }
    }
    // Remove the tiny asymmetry left by round-off.
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
    let residual = max_abs(&forces(&sym));
    if residual > 1e-12 {
        return Err(Error::SolverFailure(format!(
            "force residual {residual:.3e} after {MAX_NEWTON} Newton iterations"
        )));
    }
    Ok(sym)
}

/// Axial equilibrium positions in metres, ascending and centred on zero.
pub fn equilibrium_positions(params: &TrapParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.n_ions;
    if let Some(d) = params.fixed_spacing {
        let mid = (n as f64 - 1.0) / 2.0;
        return Ok((0..n).map(|i| d * (i as f64 - mid)).collect());
    }
    let l = length_scale(params.ion_mass, params.nu_axial);
    Ok(dimensionless_equilibrium(n)?.into_iter().map(|u| u * l).collect())
}
