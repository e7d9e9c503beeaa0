use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
    pub dof: usize,
}

impl LinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Two-sided confidence interval of the slope; infinite with no residual
    /// degrees of freedom.
    pub fn slope_interval(&self, level: f64) -> (f64, f64) {
        if self.dof == 0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let t = StudentsT::new(0.0, 1.0, self.dof as f64)
            .map(|d| d.inverse_cdf(0.5 + level / 2.0))
            .unwrap_or(f64::INFINITY);
        (self.slope - t * self.slope_stderr, self.slope + t * self.slope_stderr)
    }
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("{} abscissae, {} ordinates", x.len(), y.len())));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::FitFailure("a line needs at least two points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * x.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE) {
        return Err(Error::FitFailure("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let dof = n - 2;
    let s2 = if dof > 0 { sse / dof as f64 } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        intercept,
        slope,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept_stderr: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        r_squared,
        dof,
    })
}

/// Linear model `F(t) = F_ini + epsilon t` for fidelity decay under repeated
/// beam splitters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityDecay {
    pub f_ini: f64,
    pub epsilon: f64,
    pub t_bs: f64,
    pub f_at_bs: f64,
    pub r_squared: f64,
}

pub fn fit_fidelity_decay(series: &[(f64, f64)], t_bs: f64) -> Result<FidelityDecay> {
    if series.len() < 3 {
        return Err(Error::FitFailure("fidelity decay needs at least three points".into()));
    }
    let (t, f): (Vec<f64>, Vec<f64>) = series.iter().copied().unzip();
    let fit = linear_fit(&t, &f)?;
    Ok(FidelityDecay {
        f_ini: fit.intercept,
        epsilon: fit.slope,
        t_bs,
        f_at_bs: fit.eval(t_bs),
        r_squared: fit.r_squared,
    })
}

/// Squared Bhattacharyya overlap `(sum_k sqrt(P_k Q_k))^2`.
pub fn population_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} outcomes", p.len(), q.len())));
    }
    for (name, v) in [("P", p), ("Q", q)] {
        if v.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::Validation(format!("{name} has a negative or non-finite entry")));
        }
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > 1e-6 {
            return Err(Error::Validation(format!("{name} sums to {s}")));
        }
    }
    let b: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((b * b).min(1.0))
}

/// Total-variation distance `sum |P - Q| / 2`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Minimizes a unimodal function on `[a, b]`.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
