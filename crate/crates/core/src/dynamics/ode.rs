//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the first derivative when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            max_steps: 20_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0`, returning the state at each of `t_out`
/// (ascending, all `>= t0`). Steps land exactly on every output time and on every
/// entry of `breakpoints`, so kinks in the right-hand side are never straddled.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    y0: &[C64],
    t_out: &[f64],
    breakpoints: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
        return Err(Error::invalid("t_out", "output times must be ascending and after t0"));
    }
    let t_end = t_out.last().copied().unwrap_or(t0);
    let mut stops: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > t0 && b < t_end)
        .chain(t_out.iter().copied())
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| vec![C64::default(); n]);
    let mut tmp = vec![C64::default(); n];
    let mut y_new = vec![C64::default(); n];
    let mut t = t0;
    f(t, &y, &mut k[0]);

    let scale = t_end.abs().max(t0.abs()).max(f64::MIN_POSITIVE);
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let dnorm = k[0].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if dnorm > 0.0 {
                (0.01 * ynorm.max(1e-300) / dnorm).min(scale)
            } else {
                scale
            }
        }
    };

    let mut out = Vec::with_capacity(t_out.len());
    let mut out_idx = 0;
    while out_idx < t_out.len() && t_out[out_idx] <= t0 {
        out.push(y.clone());
        out_idx += 1;
    }
    let mut steps = 0usize;
    for &stop in &stops {
        if stop <= t {
            continue;
        }
        while t < stop {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Stiffness { t });
            }
            let last = t + h >= stop;
            let hs = if last { stop - t } else { h };
            if hs < 1e-15 * scale {
                return Err(Error::Stiffness { t });
            }
            let stage = |tmp: &mut [C64], y: &[C64], k: &[Vec<C64>; 7], coeffs: &[(usize, f64)]| {
                for i in 0..n {
                    let mut acc = y[i];
                    for &(j, a) in coeffs {
                        acc += k[j][i] * (a * hs);
                    }
                    tmp[i] = acc;
                }
            };
            stage(&mut tmp, &y, &k, &[(0, A21)]);
            f(t + C2 * hs, &tmp, &mut k[1]);
            stage(&mut tmp, &y, &k, &[(0, A31), (1, A32)]);
            f(t + C3 * hs, &tmp, &mut k[2]);
            stage(&mut tmp, &y, &k, &[(0, A41), (1, A42), (2, A43)]);
            f(t + C4 * hs, &tmp, &mut k[3]);
            stage(&mut tmp, &y, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            f(t + C5 * hs, &tmp, &mut k[4]);
            stage(&mut tmp, &y, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            f(t + hs, &tmp, &mut k[5]);
            stage(&mut y_new, &y, &k, &[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)]);
            f(t + hs, &y_new, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7)
                    * hs;
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                h = hs * 0.1;
                continue;
            }
            if err <= 1.0 {
                t = if last { stop } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || hs >= h {
                    h = hs * grow;
                }
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        while out_idx < t_out.len() && t_out[out_idx] <= t {
            out.push(y.clone());
            out_idx += 1;
        }
    }
    Ok(out)
}
