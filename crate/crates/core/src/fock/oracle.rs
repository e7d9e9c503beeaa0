//! Slow, independent reference implementations used to check the fast paths.

use super::FockSector;
use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, unitary_log, CMat, C64};

/// Permanent as the plain sum over all `n!` permutations.
pub fn permanent_naive(a: &CMat) -> C64 {
    let n = a.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = C64::new(0.0, 0.0);
    permute(a, &mut perm, 0, &mut total);
    total
}

fn permute(a: &CMat, perm: &mut [usize], k: usize, total: &mut C64) {
    if k == perm.len() {
        *total += perm.iter().enumerate().map(|(i, &j)| a[(i, j)]).product::<C64>();
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(a, perm, k + 1, total);
        perm.swap(k, i);
    }
}

/// Second-quantized `H_F = sum_jk h_jk a_j^dag a_k` on the sector.
pub fn quadratic_hamiltonian(h: &CMat, sector: &FockSector) -> CMat {
    let dim = sector.dim();
    let m = sector.n_modes();
    let mut out = CMat::zeros(dim, dim);
    for (col, occ) in sector.basis().iter().enumerate() {
        for k in 0..m {
            let nk = occ.0[k];
            if nk == 0 {
                continue;
            }
            for j in 0..m {
                let mut next = occ.0.clone();
                next[k] -= 1;
                next[j] += 1;
                let amp = (f64::from(nk) * f64::from(next[j])).sqrt();
                let row = sector.index_of_slice(&next).expect("number-conserving move");
                out[(row, col)] += h[(j, k)] * amp;
            }
        }
    }
    out
}

/// Lifting through the generator: `U = exp(i h)`, then `U_F = exp(i H_F)`.
///
/// When `U` has an eigenvalue at `-1` the matrix is first rotated by a global phase
/// `e^{i a}`, which multiplies the lifted operator by `e^{i N a}`.
pub fn lift_unitary_dense(u: &CMat, sector: &FockSector) -> Result<CMat> {
    let n = sector.n_phonons() as f64;
    let mut last = None;
    for alpha in [0.0, 0.37, 1.13, 2.21] {
        let rot = C64::from_polar(1.0, alpha);
        match unitary_log(&u.map(|x| x * rot)) {
            Ok(h) => {
                let lifted = expi_hermitian(&quadratic_hamiltonian(&h, sector));
                return Ok(lifted * C64::from_polar(1.0, -n * alpha));
            }
            Err(e @ Error::BranchAmbiguity(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}
