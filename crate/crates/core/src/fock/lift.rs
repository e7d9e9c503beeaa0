use nalgebra::DMatrix;

use super::{permanent, FockSector};
use crate::error::Result;
use crate::exec::Exec;
use crate::linalg::{check_unitary, CMat, C64};

const UNITARY_TOL: f64 = 1e-10;

/// Row/column index list with index `i` repeated `occ[i]` times.
fn expand(occ: &[u32]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
        .collect()
}

pub fn lift_unitary(u: &CMat, sector: &FockSector) -> Result<CMat> {
    lift_unitary_with(u, sector, Exec::default())
}

/// Lifts a mode unitary to the sector via permanents, one output row per task.
pub fn lift_unitary_with(u: &CMat, sector: &FockSector, exec: Exec) -> Result<CMat> {
    check_unitary(u, UNITARY_TOL)?;
    if u.nrows() != sector.n_modes() {
        return Err(crate::Error::DimensionMismatch(format!(
            "{}x{} unitary for a {}-mode sector",
            u.nrows(),
            u.ncols(),
            sector.n_modes()
        )));
    }
    let dim = sector.dim();
    let n = sector.n_phonons();
    let cols: Vec<(Vec<usize>, f64)> = sector
        .basis()
        .iter()
        .map(|o| (expand(&o.0), o.factorial_product()))
        .collect();
    let rows: Vec<Vec<C64>> = exec.map_range(dim, |r| {
        let out = sector.occupation(r);
        let ri = expand(&out.0);
        let rf = out.factorial_product();
        let mut sub = CMat::zeros(n, n);
        cols.iter()
            .map(|(ci, cf)| {
                for (a, &i) in ri.iter().enumerate() {
                    for (b, &j) in ci.iter().enumerate() {
                        sub[(a, b)] = u[(i, j)];
                    }
                }
                permanent(&sub) / (rf * cf).sqrt()
            })
            .collect()
    });
    Ok(DMatrix::from_fn(dim, dim, |r, c| rows[r][c]))
}
