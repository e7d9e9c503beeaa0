use super::ModeTable;
use crate::error::{Error, Result};

const TIE_TOL: f64 = 1e-9;

/// Lowest index whose score is within a relative `TIE_TOL` of the maximum.
fn argmax_lowest(scores: impl Iterator<Item = f64> + Clone) -> usize {
    let best = scores.clone().fold(0.0f64, f64::max);
    scores
        .enumerate()
        .find(|&(_, s)| s >= best * (1.0 - TIE_TOL))
        .map_or(0, |(j, _)| j)
}

fn check_mode(modes: &ModeTable, m: usize) -> Result<()> {
    if m >= modes.n_modes() {
        return Err(Error::ModeOutOfRange {
            index: m,
            n_modes: modes.n_modes(),
        });
    }
    Ok(())
}

/// Ion with the largest `|eta_{j,m}|` (0-based; ties go to the lowest index).
pub fn assign_ion_for_mode(modes: &ModeTable, m: usize) -> Result<usize> {
    check_mode(modes, m)?;
    Ok(argmax_lowest(modes.lamb_dicke.column(m).iter().map(|x| x.abs())))
}

/// Ion with the largest `|eta_{j,m} eta_{j,n}|` (0-based; ties go to the lowest index).
pub fn assign_ion_for_pair(modes: &ModeTable, m: usize, n: usize) -> Result<usize> {
    check_mode(modes, m)?;
    check_mode(modes, n)?;
    if m == n {
        return Err(Error::InvalidPair { m, n });
    }
    let eta = &modes.lamb_dicke;
    Ok(argmax_lowest(
        (0..modes.n_ions()).map(|j| (eta[(j, m)] * eta[(j, n)]).abs()),
    ))
}
