use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sector that will be enumerated.
pub const MAX_SECTOR_SIZE: usize = 1_000_000;

/// Phonon numbers per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    /// Appends `k` empty modes.
    pub fn with_vacuum(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat_n(0, k));
        Occupation(v)
    }

    /// `prod_i n_i!`
    pub fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n).map(f64::from).product::<f64>())
            .product()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl fmt::Display for Occupation {
    /// Single digits are concatenated (`1010`); larger numbers are comma separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&n| n < 10) {
            for n in &self.0 {
                write!(f, "{n}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// All occupations of `n_modes` modes holding `n_phonons` phonons, in descending
/// lexicographic order (so `N = 1` lists `|10..0>` first and mode `k` sits at index `k`).
#[derive(Debug, PartialEq, Eq)]
pub struct FockSector {
    n_modes: usize,
    n_phonons: usize,
    basis: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

/// `C(N + M - 1, N)`, saturating.
pub fn sector_size(n_modes: usize, n_phonons: usize) -> u128 {
    if n_modes == 0 {
        return u128::from(n_phonons == 0);
    }
    let mut acc: u128 = 1;
    for k in 1..=n_phonons as u128 {
        acc = acc.saturating_mul(n_modes as u128 - 1 + k) / k;
    }
    acc
}

fn fill(prefix: &mut Vec<u32>, remaining: u32, modes_left: usize, out: &mut Vec<Occupation>) {
    if modes_left == 1 {
        prefix.push(remaining);
        out.push(Occupation(prefix.clone()));
        prefix.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        fill(prefix, remaining - k, modes_left - 1, out);
        prefix.pop();
    }
}

pub fn enumerate_basis(n_modes: usize, n_phonons: usize) -> Result<Arc<FockSector>> {
    FockSector::new(n_modes, n_phonons)
}

impl FockSector {
    pub fn new(n_modes: usize, n_phonons: usize) -> Result<Arc<Self>> {
        if n_modes == 0 {
            return Err(Error::invalid("n_modes", "must be at least 1"));
        }
        let size = sector_size(n_modes, n_phonons);
        if size > MAX_SECTOR_SIZE as u128 {
            return Err(Error::Capacity {
                modes: n_modes,
                phonons: n_phonons,
                size,
                limit: MAX_SECTOR_SIZE,
            });
        }
        let mut basis = Vec::with_capacity(size as usize);
        fill(&mut Vec::with_capacity(n_modes), n_phonons as u32, n_modes, &mut basis);
        let index = basis.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        Ok(Arc::new(Self {
            n_modes,
            n_phonons,
            basis,
            index,
        }))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_phonons(&self) -> usize {
        self.n_phonons
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn occupation(&self, i: usize) -> &Occupation {
        &self.basis[i]
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn index_of_slice(&self, occ: &[u32]) -> Option<usize> {
        self.index_of(&Occupation(occ.to_vec()))
    }
}
