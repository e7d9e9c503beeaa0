use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};

/// Truncated Fock space of a few chain modes, optionally tensored with one ion spin.
///
/// Basis states are occupation vectors with `n_k <= cutoffs[k]` (and, if set,
/// `sum n_k <= max_total`). With a spin the basis index is `2 * occupation + s`,
/// `s = 0` for down and `1` for up.
#[derive(Clone, Debug)]
pub struct TruncatedHilbert {
    /// Chain-mode index of each included mode.
    pub modes: Vec<usize>,
    /// Highest kept phonon number per included mode.
    pub cutoffs: Vec<u32>,
    pub max_total: Option<u32>,
    /// Assisting ion whose spin is included.
    pub spin: Option<usize>,
    occupations: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl TruncatedHilbert {
    pub fn new(modes: Vec<usize>, cutoffs: Vec<u32>, max_total: Option<u32>, spin: Option<usize>) -> Result<Self> {
        if modes.is_empty() || modes.len() != cutoffs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} modes with {} cutoffs",
                modes.len(),
                cutoffs.len()
            )));
        }
        let mut occupations = Vec::new();
        let mut cur = vec![0u32; modes.len()];
        loop {
            let total: u32 = cur.iter().sum();
            if max_total.is_none_or(|t| total <= t) {
                occupations.push(cur.clone());
            }
            let mut k = modes.len();
            loop {
                if k == 0 {
                    let index = occupations.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
                    return Ok(Self {
                        modes,
                        cutoffs,
                        max_total,
                        spin,
                        occupations,
                        index,
                    });
                }
                k -= 1;
                if cur[k] < cutoffs[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    /// Default truncation for `n_phonons` phonons: cutoff `N + 2` per mode.
    pub fn for_phonons(modes: Vec<usize>, n_phonons: u32, spin: Option<usize>) -> Result<Self> {
        let c = vec![n_phonons + 2; modes.len()];
        Self::new(modes, c, None, spin)
    }

    /// Cutoff `N + 2` on the total phonon number instead of per mode; much smaller
    /// when many spectator modes are included.
    pub fn for_phonons_total(modes: Vec<usize>, n_phonons: u32, spin: Option<usize>) -> Result<Self> {
        let c = vec![n_phonons + 2; modes.len()];
        Self::new(modes, c, Some(n_phonons + 2), spin)
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    fn spin_dim(&self) -> usize {
        if self.spin.is_some() {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() * self.spin_dim()
    }

    pub fn occupations(&self) -> &[Vec<u32>] {
        &self.occupations
    }

    /// Position of a chain mode among the included modes.
    pub fn local(&self, chain_mode: usize) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == chain_mode)
            .ok_or(Error::ModeOutOfRange {
                index: chain_mode,
                n_modes: self.modes.len(),
            })
    }

    /// Basis index of an occupation (over included modes) and spin (`0` down, `1` up).
    pub fn index(&self, occ: &[u32], spin_up: bool) -> Option<usize> {
        let i = *self.index.get(occ)?;
        match self.spin {
            Some(_) => Some(2 * i + usize::from(spin_up)),
            None if !spin_up => Some(i),
            None => None,
        }
    }

    /// (occupation index, spin up) of a basis index.
    pub fn split(&self, i: usize) -> (usize, bool) {
        match self.spin {
            Some(_) => (i / 2, i % 2 == 1),
            None => (i, false),
        }
    }

    pub fn basis_state(&self, occ: &[u32], spin_up: bool) -> Result<CVec> {
        let i = self.index(occ, spin_up).ok_or_else(|| {
            Error::invalid("initial state", format!("{occ:?} is outside the truncated space"))
        })?;
        let mut v = CVec::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// Population sitting on the truncation edge.
    pub fn edge_population(&self, probabilities: impl Fn(usize) -> f64) -> f64 {
        (0..self.dim())
            .filter(|&i| {
                let occ = &self.occupations[self.split(i).0];
                let total: u32 = occ.iter().sum();
                occ.iter().zip(&self.cutoffs).any(|(n, c)| n >= c)
                    || self.max_total.is_some_and(|t| total >= t)
            })
            .map(probabilities)
            .sum()
    }

    /// Phonon-number distribution over the included modes (spin traced out).
    pub fn occupation_probabilities(&self, probabilities: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut p = vec![0.0; self.occupations.len()];
        for i in 0..self.dim() {
            p[self.split(i).0] += probabilities(i);
        }
        p
    }

    /// Annihilation operator of the included mode at local position `k`.
    pub fn lower(&self, k: usize) -> SparseOp {
        let mut entries = Vec::new();
        for (col_occ, occ) in self.occupations.iter().enumerate() {
            if occ[k] == 0 {
                continue;
            }
            let mut next = occ.clone();
            next[k] -= 1;
            let row_occ = self.index[&next];
            let amp = C64::new(f64::from(occ[k]).sqrt(), 0.0);
            for s in 0..self.spin_dim() {
                let sd = self.spin_dim();
                entries.push((row_occ * sd + s, col_occ * sd + s, amp));
            }
        }
        SparseOp::new(self.dim(), entries)
    }

    pub fn number(&self, k: usize) -> SparseOp {
        let sd = self.spin_dim();
        let entries = (0..self.dim())
            .filter_map(|i| {
                let n = self.occupations[i / sd][k];
                (n > 0).then(|| (i, i, C64::new(f64::from(n), 0.0)))
            })
            .collect();
        SparseOp::new(self.dim(), entries)
    }

    /// `|up><down|` on the spin (identity on the modes).
    pub fn sigma_plus(&self) -> Result<SparseOp> {
        if self.spin.is_none() {
            return Err(Error::invalid("spin", "the truncated space has no spin"));
        }
        let entries = (0..self.occupations.len())
            .map(|o| (2 * o + 1, 2 * o, C64::new(1.0, 0.0)))
            .collect();
        Ok(SparseOp::new(self.dim(), entries))
    }

    pub fn sigma_z(&self) -> Result<SparseOp> {
        if self.spin.is_none() {
            return Err(Error::invalid("spin", "the truncated space has no spin"));
        }
        let entries = (0..self.dim())
            .map(|i| (i, i, C64::new(if i % 2 == 1 { 1.0 } else { -1.0 }, 0.0)))
            .collect();
        Ok(SparseOp::new(self.dim(), entries))
    }
}

/// Sparse square matrix in coordinate form, rows ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.retain(|e| e.2 != C64::new(0.0, 0.0));
        entries.sort_by_key(|e| (e.0, e.1));
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect())
    }

    pub fn mul(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut by_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
        for &(r, k, a) in &self.entries {
            for &(c, b) in &by_row[k] {
                *acc.entry((r, c)).or_default() += a * b;
            }
        }
        Self::new(self.dim, acc.into_iter().map(|((r, c), v)| (r, c, v)).collect())
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
        for &(r, c, v) in self.entries.iter().chain(&other.entries) {
            *acc.entry((r, c)).or_default() += v;
        }
        Self::new(self.dim, acc.into_iter().map(|((r, c), v)| (r, c, v)).collect())
    }

    /// `out += coef * A x`
    #[inline]
    pub fn apply_add(&self, coef: C64, x: &[C64], out: &mut [C64]) {
        for &(r, c, v) in &self.entries {
            out[r] += coef * v * x[c];
        }
    }

    /// `out += coef * A X` where `X` and `out` are `n x n`, column-major.
    pub fn left_mul_add(&self, coef: C64, x: &[C64], out: &mut [C64], n: usize) {
        for &(r, c, v) in &self.entries {
            let f = coef * v;
            for j in 0..n {
                out[j * n + r] += f * x[j * n + c];
            }
        }
    }

    /// `out += coef * X A` where `X` and `out` are `n x n`, column-major.
    pub fn right_mul_add(&self, coef: C64, x: &[C64], out: &mut [C64], n: usize) {
        for &(r, c, v) in &self.entries {
            let f = coef * v;
            let (src, dst) = (r * n, c * n);
            for i in 0..n {
                out[dst + i] += f * x[src + i];
            }
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}
