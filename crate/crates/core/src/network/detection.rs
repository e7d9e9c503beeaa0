use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSector, Occupation};

/// Bright (`true`) or dark (`false`) outcome per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub Vec<bool>);

impl Pattern {
    pub fn of(occ: &Occupation) -> Self {
        Pattern(occ.0.iter().map(|&n| n > 0).collect())
    }

    pub fn bright_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Bit `m` set when mode `m` is bright.
    pub fn to_mask(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (m, &b)| acc | (usize::from(b) << m))
    }

    pub fn from_mask(mask: usize, n_modes: usize) -> Self {
        Pattern((0..n_modes).map(|m| mask >> m & 1 == 1).collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::Parse(format!("pattern `{s}` must contain only 0 and 1"))),
            })
            .collect::<Result<Vec<bool>>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err(Error::Parse("empty pattern".into()))
                } else {
                    Ok(Pattern(v))
                }
            })
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Aggregates Fock-state probabilities by bright/dark pattern.
pub fn binary_pattern_distribution(sector: &FockSector, p: &[f64]) -> BTreeMap<Pattern, f64> {
    let mut out = BTreeMap::new();
    for (occ, &pk) in sector.basis().iter().zip(p) {
        *out.entry(Pattern::of(occ)).or_insert(0.0) += pk;
    }
    out
}

fn distribute(extra: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        prefix.push(extra);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=extra).rev() {
        prefix.push(k);
        distribute(extra - k, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// The unique occupation with `n_phonons` phonons that lights up exactly `pattern`.
pub fn infer_fock_from_binary(pattern: &Pattern, n_phonons: usize) -> Result<Occupation> {
    let bright: Vec<usize> = (0..pattern.0.len()).filter(|&m| pattern.0[m]).collect();
    if (bright.is_empty() && n_phonons > 0) || bright.len() > n_phonons {
        return Err(Error::LostPhonon {
            pattern: pattern.to_string(),
            phonons: n_phonons,
        });
    }
    if bright.is_empty() {
        return Ok(Occupation(vec![0; pattern.0.len()]));
    }
    let mut extras = Vec::new();
    distribute((n_phonons - bright.len()) as u32, bright.len(), &mut Vec::new(), &mut extras);
    let candidates: Vec<Vec<u32>> = extras
        .into_iter()
        .map(|e| {
            let mut occ = vec![0; pattern.0.len()];
            for (&m, x) in bright.iter().zip(e) {
                occ[m] = 1 + x;
            }
            occ
        })
        .collect();
    if candidates.len() > 1 {
        return Err(Error::AmbiguousPattern {
            pattern: pattern.to_string(),
            phonons: n_phonons,
            candidates,
        });
    }
    Ok(Occupation(candidates.into_iter().next().unwrap()))
}

/// Binary readout errors of one detection ion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub p_bright_given_dark: f64,
    pub p_dark_given_bright: f64,
}

impl Confusion {
    pub const IDEAL: Confusion = Confusion {
        p_bright_given_dark: 0.0,
        p_dark_given_bright: 0.0,
    };

    pub fn symmetric(p: f64) -> Self {
        Confusion {
            p_bright_given_dark: p,
            p_dark_given_bright: p,
        }
    }

    /// Column-stochastic matrix `[[P(d|d), P(d|b)], [P(b|d), P(b|b)]]`.
    fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p_bright_given_dark, self.p_dark_given_bright],
            [self.p_bright_given_dark, 1.0 - self.p_dark_given_bright],
        ]
    }
}

/// Assigned detection ion per mode and the readout errors of each ion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    pub mode_ions: Vec<usize>,
    pub ion_confusion: Vec<Confusion>,
}

impl DetectionModel {
    pub fn ideal(n_modes: usize) -> Self {
        Self {
            mode_ions: (0..n_modes).collect(),
            ion_confusion: vec![Confusion::IDEAL; n_modes],
        }
    }

    pub fn uniform(n_modes: usize, c: Confusion) -> Self {
        Self {
            mode_ions: (0..n_modes).collect(),
            ion_confusion: vec![c; n_modes],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mode_ions.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (m, &ion) in self.mode_ions.iter().enumerate() {
            let c = self.ion_confusion.get(ion).ok_or_else(|| {
                Error::invalid("mode_ions", format!("mode {} uses unknown ion {}", m + 1, ion + 1))
            })?;
            for v in [c.p_bright_given_dark, c.p_dark_given_bright] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid("ion_confusion", format!("{v} is not a probability")));
                }
            }
        }
        Ok(())
    }

    fn confusion_for_mode(&self, m: usize) -> Confusion {
        self.ion_confusion[self.mode_ions[m]]
    }

    /// Applies a 2x2 map along every mode axis of a `2^M` vector indexed by pattern mask.
    fn apply_per_mode(&self, v: &mut [f64], maps: &[[[f64; 2]; 2]]) {
        for (m, a) in maps.iter().enumerate() {
            let bit = 1usize << m;
            for i in 0..v.len() {
                if i & bit == 0 {
                    let (x0, x1) = (v[i], v[i | bit]);
                    v[i] = a[0][0] * x0 + a[0][1] * x1;
                    v[i | bit] = a[1][0] * x0 + a[1][1] * x1;
                }
            }
        }
    }

    /// Observed pattern distribution for a true one.
    pub fn apply(&self, truth: &BTreeMap<Pattern, f64>) -> Result<BTreeMap<Pattern, f64>> {
        self.validate()?;
        let m = self.n_modes();
        let mut v = dense(truth, m)?;
        let maps: Vec<_> = (0..m).map(|k| self.confusion_for_mode(k).matrix()).collect();
        self.apply_per_mode(&mut v, &maps);
        Ok(sparse(&v, m))
    }
}

fn dense(dist: &BTreeMap<Pattern, f64>, m: usize) -> Result<Vec<f64>> {
    let mut v = vec![0.0; 1 << m];
    for (p, &x) in dist {
        if p.0.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "pattern {p} has {} modes, detection model has {m}",
                p.0.len()
            )));
        }
        v[p.to_mask()] += x;
    }
    Ok(v)
}

fn sparse(v: &[f64], m: usize) -> BTreeMap<Pattern, f64> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(i, &x)| (Pattern::from_mask(i, m), x))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectedReadout {
    pub probabilities: BTreeMap<Pattern, f64>,
    /// Total negative probability removed before renormalizing.
    pub clipped_mass: f64,
}

/// Inverts the per-mode confusion on observed pattern counts, clips negative
/// entries and renormalizes.
pub fn correct_readout(counts: &BTreeMap<Pattern, f64>, model: &DetectionModel) -> Result<CorrectedReadout> {
    model.validate()?;
    let m = model.n_modes();
    if counts.values().any(|&c| c < 0.0 || !c.is_finite()) {
        return Err(Error::invalid("counts", "must be finite and non-negative"));
    }
    let mut v = dense(counts, m)?;
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("counts", "no events recorded"));
    }
    v.iter_mut().for_each(|x| *x /= total);
    let mut inverses = Vec::with_capacity(m);
    for k in 0..m {
        let c = model.confusion_for_mode(k);
        let det = 1.0 - c.p_bright_given_dark - c.p_dark_given_bright;
        if det <= 1e-12 {
            return Err(Error::SingularConfusion { mode: k });
        }
        let a = c.matrix();
        inverses.push([
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ]);
    }
    model.apply_per_mode(&mut v, &inverses);
    let clipped: f64 = v.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    let kept: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= kept);
    Ok(CorrectedReadout {
        probabilities: sparse(&v, m),
        clipped_mass: clipped,
    })
}
