use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::TomographySetup;
use crate::error::{Error, Result};
use crate::fock::{forward_probabilities, lift_unitary, DensityMatrix, FockSector, Occupation};
use crate::network::{
    binary_pattern_distribution, compose_interferometer, correct_readout, infer_fock_from_binary, DetectionModel,
    Pattern,
};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOptions {
    /// Repetitions per setting; `0` returns exact probabilities.
    pub shots: u64,
    pub seed: u64,
    /// Binary fluorescence readout with confusion; `None` resolves Fock states directly.
    pub detection: Option<DetectionModel>,
    /// Invert the readout confusion before mapping patterns back to Fock states.
    #[serde(default)]
    pub correct_readout: bool,
}

/// One measured outcome: either a resolved occupation or a bright/dark pattern.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupation: Option<Occupation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Pattern>,
    pub n: u64,
}

/// Counts of one interferometer setting (`setting_id` is 1-based in files).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub setting_id: usize,
    pub counts: Vec<CountEntry>,
    pub shots: u64,
}

#[derive(Clone, Debug)]
pub struct SimulatedMeasurement {
    /// Output-sector probabilities of all settings, stacked setting-major.
    pub probabilities: Vec<f64>,
    /// Sampled counts; empty when `shots == 0`.
    pub records: Vec<MeasurementRecord>,
}

/// Output probabilities of every setting for an input state on the input modes,
/// computed through the Fock-space propagators.
pub fn exact_probabilities(rho_in: &DensityMatrix, setup: &TomographySetup) -> Result<Vec<Vec<f64>>> {
    setup.validate()?;
    let input = setup.input_sector()?;
    if rho_in.sector().as_ref() != input.as_ref() {
        return Err(Error::DimensionMismatch(format!(
            "input state lives on {} modes with {} phonons, the setup expects {} and {}",
            rho_in.sector().n_modes(),
            rho_in.sector().n_phonons(),
            setup.input_modes,
            setup.n_phonons
        )));
    }
    let padded = rho_in.with_ancillas(setup.ancillas)?;
    setup
        .settings
        .iter()
        .map(|cfg| {
            let v = compose_interferometer(cfg)?;
            let w = lift_unitary(&v, padded.sector())?;
            forward_probabilities(&padded, &w)
        })
        .collect()
}

/// Sequential-binomial multinomial draw.
fn multinomial(rng: &mut ChaCha8Rng, shots: u64, p: &[f64]) -> Vec<u64> {
    let mut left = shots;
    let mut mass: f64 = p.iter().map(|x| x.max(0.0)).sum();
    let mut out = Vec::with_capacity(p.len());
    for (k, &pk) in p.iter().enumerate() {
        let pk = pk.max(0.0);
        let n = if k + 1 == p.len() {
            left
        } else if left == 0 || mass <= 0.0 {
            0
        } else {
            let q = (pk / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).expect("probability in [0, 1]").sample(rng)
        };
        out.push(n);
        left -= n;
        mass -= pk;
    }
    out
}

/// Multinomial counts for each probability vector, drawn from one generator
/// seeded with `seed` in the order given.
pub fn sample_counts(probabilities: &[Vec<f64>], shots: u64, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    probabilities.iter().map(|p| multinomial(&mut rng, shots, p)).collect()
}

/// Exact output probabilities of `rho_in`, optionally sampled with `shots`
/// repetitions per setting and read out through a binary detection model.
///
/// The returned probabilities are the estimates a reconstruction would use: the
/// sampled frequencies, or with detection the Fock distribution inferred from
/// patterns (patterns incompatible with the phonon number are discarded).
pub fn simulate_measurement(
    rho_in: &DensityMatrix,
    setup: &TomographySetup,
    opts: &MeasurementOptions,
) -> Result<SimulatedMeasurement> {
    let exact = exact_probabilities(rho_in, setup)?;
    let output = setup.output_sector()?;
    if opts.shots == 0 && opts.detection.is_none() {
        return Ok(SimulatedMeasurement {
            probabilities: exact.concat(),
            records: Vec::new(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut records = Vec::with_capacity(exact.len());
    let mut probabilities = Vec::with_capacity(exact.len() * output.dim());
    for (g, p) in exact.iter().enumerate() {
        match &opts.detection {
            None => {
                let counts = multinomial(&mut rng, opts.shots, p);
                probabilities.extend(counts.iter().map(|&n| n as f64 / opts.shots as f64));
                records.push(MeasurementRecord {
                    setting_id: g + 1,
                    shots: opts.shots,
                    counts: output
                        .basis()
                        .iter()
                        .zip(&counts)
                        .map(|(o, &n)| CountEntry {
                            occupation: Some(o.clone()),
                            pattern: None,
                            n,
                        })
                        .collect(),
                });
            }
            Some(model) => {
                let observed = model.apply(&binary_pattern_distribution(&output, p))?;
                let weights: BTreeMap<Pattern, f64> = if opts.shots == 0 {
                    observed
                } else {
                    let (patterns, ps): (Vec<Pattern>, Vec<f64>) = observed.into_iter().unzip();
                    let counts = multinomial(&mut rng, opts.shots, &ps);
                    records.push(MeasurementRecord {
                        setting_id: g + 1,
                        shots: opts.shots,
                        counts: patterns
                            .iter()
                            .zip(&counts)
                            .map(|(pat, &n)| CountEntry {
                                occupation: None,
                                pattern: Some(pat.clone()),
                                n,
                            })
                            .collect(),
                    });
                    patterns.into_iter().zip(counts.into_iter().map(|n| n as f64)).collect()
                };
                probabilities.extend(patterns_to_fock(&weights, &output, model, opts.correct_readout)?);
            }
        }
    }
    Ok(SimulatedMeasurement { probabilities, records })
}

fn patterns_to_fock(
    weights: &BTreeMap<Pattern, f64>,
    output: &FockSector,
    model: &DetectionModel,
    correct: bool,
) -> Result<Vec<f64>> {
    let dist = if correct {
        correct_readout(weights, model)?.probabilities
    } else {
        weights.clone()
    };
    let mut p = vec![0.0; output.dim()];
    for (pat, &w) in &dist {
        match infer_fock_from_binary(pat, output.n_phonons()) {
            Ok(occ) => {
                let i = output
                    .index_of(&occ)
                    .ok_or_else(|| Error::DimensionMismatch(format!("pattern {pat} outside the output sector")))?;
                p[i] += w;
            }
            Err(Error::LostPhonon { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let kept: f64 = p.iter().sum();
    if kept <= 0.0 {
        return Err(Error::Validation("no pattern is compatible with the phonon number".into()));
    }
    p.iter_mut().for_each(|x| *x /= kept);
    Ok(p)
}

/// Stacked probability estimate from measurement records, one per setting in
/// order of `setting_id`.
pub fn probabilities_from_records(
    records: &[MeasurementRecord],
    setup: &TomographySetup,
    detection: Option<&DetectionModel>,
    correct: bool,
) -> Result<Vec<f64>> {
    let output = setup.output_sector()?;
    let mut sorted: Vec<&MeasurementRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.setting_id);
    let ids: Vec<usize> = sorted.iter().map(|r| r.setting_id).collect();
    if ids != (1..=setup.settings.len()).collect::<Vec<_>>() {
        return Err(Error::invalid(
            "setting_id",
            format!("expected settings 1..={}, found {ids:?}", setup.settings.len()),
        ));
    }
    let mut out = Vec::with_capacity(output.dim() * sorted.len());
    for r in sorted {
        let total: u64 = r.counts.iter().map(|c| c.n).sum();
        if total == 0 {
            return Err(Error::invalid("counts", format!("setting {} has no events", r.setting_id)));
        }
        let mut fock = vec![0.0; output.dim()];
        let mut patterns = BTreeMap::new();
        for c in &r.counts {
            match (&c.occupation, &c.pattern) {
                (Some(o), None) => {
                    let i = output.index_of(o).ok_or_else(|| {
                        Error::invalid("occupation", format!("{o} is not in the {}-phonon output sector", output.n_phonons()))
                    })?;
                    fock[i] += c.n as f64;
                }
                (None, Some(p)) => *patterns.entry(p.clone()).or_insert(0.0) += c.n as f64,
                _ => {
                    return Err(Error::invalid(
                        "counts",
                        "each entry needs exactly one of `occupation` or `pattern`",
                    ))
                }
            }
        }
        if !patterns.is_empty() {
            if fock.iter().any(|&x| x > 0.0) {
                return Err(Error::invalid("counts", "mixed occupation and pattern entries"));
            }
            let ideal = DetectionModel::ideal(setup.total_modes());
            out.extend(patterns_to_fock(&patterns, &output, detection.unwrap_or(&ideal), correct)?);
        } else {
            out.extend(fock.iter().map(|x| x / total as f64));
        }
    }
    Ok(out)
}
