use std::f64::consts::PI;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_superoperator_with, TomographySetup};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::hermitian_eigen;
use crate::network::{BeamSplitterSpec, InterferometerConfig};

/// Eigenvalue ratio of `L^dag L` below which the template counts as singular.
const SINGULAR_RATIO: f64 = 1e-12;
/// Objective value assigned to singular points during the search.
const SINGULAR_PENALTY: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    Theta,
    Phi,
}

/// One optimized scalar, written into every listed `(setting, beam splitter)` slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub kind: ParameterKind,
    pub targets: Vec<(usize, usize)>,
}

impl FreeParameter {
    fn range(&self) -> f64 {
        match self.kind {
            ParameterKind::Theta => PI,
            ParameterKind::Phi => 2.0 * PI,
        }
    }
}

/// Interferometer settings with some angles and phases left free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigTemplate {
    pub setup: TomographySetup,
    pub parameters: Vec<FreeParameter>,
}

impl ConfigTemplate {
    pub fn new(setup: TomographySetup, parameters: Vec<FreeParameter>) -> Result<Self> {
        setup.validate()?;
        if parameters.is_empty() {
            return Err(Error::invalid("parameters", "the template has nothing to optimize"));
        }
        for p in &parameters {
            for &(g, k) in &p.targets {
                let n = setup.settings.get(g).map(|c| c.beamsplitters.len());
                if n.is_none_or(|n| k >= n) {
                    return Err(Error::invalid(
                        "parameters",
                        format!("no beam splitter {} in setting {}", k + 1, g + 1),
                    ));
                }
            }
        }
        Ok(Self { setup, parameters })
    }

    /// Two modes, one beam splitter per setting: a shared angle and independent
    /// phases in `settings` settings, the first phase pinned to zero.
    pub fn single_bs(settings: usize, n_phonons: usize) -> Result<Self> {
        let cfgs = (0..settings)
            .map(|_| InterferometerConfig::new(2, vec![BeamSplitterSpec::new(0, 1, 0, PI / 8.0, 0.0)]))
            .collect();
        let setup = TomographySetup::new(2, 0, n_phonons, cfgs)?;
        let mut params = vec![FreeParameter {
            kind: ParameterKind::Theta,
            targets: (0..settings).map(|g| (g, 0)).collect(),
        }];
        params.extend((1..settings).map(|g| FreeParameter {
            kind: ParameterKind::Phi,
            targets: vec![(g, 0)],
        }));
        Self::new(setup, params)
    }

    /// Every angle and phase of every setting free.
    pub fn all_free(setup: TomographySetup) -> Result<Self> {
        let mut params = Vec::new();
        for (g, cfg) in setup.settings.iter().enumerate() {
            for k in 0..cfg.beamsplitters.len() {
                for kind in [ParameterKind::Theta, ParameterKind::Phi] {
                    params.push(FreeParameter {
                        kind,
                        targets: vec![(g, k)],
                    });
                }
            }
        }
        Self::new(setup, params)
    }

    pub fn instantiate(&self, x: &[f64]) -> TomographySetup {
        let mut setup = self.setup.clone();
        for (p, &v) in self.parameters.iter().zip(x) {
            let v = v.rem_euclid(p.range());
            for &(g, k) in &p.targets {
                let bs = &mut setup.settings[g].beamsplitters[k];
                match p.kind {
                    ParameterKind::Theta => bs.theta = v,
                    ParameterKind::Phi => bs.phi = v,
                }
            }
        }
        setup
    }
}

/// `ln det(L^dag L)`, or `None` when the Gram matrix is singular.
pub fn log_det_gram(setup: &TomographySetup) -> Result<Option<f64>> {
    let l = build_superoperator_with(setup, Exec::Sequential)?;
    let (vals, _) = hermitian_eigen(&l.gram());
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 || vals[0] <= SINGULAR_RATIO * top {
        return Ok(None);
    }
    Ok(Some(vals.iter().map(|v| v.ln()).sum()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            max_iters: 4000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizedConfiguration {
    pub setup: TomographySetup,
    /// Optimized values, reduced to their parameter box.
    pub parameters: Vec<f64>,
    pub log_det: f64,
    pub det: f64,
    /// Starts that ended at a non-singular point.
    pub regular_starts: usize,
}

struct Objective<'a>(&'a ConfigTemplate);

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(match log_det_gram(&self.0.instantiate(x))? {
            Some(v) => -v,
            None => SINGULAR_PENALTY,
        })
    }
}

fn local_search(template: &ConfigTemplate, x0: Vec<f64>, max_iters: u64) -> Result<Vec<f64>> {
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += 0.1 * template.parameters[i].range();
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .map_err(|e| Error::SolverFailure(e.to_string()))?;
    let res = Executor::new(Objective(template), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(|e| Error::SolverFailure(e.to_string()))?;
    Ok(res.state().get_best_param().cloned().unwrap_or(x0))
}

/// Multi-start Nelder-Mead maximization of `ln det(L^dag L)`.
///
/// Start `i` is drawn uniformly from the parameter box with a generator seeded by
/// `seed + i`, so the result is reproducible and independent of `exec`.
pub fn optimize_configuration(template: &ConfigTemplate, opts: &OptimizeOptions, exec: Exec) -> Result<OptimizedConfiguration> {
    if opts.starts == 0 {
        return Err(Error::invalid("starts", "at least one start is required"));
    }
    let runs = exec.try_map_range(opts.starts, |i| -> Result<Option<(f64, Vec<f64>)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let x0: Vec<f64> = template.parameters.iter().map(|p| rng.random::<f64>() * p.range()).collect();
        let x = local_search(template, x0, opts.max_iters)?;
        Ok(log_det_gram(&template.instantiate(&x))?.map(|v| (v, x)))
    })?;
    let regular = runs.iter().flatten().count();
    let (log_det, x) = runs
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .ok_or(Error::DegenerateTemplate)?;
    let parameters: Vec<f64> = template
        .parameters
        .iter()
        .zip(&x)
        .map(|(p, v)| v.rem_euclid(p.range()))
        .collect();
    Ok(OptimizedConfiguration {
        setup: template.instantiate(&parameters),
        parameters,
        log_det,
        det: log_det.exp(),
        regular_starts: regular,
    })
}
