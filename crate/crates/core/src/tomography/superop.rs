use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{lift_unitary, FockSector, Occupation};
use crate::linalg::{CMat, C64};
use crate::network::{compose_interferometer, InterferometerConfig};

/// Input sector, vacuum ancillas and the interferometer settings of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographySetup {
    pub input_modes: usize,
    pub ancillas: usize,
    pub n_phonons: usize,
    pub settings: Vec<InterferometerConfig>,
}

impl TomographySetup {
    pub fn new(input_modes: usize, ancillas: usize, n_phonons: usize, settings: Vec<InterferometerConfig>) -> Result<Self> {
        let s = Self {
            input_modes,
            ancillas,
            n_phonons,
            settings,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn total_modes(&self) -> usize {
        self.input_modes + self.ancillas
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_modes == 0 {
            return Err(Error::invalid("input_modes", "at least one input mode is required"));
        }
        if self.n_phonons == 0 {
            return Err(Error::invalid("n_phonons", "the vacuum carries no tomographic information"));
        }
        if self.settings.is_empty() {
            return Err(Error::invalid("settings", "at least one interferometer setting is required"));
        }
        for (g, cfg) in self.settings.iter().enumerate() {
            if cfg.n_modes != self.total_modes() {
                return Err(Error::DimensionMismatch(format!(
                    "setting {} acts on {} modes, the setup has {} input + {} ancilla modes",
                    g + 1,
                    cfg.n_modes,
                    self.input_modes,
                    self.ancillas
                )));
            }
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn input_sector(&self) -> Result<Arc<FockSector>> {
        FockSector::new(self.input_modes, self.n_phonons)
    }

    pub fn output_sector(&self) -> Result<Arc<FockSector>> {
        FockSector::new(self.total_modes(), self.n_phonons)
    }

    /// Output-sector index of every input basis state padded with vacuum.
    pub(crate) fn embedding(&self, input: &FockSector, output: &FockSector) -> Vec<usize> {
        input
            .basis()
            .iter()
            .map(|o| output.index_of(&o.with_vacuum(self.ancillas)).expect("padded occupation"))
            .collect()
    }

    /// Forward Fock propagator of setting `g`, restricted to the embedded input columns.
    pub(crate) fn propagator_columns(&self, g: usize, input: &FockSector, output: &FockSector) -> Result<CMat> {
        let v = compose_interferometer(&self.settings[g])?;
        let w = lift_unitary(&v, output)?;
        let cols = self.embedding(input, output);
        Ok(CMat::from_fn(output.dim(), cols.len(), |nu, a| w[(nu, cols[a])]))
    }
}

/// Linear map from `vec(rho)` to the stacked output probabilities of all settings.
///
/// Row `g * d_out + nu` belongs to output state `nu` of setting `g`; column
/// `alpha * d_in + beta` to the input element `rho[alpha, beta]` (row-major).
#[derive(Clone, Debug)]
pub struct SuperOperator {
    pub matrix: CMat,
    pub input_basis: Vec<Occupation>,
    pub output_basis: Vec<Occupation>,
    pub n_settings: usize,
}

#[derive(Serialize)]
struct SuperOperatorJson<'a> {
    vec_ordering: &'static str,
    row_ordering: &'static str,
    n_settings: usize,
    input_basis: &'a [Occupation],
    output_basis: &'a [Occupation],
    rows: Vec<Vec<[f64; 2]>>,
}

impl SuperOperator {
    pub fn input_dim(&self) -> usize {
        self.input_basis.len()
    }

    pub fn output_dim(&self) -> usize {
        self.output_basis.len()
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// `L vec(rho)`; the imaginary parts vanish for Hermitian `rho`.
    pub fn apply(&self, rho: &CMat) -> Result<Vec<f64>> {
        let d = self.input_dim();
        if rho.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for an input space of dimension {d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let v = crate::linalg::CVec::from_fn(d * d, |k, _| rho[(k / d, k % d)]);
        Ok((&self.matrix * v).iter().map(|z| z.re).collect())
    }

    pub fn gram(&self) -> CMat {
        self.matrix.adjoint() * &self.matrix
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .matrix
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde_json::to_value(SuperOperatorJson {
            vec_ordering: "row-major: column alpha * d_in + beta holds rho[alpha][beta]",
            row_ordering: "setting-major: row g * d_out + nu",
            n_settings: self.n_settings,
            input_basis: &self.input_basis,
            output_basis: &self.output_basis,
            rows,
        })
        .expect("plain data serializes")
    }
}

pub fn build_superoperator(setup: &TomographySetup) -> Result<SuperOperator> {
    build_superoperator_with(setup, Exec::default())
}

/// Assembles `L_{nu g, alpha beta} = W_g[nu, alpha] conj(W_g[nu, beta])` with `W_g`
/// the forward propagator of setting `g`; settings are evaluated with `exec`.
pub fn build_superoperator_with(setup: &TomographySetup, exec: Exec) -> Result<SuperOperator> {
    setup.validate()?;
    let input = setup.input_sector()?;
    let output = setup.output_sector()?;
    let (d_in, d_out) = (input.dim(), output.dim());
    let blocks = exec.try_map_range(setup.settings.len(), |g| setup.propagator_columns(g, &input, &output))?;
    let mut l = CMat::zeros(d_out * blocks.len(), d_in * d_in);
    for (g, w) in blocks.iter().enumerate() {
        for nu in 0..d_out {
            for a in 0..d_in {
                for b in 0..d_in {
                    let z: C64 = w[(nu, a)] * w[(nu, b)].conj();
                    l[(g * d_out + nu, a * d_in + b)] = z;
                }
            }
        }
    }
    Ok(SuperOperator {
        matrix: l,
        input_basis: input.basis().to_vec(),
        output_basis: output.basis().to_vec(),
        n_settings: blocks.len(),
    })
}
