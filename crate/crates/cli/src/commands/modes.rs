use std::path::PathBuf;

use clap::Args;
use phononet::ionchain::{assign_ion_for_mode, fit_axial_frequency, Chain, TrapParams};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::read_json;
use crate::error::CliResult;
use crate::output::{Artifact, Table};

#[derive(Args, Debug, Serialize)]
pub struct ModesArgs {
    /// Number of ions in the chain
    #[arg(long, default_value_t = 5)]
    pub ions: usize,
    /// Transverse centre-of-mass frequency (Hz)
    #[arg(long, default_value_t = 2.153e6)]
    pub nu_com_hz: f64,
    /// Axial trap frequency (Hz); ignored with --spacing-um or --fit-spectrum
    #[arg(long, default_value_t = 0.4e6)]
    pub nu_axial_hz: f64,
    /// Equal ion spacing (um) instead of a harmonic axial trap
    #[arg(long, conflicts_with = "fit_spectrum")]
    pub spacing_um: Option<f64>,
    /// JSON file with measured transverse frequencies (Hz): a list, or {"frequencies_hz": [...]}
    #[arg(long)]
    pub fit_spectrum: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Spectrum {
    List(Vec<f64>),
    Object { frequencies_hz: Vec<f64> },
}

pub fn run(a: &ModesArgs) -> CliResult<Artifact> {
    let mut params = match a.spacing_um {
        Some(d) => TrapParams::yb171_equal(a.ions, a.nu_com_hz, d * 1e-6),
        None => TrapParams::yb171(a.ions, a.nu_com_hz, a.nu_axial_hz),
    };
    let mut art = Artifact::new("modes");
    let mut fit_summary = serde_json::Value::Null;
    if let Some(path) = &a.fit_spectrum {
        let measured = match read_json::<Spectrum>(path)? {
            Spectrum::List(v) | Spectrum::Object { frequencies_hz: v } => v,
        };
        let fit = fit_axial_frequency(&measured, &params)?;
        fit_summary = json!({
            "measured_hz": measured,
            "nu_axial_hz": fit.nu_axial,
            "nu_com_hz": fit.nu_com,
            "rms_residual_hz": fit.rms_residual_hz,
        });
        params = fit.params;
    }
    let chain = Chain::new(params)?;
    let modes = &chain.modes;
    let assigned = (0..modes.n_modes())
        .map(|m| assign_ion_for_mode(modes, m).map(|j| j + 1))
        .collect::<Result<Vec<_>, _>>()?;

    let mut t = Table::new("modes", &["mode", "freq_hz", "ion", "b", "eta"]);
    for m in 0..modes.n_modes() {
        for j in 0..modes.n_ions() {
            t.push(vec![
                (m + 1).into(),
                modes.frequencies[m].into(),
                (j + 1).into(),
                modes.mode_vectors[(j, m)].into(),
                modes.eta(j, m).into(),
            ]);
        }
    }
    art.tables.push(t);
    art.result = json!({
        "chain": chain.report(),
        "assigned_ion": assigned,
        "fit": fit_summary,
    });
    art.summary = json!({
        "n_ions": a.ions,
        "lowest_hz": modes.frequencies[0],
        "com_hz": modes.frequencies[modes.com_index()],
        "assigned_ion": assigned,
        "fit": fit_summary,
    });
    Ok(art)
}
