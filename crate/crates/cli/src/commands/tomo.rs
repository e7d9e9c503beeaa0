use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use phononet::fock::parse_state;
use phononet::network::{presets, theta_to_table, ConfigFile, Confusion, DetectionModel, InterferometerConfig};
use phononet::tomography::*;
use phononet::Exec;
use serde::Serialize;
use serde_json::json;

use crate::args::{load_configs, read_json};
use crate::error::{CliError, CliResult};
use crate::output::{Artifact, Table};

#[derive(Args, Debug, Serialize)]
pub struct TomographyArgs {
    /// Interferometer settings: each file holds one configuration or an array of them
    /// (repeatable); defaults to the built-in Table IV interferometer
    #[arg(long)]
    pub config: Vec<PathBuf>,
    /// True input state, e.g. "(|10>+|01>)/sqrt2"; simulated and used as the fidelity target
    #[arg(long, required_unless_present = "records")]
    pub input: Option<String>,
    /// Measured counts (JSON array of per-setting records) to reconstruct instead of simulating
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Input modes when reconstructing records without --input
    #[arg(long, default_value_t = 2)]
    pub input_modes: usize,
    /// Phonon number when reconstructing records without --input
    #[arg(long, default_value_t = 1)]
    pub phonons: usize,
    /// Symmetric per-ion readout error of binary fluorescence detection
    #[arg(long)]
    pub readout_error: Option<f64>,
    /// Invert the readout confusion before reconstruction
    #[arg(long, requires = "readout_error")]
    pub correct_readout: bool,
    /// Also write the superoperator
    #[arg(long)]
    pub dump_superoperator: bool,
}

fn settings(paths: &[PathBuf]) -> CliResult<Vec<InterferometerConfig>> {
    if paths.is_empty() {
        return Ok(vec![presets::table_iv()]);
    }
    let mut out = Vec::new();
    for p in paths {
        out.extend(load_configs(p)?);
    }
    Ok(out)
}

fn ancillas(total: usize, input_modes: usize) -> CliResult<usize> {
    total.checked_sub(input_modes).ok_or_else(|| {
        CliError::Parse(format!(
            "the input has {input_modes} modes but the interferometer has only {total}"
        ))
    })
}

pub fn tomography(a: &TomographyArgs, shots: u64, seed: u64) -> CliResult<Artifact> {
    let settings = settings(&a.config)?;
    let total = settings[0].n_modes;
    let target = a.input.as_deref().map(parse_state).transpose()?;
    let (k, n) = match &target {
        Some(psi) => (psi.sector().n_modes(), psi.sector().n_phonons()),
        None => (a.input_modes, a.phonons),
    };
    let setup = TomographySetup::new(k, ancillas(total, k)?, n, settings)?;
    let l = build_superoperator(&setup)?;
    let detection = a
        .readout_error
        .map(|e| DetectionModel::uniform(total, Confusion::symmetric(e)));
    let mut art = Artifact::new("tomography");
    let p = match (&a.records, &target) {
        (Some(path), _) => {
            let recs: Vec<MeasurementRecord> = read_json(path)?;
            probabilities_from_records(&recs, &setup, detection.as_ref(), a.correct_readout)?
        }
        (None, Some(psi)) => {
            let opts = MeasurementOptions {
                shots,
                seed,
                detection: detection.clone(),
                correct_readout: a.correct_readout,
            };
            let sim = simulate_measurement(&psi.density(), &setup, &opts)?;
            if !sim.records.is_empty() {
                art.extra.push(("records.json".into(), json!(sim.records)));
            }
            sim.probabilities
        }
        (None, None) => unreachable!("clap requires --input or --records"),
    };
    let target_rho = target.as_ref().map(|psi| psi.density().into_matrix());
    let r = reconstruct(&p, &l, target_rho.as_ref())?;

    let mut rho = Table::new("rho", &["row", "col", "ket_row", "ket_col", "re", "im", "re_raw", "im_raw"]);
    for (i, bi) in r.input_basis.iter().enumerate() {
        for (j, bj) in r.input_basis.iter().enumerate() {
            rho.push(vec![
                (i + 1).into(),
                (j + 1).into(),
                bi.to_string().into(),
                bj.to_string().into(),
                r.rho_ml[(i, j)].re.into(),
                r.rho_ml[(i, j)].im.into(),
                r.rho_raw[(i, j)].re.into(),
                r.rho_raw[(i, j)].im.into(),
            ]);
        }
    }
    let mut probs = Table::new("probabilities", &["setting", "occupation", "p"]);
    for (i, &x) in p.iter().enumerate() {
        let (g, nu) = (i / l.output_dim(), i % l.output_dim());
        probs.push(vec![(g + 1).into(), l.output_basis[nu].to_string().into(), x.into()]);
    }
    art.tables.extend([rho, probs]);
    if a.dump_superoperator {
        art.extra.push(("superoperator.json".into(), l.to_json()));
    }
    art.summary = json!({
        "fidelity": r.fidelity,
        "purity": r.purity,
        "condition_number": r.condition_number,
        "clipped_eigenmass": r.clipped_eigenmass,
        "dropped_singular_values": r.dropped_singular_values,
        "settings": setup.settings.len(),
    });
    art.result = json!({ "reconstruction": r, "probabilities": p });
    Ok(art)
}

#[derive(Args, Debug, Serialize)]
pub struct OptimizeArgs {
    /// Settings of the two-mode template: one beam splitter each, shared angle, free phases
    #[arg(long, default_value_t = 3)]
    pub settings: usize,
    /// Phonon number of the states to be reconstructed
    #[arg(long, default_value_t = 1)]
    pub phonons: usize,
    /// Optimize every angle and phase of these configurations instead (repeatable)
    #[arg(long)]
    pub config: Vec<PathBuf>,
    /// Input modes for --config settings; the remaining modes are ancillas
    #[arg(long, default_value_t = 2)]
    pub input_modes: usize,
    /// Random starts of the Nelder-Mead search
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    /// Iteration cap per start
    #[arg(long, default_value_t = 4000)]
    pub max_iters: u64,
}

pub fn optimize(a: &OptimizeArgs, seed: u64) -> CliResult<Artifact> {
    let template = if a.config.is_empty() {
        ConfigTemplate::single_bs(a.settings, a.phonons)?
    } else {
        let cfgs = settings(&a.config)?;
        let total = cfgs[0].n_modes;
        let setup = TomographySetup::new(a.input_modes, ancillas(total, a.input_modes)?, a.phonons, cfgs)?;
        ConfigTemplate::all_free(setup)?
    };
    let opts = OptimizeOptions {
        starts: a.starts,
        seed,
        max_iters: a.max_iters,
    };
    let best = optimize_configuration(&template, &opts, Exec::default())?;
    let mut t = Table::new(
        "optimize_config",
        &["setting", "bs", "mode_m", "mode_n", "ion", "theta_pi_units", "phi_pi_units"],
    );
    for (g, cfg) in best.setup.settings.iter().enumerate() {
        for (b, bs) in cfg.beamsplitters.iter().enumerate() {
            t.push(vec![
                (g + 1).into(),
                (b + 1).into(),
                (bs.mode_m + 1).into(),
                (bs.mode_n + 1).into(),
                (bs.ion + 1).into(),
                theta_to_table(bs.theta).into(),
                (bs.phi / PI).into(),
            ]);
        }
    }
    let files: Vec<ConfigFile> = best.setup.settings.iter().map(ConfigFile::from_config).collect();
    let mut art = Artifact::new("optimize_config");
    art.tables.push(t);
    art.extra.push(("configs.json".into(), json!(files)));
    art.summary = json!({
        "det_gram": best.det,
        "log_det_gram": best.log_det,
        "regular_starts": best.regular_starts,
        "starts": a.starts,
    });
    art.result = json!({ "optimum": best, "configs": files });
    Ok(art)
}
