use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use clap::Args;
use phononet::fock::{forward_probabilities, lift_unitary, parse_state, DensityMatrix, FockSector, FockState};
use phononet::ionchain::{assign_ion_for_pair, fit_axial_frequency, ModeTable, TrapParams};
use phononet::network::{
    bs_mode_unitary, compensate_phases, compose_interferometer, compose_with_stark_phases, presets,
    BeamSplitterSpec, InterferometerConfig, PhysicalParams,
};
use phononet::dynamics::reduced_bs_simulation;
use phononet::tomography::sample_counts;
use serde::Serialize;
use serde_json::json;

use crate::args::{load_configs, parse_grid, parse_pair, Grid, ModePair};
use crate::error::{CliError, CliResult};
use crate::output::{Artifact, Cell, Table};

/// Mode table of the five-ion chain fitted to its measured spectrum.
pub fn five_ion_modes() -> CliResult<ModeTable> {
    let guess = TrapParams::yb171(5, presets::FIVE_ION_SPECTRUM_HZ[4], 0.4e6);
    Ok(fit_axial_frequency(&presets::FIVE_ION_SPECTRUM_HZ, &guess)?.modes)
}

#[derive(Args, Debug, Serialize)]
pub struct BsScanArgs {
    /// Driven mode pair, 1-based in order of ascending frequency
    #[arg(long, value_parser = parse_pair, default_value = "1,2")]
    pub pair: ModePair,
    /// Assisting ion (1-based); defaults to the ion with the largest coupling product
    #[arg(long)]
    pub ion: Option<usize>,
    /// Detuning from both red sidebands (Hz)
    #[arg(long, default_value_t = -10e3, allow_hyphen_values = true)]
    pub delta_hz: f64,
    /// Sideband coupling of the first mode (Hz)
    #[arg(long, default_value_t = 6.3e3)]
    pub coupling_m_hz: f64,
    /// Sideband coupling of the second mode (Hz)
    #[arg(long, default_value_t = 6.3e3)]
    pub coupling_n_hz: f64,
    /// Raised-sine edge length as a fraction of the pulse
    #[arg(long, default_value_t = 0.1)]
    pub ramp: f64,
    /// Pulse durations (s) as start:stop:count
    #[arg(long, value_parser = parse_grid, default_value = "0:600e-6:61")]
    pub durations: Grid,
    /// Also integrate the two-mode time-domain model (spin, carrier and both sidebands)
    #[arg(long)]
    pub simulate: bool,
}

pub fn bs_scan(a: &BsScanArgs) -> CliResult<Artifact> {
    let modes = five_ion_modes()?;
    let (m, n) = (a.pair.0 - 1, a.pair.1 - 1);
    let ion = match a.ion {
        Some(0) => return Err(CliError::Parse("--ion is 1-based".into())),
        Some(j) if j > modes.n_ions() => {
            return Err(phononet::Error::InvalidParameter {
                field: "--ion".into(),
                reason: format!("the chain has {} ions", modes.n_ions()),
            }
            .into())
        }
        Some(j) => j - 1,
        None => assign_ion_for_pair(&modes, m, n)?,
    };
    let mut cols = vec!["duration_s", "theta_rad", "p_m", "p_n"];
    if a.simulate {
        cols.extend(["p_m_sim", "p_n_sim"]);
    }
    let mut t = Table::new("bs_scan", &cols);
    for &d in &a.durations.0 {
        let p = PhysicalParams {
            delta_hz: a.delta_hz,
            coupling_m_hz: a.coupling_m_hz,
            coupling_n_hz: a.coupling_n_hz,
            duration_s: d,
            ramp_fraction: a.ramp,
        };
        let spec = BeamSplitterSpec::from_physical(m, n, ion, 0.0, p)?;
        let (s, c) = spec.theta.sin_cos();
        let mut row: Vec<Cell> = vec![d.into(), spec.theta.into(), (c * c).into(), (s * s).into()];
        if a.simulate {
            let (pm, pn) = if d > 0.0 {
                let tr = reduced_bs_simulation(&spec, &modes, 1)?;
                let last = tr.mode_populations.last().expect("final sample");
                (last[0], last[1])
            } else {
                (1.0, 0.0)
            };
            row.extend([pm.into(), pn.into()]);
        }
        t.push(row);
    }
    let mut art = Artifact::new("bs_scan");
    let rate = a.coupling_m_hz * a.coupling_n_hz / (4.0 * a.delta_hz.abs());
    art.summary = json!({
        "modes": [m + 1, n + 1],
        "ion": ion + 1,
        "exchange_rate_hz": rate,
        "fifty_fifty_duration_s": FRAC_PI_4 / (2.0 * std::f64::consts::PI * rate * (1.0 - a.ramp)),
    });
    art.result = art.summary.clone();
    art.tables.push(t);
    Ok(art)
}

#[derive(Args, Debug, Serialize)]
pub struct HomArgs {
    /// Beam-splitter angles (rad) as start:stop:count; `pi` factors are accepted
    #[arg(long, value_parser = parse_grid, default_value = "0:0.5pi:201")]
    pub theta_scan: Grid,
}

pub fn hom(a: &HomArgs) -> CliResult<Artifact> {
    let sector = FockSector::new(2, 2)?;
    let input = FockState::basis_state(sector.clone(), &[1, 1])?.density();
    let idx = |o: &[u32]| sector.index_of_slice(o).expect("two-phonon state");
    let (i11, i20, i02) = (idx(&[1, 1]), idx(&[2, 0]), idx(&[0, 2]));
    let mut t = Table::new("hom", &["theta_rad", "p_11", "p_20", "p_02"]);
    let mut dip = (f64::INFINITY, 0.0);
    for &theta in &a.theta_scan.0 {
        let u = bs_mode_unitary(&BeamSplitterSpec::new(0, 1, 0, theta, 0.0), 2)?;
        let p = forward_probabilities(&input, &lift_unitary(&u, &sector)?)?;
        if p[i11] < dip.0 {
            dip = (p[i11], theta);
        }
        t.push(vec![theta.into(), p[i11].into(), p[i20].into(), p[i02].into()]);
    }
    let mut art = Artifact::new("hom");
    if t.rows.is_empty() {
        art.tables.push(t);
        return Ok(art);
    }
    // distinguishable phonons give a coincidence probability of 1/2 at 50:50
    art.summary = json!({
        "min_p_11": dip.0,
        "theta_at_min_rad": dip.1,
        "visibility": 1.0 - dip.0 / 0.5,
    });
    art.result = art.summary.clone();
    art.tables.push(t);
    Ok(art)
}

#[derive(Args, Debug, Serialize)]
pub struct PhaseScanArgs {
    /// Configuration file (one object or an array whose first entry is used);
    /// defaults to the built-in Table IV interferometer
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input state on the leading modes, e.g. "(|1000>+|0100>)/sqrt2"; other modes start empty
    #[arg(long, default_value = "(|1000>+|0100>)/sqrt2")]
    pub input: String,
    /// Beam splitter whose phase is scanned (1-based, default: the last)
    #[arg(long)]
    pub bs: Option<usize>,
    /// Phases (rad) as start:stop:count
    #[arg(long, value_parser = parse_grid, default_value = "0:2pi:61")]
    pub phi: Grid,
    /// Apply the ac Stark phases of the five-ion chain after every pulse (needs drive parameters)
    #[arg(long)]
    pub stark: bool,
    /// Pre-compensate the Stark phases; the scanned phase is then relative to the compensated value
    #[arg(long, requires = "stark")]
    pub compensate: bool,
}

fn padded_input(text: &str, n_modes: usize) -> CliResult<DensityMatrix> {
    let psi = parse_state(text)?;
    let k = psi.sector().n_modes();
    if k > n_modes {
        return Err(CliError::Parse(format!(
            "input has {k} modes but the interferometer has {n_modes}"
        )));
    }
    Ok(psi.density().with_ancillas(n_modes - k)?)
}

pub fn phase_scan(a: &PhaseScanArgs, shots: u64, seed: u64) -> CliResult<Artifact> {
    let base = match &a.config {
        Some(p) => load_configs(p)?.swap_remove(0),
        None if a.stark => presets::table_iv_physical(0.1),
        None => presets::table_iv(),
    };
    let k = match a.bs {
        Some(0) => return Err(CliError::Parse("--bs is 1-based".into())),
        Some(k) if k > base.beamsplitters.len() => {
            return Err(CliError::Parse(format!(
                "--bs {k}: the configuration has {} beam splitters",
                base.beamsplitters.len()
            )))
        }
        Some(k) => k - 1,
        None => base
            .beamsplitters
            .len()
            .checked_sub(1)
            .ok_or_else(|| CliError::Parse("the configuration has no beam splitters".into()))?,
    };
    let rho = padded_input(&a.input, base.n_modes)?;
    let sector = rho.sector().clone();
    let modes = if a.stark { Some(five_ion_modes()?) } else { None };
    let (cfg, offset) = match (&modes, a.compensate) {
        (Some(md), true) => {
            let c = compensate_phases(&base, md)?;
            let off = c.beamsplitters[k].phi - base.beamsplitters[k].phi;
            (c, off)
        }
        _ => (base.clone(), 0.0),
    };
    let probs = a
        .phi
        .0
        .iter()
        .map(|&phi| -> CliResult<Vec<f64>> {
            let mut c: InterferometerConfig = cfg.clone();
            c.beamsplitters[k].phi = phi + offset;
            let v = match &modes {
                Some(md) => compose_with_stark_phases(&c, md)?,
                None => compose_interferometer(&c)?,
            };
            Ok(forward_probabilities(&rho, &lift_unitary(&v, &sector)?)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let estimates: Vec<Vec<f64>> = if shots > 0 {
        sample_counts(&probs, shots, seed)
            .into_iter()
            .map(|c| c.into_iter().map(|x| x as f64 / shots as f64).collect())
            .collect()
    } else {
        probs
    };
    let labels: Vec<String> = sector.basis().iter().map(|o| format!("p_{o}")).collect();
    let mut columns = vec!["phi_rad".to_string()];
    columns.extend(labels.iter().cloned());
    let mut t = Table::with_columns("phase_scan", columns);
    for (phi, p) in a.phi.0.iter().zip(&estimates) {
        let mut row: Vec<Cell> = vec![(*phi).into()];
        row.extend(p.iter().map(|&x| x.into()));
        t.push(row);
    }
    let peaks: serde_json::Map<String, serde_json::Value> = labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| {
            let best = a
                .phi
                .0
                .iter()
                .zip(&estimates)
                .max_by(|x, y| x.1[i].total_cmp(&y.1[i]))?;
            Some((l.clone(), json!(best.0)))
        })
        .collect();
    let mut art = Artifact::new("phase_scan");
    art.summary = json!({
        "scanned_bs": k + 1,
        "compensation_offset_rad": offset,
        "phi_at_max_rad": peaks,
    });
    art.result = art.summary.clone();
    art.tables.push(t);
    Ok(art)
}
