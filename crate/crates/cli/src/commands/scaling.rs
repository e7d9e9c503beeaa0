use clap::Args;
use phononet::dynamics::LANDSCAPE_RAMP;
use phononet::ionchain::{connectivity_stats_with, fifty_fifty_duration, mode_spacing_scaling, SpacingMode, TrapParams};
use phononet::Exec;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_counts, Counts};
use crate::error::CliResult;
use crate::output::{Artifact, Table};

#[derive(Args, Debug, Serialize)]
pub struct ScalingArgs {
    /// Chain lengths as first:last:step or a comma-separated list
    #[arg(long, value_parser = parse_counts, default_value = "10:100:10")]
    pub ions: Counts,
    /// Transverse centre-of-mass frequency (Hz)
    #[arg(long, default_value_t = 5e6)]
    pub nu_com_hz: f64,
    /// Equal ion spacing (um)
    #[arg(long, default_value_t = 5.0)]
    pub spacing_um: f64,
    /// Use a harmonic chain at this axial frequency (Hz) instead of equal spacing
    #[arg(long)]
    pub nu_axial_hz: Option<f64>,
    /// Detuning of the drive in units of the mode spacing
    #[arg(long, default_value_t = 3.0)]
    pub r1: f64,
    /// Detuning over sideband coupling
    #[arg(long, default_value_t = 7.0)]
    pub r2: f64,
    /// Raised-sine edge fraction of the pulse
    #[arg(long, default_value_t = LANDSCAPE_RAMP)]
    pub ramp: f64,
    /// Also tabulate best-ion connectivity statistics
    #[arg(long)]
    pub connectivity: bool,
}

pub fn scaling(a: &ScalingArgs) -> CliResult<Artifact> {
    let (params, mode) = match a.nu_axial_hz {
        Some(nu_z) => (TrapParams::yb171(2, a.nu_com_hz, nu_z), SpacingMode::Harmonic),
        None => (TrapParams::yb171_equal(2, a.nu_com_hz, a.spacing_um * 1e-6), SpacingMode::Equal),
    };
    let rows = mode_spacing_scaling(&a.ions.0, &params, Exec::default())?;
    let mut main = Table::new("scaling", &["n_ions", "spacing_hz", "bs_duration_s"]);
    let mut est = Table::new(
        "estimate",
        &["n_ions", "nu_min_hz", "nu_min_estimate_hz", "spacing_estimate_hz"],
    );
    for r in &rows {
        let t = fifty_fifty_duration(a.r1, a.r2, r.spacing_hz, a.ramp);
        main.push(vec![r.n_ions.into(), r.spacing_hz.into(), t.into()]);
        est.push(vec![
            r.n_ions.into(),
            r.nu_min_hz.into(),
            r.nu_min_estimate_hz.into(),
            r.spacing_estimate_hz.into(),
        ]);
    }
    let mut art = Artifact::new("scaling");
    art.tables.extend([main, est]);
    let mut stats = Vec::new();
    if a.connectivity {
        let mut c = Table::new(
            "connectivity",
            &["n_ions", "fraction_above_threshold", "mean_best_product_times_n", "std_best_product_times_n"],
        );
        for &n in &a.ions.0 {
            let s = connectivity_stats_with(n, mode, Exec::default())?;
            let nf = n as f64;
            c.push(vec![
                n.into(),
                s.fraction_above_threshold.into(),
                (s.mean_best_product * nf).into(),
                (s.std_best_product * nf).into(),
            ]);
            stats.push(s);
        }
        art.tables.push(c);
    }
    if let Some(last) = rows.last() {
        art.summary = json!({
            "n_ions": last.n_ions,
            "spacing_hz": last.spacing_hz,
            "spacing_estimate_hz": last.spacing_estimate_hz,
            "bs_duration_s": fifty_fifty_duration(a.r1, a.r2, last.spacing_hz, a.ramp),
        });
    }
    art.result = json!({ "rows": rows, "connectivity": stats });
    Ok(art)
}
