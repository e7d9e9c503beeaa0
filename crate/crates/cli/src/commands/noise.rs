use std::path::PathBuf;

use clap::{Args, ValueEnum};
use phononet::dynamics::{error_scan, fit_heating, linear_fit, BsbModel, BsbTrace, BudgetSetup, HeatingChannel, NoiseModel};
use phononet::tomography::sample_counts;
use phononet::Exec;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_list, parse_scalar, read_json, List};
use crate::error::{CliError, CliResult};
use crate::output::{Artifact, Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// Heating rates of both modes, quanta/s
    Heating,
    /// Motional coherence times of both modes, ms
    Dephasing,
}

#[derive(Args, Debug, Serialize)]
pub struct NoiseSimArgs {
    /// Noise source to sweep
    #[arg(long, value_enum, default_value_t = Sweep::Heating)]
    pub sweep: Sweep,
    /// Heating rates (quanta/s) or coherence times (ms), comma separated
    #[arg(long, value_parser = parse_list, default_value = "10,20,40,70,100")]
    pub values: List,
    /// Beam-splitter angle (rad)
    #[arg(long, value_parser = parse_scalar, default_value = "pi/4")]
    pub theta: f64,
    /// Beam-splitter duration (s)
    #[arg(long, default_value_t = 250e-6)]
    pub duration_s: f64,
}

pub fn noise_sim(a: &NoiseSimArgs) -> CliResult<Artifact> {
    let setup = BudgetSetup {
        theta: a.theta,
        duration_s: a.duration_s,
        ..BudgetSetup::default()
    };
    let rates: Vec<f64> = match a.sweep {
        Sweep::Heating => a.values.0.clone(),
        Sweep::Dephasing => {
            if let Some(v) = a.values.0.iter().find(|v| !(**v > 0.0)) {
                return Err(CliError::Parse(format!("--values: coherence time {v} ms must be positive")));
            }
            a.values.0.iter().map(|tau_ms| 1e3 / tau_ms).collect()
        }
    };
    let sweep = a.sweep;
    let rows = error_scan(
        &rates,
        |r| match sweep {
            Sweep::Heating => NoiseModel {
                heating: vec![r, r],
                heating_channel: HeatingChannel::Standard,
                ..Default::default()
            },
            Sweep::Dephasing => NoiseModel {
                motional_dephasing: vec![r, r],
                ..Default::default()
            },
        },
        &setup,
        Exec::default(),
    )?;
    let mut t = match sweep {
        Sweep::Heating => Table::new("noise_sim", &["heating_quanta_per_s", "bs_error"]),
        Sweep::Dephasing => Table::new("noise_sim", &["coherence_time_ms", "dephasing_rate_per_s", "bs_error"]),
    };
    for (v, &(rate, err)) in a.values.0.iter().zip(&rows) {
        let row: Vec<Cell> = match sweep {
            Sweep::Heating => vec![rate.into(), err.into()],
            Sweep::Dephasing => vec![(*v).into(), rate.into(), err.into()],
        };
        t.push(row);
    }
    let mut art = Artifact::new("noise_sim");
    if rows.len() >= 3 {
        let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
        let fit = linear_fit(&x, &y)?;
        art.summary = json!({
            "slope_per_rate": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        });
    }
    art.result = json!({ "setup": setup, "rows": rows, "fit": art.summary });
    art.tables.push(t);
    Ok(art)
}

#[derive(Args, Debug, Serialize)]
pub struct HeatingFitArgs {
    /// Measured traces: JSON array of {"wait_s", "times_s": [...], "p_up": [...]};
    /// synthetic traces are generated when absent
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Heating rate of the synthetic traces (quanta/s)
    #[arg(long, default_value_t = 2.3e3)]
    pub rate: f64,
    /// Mean phonon number of the synthetic traces before waiting
    #[arg(long, default_value_t = 0.05)]
    pub nbar0: f64,
    /// Wait times of the synthetic traces (s)
    #[arg(long, value_parser = parse_list, default_value = "0,0.5e-3,1e-3,1.5e-3,2e-3")]
    pub waits: List,
    /// Pulse-time samples per synthetic trace
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Pulse-time step of the synthetic traces (s)
    #[arg(long, default_value_t = 2e-6)]
    pub step_s: f64,
    /// Blue-sideband Rabi frequency of the model (Hz)
    #[arg(long, default_value_t = 20e3)]
    pub rabi_hz: f64,
}

fn synthetic(a: &HeatingFitArgs, model: &BsbModel, shots: u64, seed: u64) -> Vec<BsbTrace> {
    let times: Vec<f64> = (0..a.points).map(|i| i as f64 * a.step_s).collect();
    let clean: Vec<Vec<f64>> = a.waits.0.iter().map(|w| model.trace(a.nbar0 + a.rate * w, &times)).collect();
    let noisy: Vec<Vec<f64>> = if shots == 0 {
        clean
    } else {
        let pairs: Vec<Vec<f64>> = clean.iter().flatten().map(|&p| vec![p.clamp(0.0, 1.0), 1.0 - p.clamp(0.0, 1.0)]).collect();
        let counts = sample_counts(&pairs, shots, seed);
        counts
            .chunks(times.len().max(1))
            .map(|c| c.iter().map(|k| k[0] as f64 / shots as f64).collect())
            .collect()
    };
    a.waits
        .0
        .iter()
        .zip(noisy)
        .map(|(&wait_s, p_up)| BsbTrace {
            wait_s,
            times_s: times.clone(),
            p_up,
        })
        .collect()
}

pub fn heating_fit(a: &HeatingFitArgs, shots: u64, seed: u64) -> CliResult<Artifact> {
    let model = BsbModel::new(a.rabi_hz);
    let mut art = Artifact::new("heating_fit");
    let traces = match &a.data {
        Some(p) => read_json::<Vec<BsbTrace>>(p)?,
        None => {
            let t = synthetic(a, &model, shots, seed);
            art.extra.push(("data.json".into(), json!(t)));
            t
        }
    };
    let fit = fit_heating(&traces, &model)?;
    let mut t = Table::new("heating_fit", &["wait_s", "nbar"]);
    for &(w, n) in &fit.nbar {
        t.push(vec![w.into(), n.into()]);
    }
    let mut curves = Table::new("traces", &["wait_s", "time_s", "p_up", "p_up_fit"]);
    for (tr, &(_, nbar)) in traces.iter().zip(&fit.nbar) {
        let model_curve = model.trace(nbar, &tr.times_s);
        for ((&time, &p), m) in tr.times_s.iter().zip(&tr.p_up).zip(model_curve) {
            curves.push(vec![tr.wait_s.into(), time.into(), p.into(), m.into()]);
        }
    }
    art.tables.extend([t, curves]);
    art.summary = json!({
        "rate_quanta_per_s": fit.rate,
        "rate_stderr": fit.rate_stderr,
        "rate_ci95": fit.rate_ci95,
        "r_squared": fit.line.r_squared,
    });
    art.result = json!(fit);
    Ok(art)
}
