//! Configurations and drive parameters of the four-mode experiment.

use super::{theta_from_table, BeamSplitterSpec, InterferometerConfig, PhysicalParams};
use std::f64::consts::PI;

/// Trap frequencies of the five-ion chain: the transverse spectrum (Hz, ascending).
/// The highest entry is the COM mode, which is not used as a network mode.
pub const FIVE_ION_SPECTRUM_HZ: [f64; 5] = [1.905e6, 1.985e6, 2.057e6, 2.114e6, 2.153e6];

/// The 50:50 beam splitters of the four-mode setup: (mode m, mode n, ion, drive).
/// Indices are 0-based; the tabulated coupling signs are dropped.
pub fn fifty_fifty_drives(ramp_fraction: f64) -> Vec<(usize, usize, usize, PhysicalParams)> {
    let p = |cm: f64, cn: f64, t_us: f64| PhysicalParams {
        delta_hz: -10e3,
        coupling_m_hz: cm * 1e3,
        coupling_n_hz: cn * 1e3,
        duration_s: t_us * 1e-6,
        ramp_fraction,
    };
    vec![
        (0, 2, 2, p(6.3, 4.4, 286.6)),
        (1, 3, 3, p(6.3, 3.1, 468.1)),
        (2, 3, 4, p(4.4, 3.1, 453.7)),
        (0, 1, 1, p(6.3, 6.3, 254.8)),
    ]
}

/// Single-setting four-mode tomography interferometer for two input modes
/// (modes 1, 2) and two vacuum ancillas (modes 3, 4).
pub fn table_iv() -> InterferometerConfig {
    let bs = |m, n, ion, t: f64, p: f64| BeamSplitterSpec::new(m, n, ion, theta_from_table(t), p * PI);
    InterferometerConfig::new(
        4,
        vec![
            bs(0, 2, 2, 0.696, 0.0),
            bs(1, 3, 3, 0.304, 0.0),
            bs(2, 3, 4, 0.5, 0.5),
            bs(0, 1, 1, 0.5, 1.0),
        ],
    )
}

/// [`table_iv`] with the 50:50 drive parameters attached to each pulse. The two
/// unbalanced pulses reuse the couplings of their mode pair with durations scaled
/// to their angle.
pub fn table_iv_physical(ramp_fraction: f64) -> InterferometerConfig {
    let mut cfg = table_iv();
    let drives = fifty_fifty_drives(ramp_fraction);
    for bs in &mut cfg.beamsplitters {
        let (_, _, _, p) = drives
            .iter()
            .find(|(m, n, _, _)| *m == bs.mode_m && *n == bs.mode_n)
            .copied()
            .expect("every pair has a calibrated drive");
        let half = PI / 4.0;
        bs.physical = Some(PhysicalParams {
            duration_s: p.duration_s * bs.theta / half,
            ..p
        });
    }
    cfg
}

/// Three single-beam-splitter settings on two modes with equally spaced phases.
pub fn three_phase_settings(theta_table: f64) -> Vec<InterferometerConfig> {
    (0..3)
        .map(|g| {
            InterferometerConfig::new(
                2,
                vec![BeamSplitterSpec::new(
                    0,
                    1,
                    0,
                    theta_from_table(theta_table),
                    2.0 * PI * g as f64 / 3.0,
                )],
            )
        })
        .collect()
}
