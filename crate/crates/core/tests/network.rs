use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use phononet::fock::{FockSector, Occupation};
use phononet::ionchain::{fit_axial_frequency, ModeTable, TrapParams};
use phononet::linalg::{max_abs_diff, random_unitary, unitarity_residual, CMat, C64};
use phononet::network::*;
use phononet::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn five_ion_modes() -> ModeTable {
    let p = TrapParams::yb171(5, 2.153e6, 0.4e6);
    fit_axial_frequency(&presets::FIVE_ION_SPECTRUM_HZ, &p).unwrap().modes
}

/// Applies each beam splitter to a single-phonon amplitude vector as a 2x2 rotation.
fn propagate_amplitudes(cfg: &InterferometerConfig, psi: &[C64]) -> Vec<C64> {
    let mut a = psi.to_vec();
    for bs in &cfg.beamsplitters {
        let (s, c) = bs.theta.sin_cos();
        let (x, y) = (a[bs.mode_m], a[bs.mode_n]);
        let i = C64::new(0.0, bs.spin_sign);
        a[bs.mode_m] = c * x + i * C64::from_polar(s, bs.phi) * y;
        a[bs.mode_n] = i * C64::from_polar(s, -bs.phi) * x + c * y;
    }
    a
}

fn superposition_12() -> Vec<C64> {
    let h = C64::new(0.5f64.sqrt(), 0.0);
    vec![h, h, C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
}

fn populations(u: &CMat, psi: &[C64]) -> Vec<f64> {
    (0..u.nrows())
        .map(|i| (0..psi.len()).map(|j| u[(i, j)] * psi[j]).sum::<C64>().norm_sqr())
        .collect()
}

#[test]
fn fifty_fifty_splits_single_phonon() {
    let u = bs_mode_unitary(&BeamSplitterSpec::new(0, 1, 0, PI / 4.0, 0.0), 2).unwrap();
    let p = populations(&u, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
}

#[test]
fn table_iv_single_phonon_bars() {
    let cfg = presets::table_iv();
    let u = compose_interferometer(&cfg).unwrap();
    assert!(unitarity_residual(&u) < 1e-10);
    let psi = superposition_12();
    let p = populations(&u, &psi);
    let oracle: Vec<f64> = propagate_amplitudes(&cfg, &psi).iter().map(|a| a.norm_sqr()).collect();
    let frozen = [0.25, 0.25, 0.045_915_19, 0.454_084_81];
    for k in 0..4 {
        assert!((p[k] - oracle[k]).abs() < 1e-14);
        assert!((p[k] - frozen[k]).abs() < 1e-8, "mode {}: {}", k + 1, p[k]);
    }
}

#[test]
fn composition_matches_step_by_step_rotation() {
    let cfg = presets::table_iv();
    let u = compose_interferometer(&cfg).unwrap();
    for a in 0..4 {
        let mut e = vec![C64::new(0.0, 0.0); 4];
        e[a] = C64::new(1.0, 0.0);
        let col = propagate_amplitudes(&cfg, &e);
        for nu in 0..4 {
            assert!((u[(nu, a)] - col[nu]).norm() < 1e-14);
        }
    }
}

/// Least-squares fit of `a + b cos x + c sin x`; returns R^2.
fn sinusoid_r2(x: &[f64], y: &[f64]) -> f64 {
    let design = DMatrix::from_fn(x.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => x[i].cos(),
        _ => x[i].sin(),
    });
    let yv = DVector::from_column_slice(y);
    let coef = design.clone().svd(true, true).solve(&yv, 1e-14).unwrap();
    let resid = &yv - &design * coef;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let total: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    1.0 - resid.norm_squared() / total
}

#[test]
fn phase_scan_is_sinusoidal_on_the_scanned_pair() {
    let psi = superposition_12();
    let phis: Vec<f64> = (0..41).map(|i| 2.0 * PI * i as f64 / 40.0).collect();
    let scans: Vec<Vec<f64>> = phis
        .iter()
        .map(|&phi| {
            let mut cfg = presets::table_iv();
            cfg.beamsplitters[3].phi = phi;
            populations(&compose_interferometer(&cfg).unwrap(), &psi)
        })
        .collect();
    for k in 0..2 {
        let y: Vec<f64> = scans.iter().map(|p| p[k]).collect();
        let r2 = sinusoid_r2(&phis, &y);
        assert!(r2 > 0.999, "mode {}: R^2 = {r2}", k + 1);
    }
    for k in 2..4 {
        let spread = scans.iter().map(|p| (p[k] - scans[0][k]).abs()).fold(0.0, f64::max);
        assert!(spread < 1e-10, "mode {} moves by {spread}", k + 1);
    }
}

#[test]
fn stark_shifts_are_hundreds_of_hertz() {
    let modes = five_ion_modes();
    let mut largest = 0.0f64;
    for (m, n, ion, p) in presets::fifty_fifty_drives(0.1) {
        let spec = BeamSplitterSpec::from_physical(m, n, ion, 0.0, p).unwrap();
        let shifts = ac_stark_shifts(&spec, &modes).unwrap();
        assert_eq!(shifts.len(), 5);
        for s in &shifts {
            assert!(s.abs() < 2e3, "{s} Hz");
        }
        largest = largest.max(shifts[m].abs()).max(shifts[n].abs());
    }
    assert!((100.0..2e3).contains(&largest), "{largest} Hz");
}

#[test]
fn compensation_shifts_final_phase_away_from_pi() {
    let modes = five_ion_modes();
    let cfg = presets::table_iv_physical(0.1);
    let out = compensate_phases(&cfg, &modes).unwrap();
    for (a, b) in cfg.beamsplitters.iter().zip(&out.beamsplitters) {
        assert_eq!(a.theta.to_bits(), b.theta.to_bits());
        assert_eq!((a.mode_m, a.mode_n, a.ion), (b.mode_m, b.mode_n, b.ion));
    }
    assert_eq!(out.beamsplitters[0].phi, cfg.beamsplitters[0].phi);
    let offset = (out.beamsplitters[3].phi - PI).abs();
    assert!(offset > 0.01 && offset < PI, "offset {offset}");
    assert_eq!(out.compensation, Compensation::Analytic);
    assert_eq!(compensate_phases(&out, &modes).unwrap(), out);
}

#[test]
fn zeroed_spectators_only_touch_driven_modes() {
    let mut modes = five_ion_modes();
    let (m, n, ion, p) = presets::fifty_fifty_drives(0.1)[0];
    for k in 0..5 {
        if k != m && k != n {
            modes.lamb_dicke[(ion, k)] = 0.0;
        }
    }
    let spec = BeamSplitterSpec::from_physical(m, n, ion, 0.0, p).unwrap();
    let shifts = ac_stark_shifts(&spec, &modes).unwrap();
    for (k, s) in shifts.iter().enumerate() {
        assert_eq!(*s == 0.0, k != m && k != n, "mode {k}: {s}");
    }
}

#[test]
fn pattern_aggregation_examples() {
    let sector = FockSector::new(4, 2).unwrap();
    let mut p = vec![0.0; sector.dim()];
    p[sector.index_of_slice(&[1, 1, 0, 0]).unwrap()] = 0.4;
    p[sector.index_of_slice(&[2, 0, 0, 0]).unwrap()] = 0.6;
    let d = binary_pattern_distribution(&sector, &p);
    assert_eq!(d.get(&"1100".parse().unwrap()), Some(&0.4));
    assert_eq!(d.get(&"1000".parse().unwrap()), Some(&0.6));

    let sector = FockSector::new(2, 3).unwrap();
    let p: Vec<f64> = sector.basis().iter().map(|o| if o.0[0] > 0 && o.0[1] > 0 { 0.5 } else { 0.0 }).collect();
    let d = binary_pattern_distribution(&sector, &p);
    assert_eq!(d.values().filter(|&&x| x > 0.0).count(), 1);
    assert_eq!(d.get(&"11".parse().unwrap()), Some(&1.0));
}

#[test]
fn number_conservation_inference() {
    let infer = |s: &str, n| infer_fock_from_binary(&s.parse().unwrap(), n);
    assert_eq!(infer("1010", 2).unwrap(), Occupation(vec![1, 0, 1, 0]));
    assert_eq!(infer("0100", 2).unwrap(), Occupation(vec![0, 2, 0, 0]));
    assert!(matches!(infer("1100", 3), Err(Error::AmbiguousPattern { .. })));
    assert!(matches!(infer("0000", 1), Err(Error::LostPhonon { .. })));
    assert!(matches!(infer("1110", 2), Err(Error::LostPhonon { .. })));
}

#[test]
fn one_percent_confusion_by_hand() {
    let model = DetectionModel::uniform(1, Confusion::symmetric(0.01));
    let truth: BTreeMap<Pattern, f64> = [("1".parse().unwrap(), 0.3), ("0".parse().unwrap(), 0.7)].into();
    let observed = model.apply(&truth).unwrap();
    let bright = observed[&"1".parse().unwrap()];
    assert!((bright - (0.3 * 0.99 + 0.7 * 0.01)).abs() < 1e-15);
    let fixed = correct_readout(&observed, &model).unwrap();
    assert!((fixed.probabilities[&"1".parse().unwrap()] - 0.3).abs() < 1e-14);
    assert_eq!(fixed.clipped_mass, 0.0);
}

#[test]
fn config_file_uses_one_based_indices() {
    let file = ConfigFile::from_config(&presets::table_iv());
    let first = &file.beamsplitters[0];
    assert_eq!((first.m, first.n, first.ion), (1, 3, 3));
    assert!((first.theta_pi_units - 0.696).abs() < 1e-12);
    let text = serde_json::to_string(&file).unwrap();
    let back = ConfigFile::from_json(&text).unwrap().to_config().unwrap();
    let a = compose_interferometer(&back).unwrap();
    let b = compose_interferometer(&presets::table_iv()).unwrap();
    assert!(max_abs_diff(&a, &b) < 1e-14);
}

fn random_spec() -> impl Strategy<Value = (usize, usize, f64, f64, bool)> {
    (0usize..4, 0usize..3, -4.0f64..4.0, -7.0f64..7.0, any::<bool>())
        .prop_map(|(m, k, t, p, s)| (m, (m + 1 + k) % 4, t, p, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negated_angle_inverts_block((m, n, t, p, s) in random_spec()) {
        let mut spec = BeamSplitterSpec::new(m, n, 0, t, p);
        spec.spin_sign = if s { 1.0 } else { -1.0 };
        let fwd = bs_mode_unitary(&spec, 4).unwrap();
        spec.theta = -t;
        let back = bs_mode_unitary(&spec, 4).unwrap();
        prop_assert!(max_abs_diff(&(back * &fwd), &CMat::identity(4, 4)) < 1e-14);
        prop_assert!(unitarity_residual(&fwd) < 1e-14);
    }

    #[test]
    fn phase_is_two_pi_periodic((m, n, t, p, _s) in random_spec()) {
        let a = bs_mode_unitary(&BeamSplitterSpec::new(m, n, 0, t, p), 4).unwrap();
        let b = bs_mode_unitary(&BeamSplitterSpec::new(m, n, 0, t, p + 2.0 * PI), 4).unwrap();
        prop_assert!(max_abs_diff(&a, &b) < 1e-13);
    }

    #[test]
    fn aggregation_conserves_probability(seed in any::<u64>(), n in 1usize..4) {
        let sector = FockSector::new(4, n).unwrap();
        let u = random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), sector.dim());
        let p: Vec<f64> = u.column(0).iter().map(|z| z.norm_sqr()).collect();
        let d = binary_pattern_distribution(&sector, &p);
        prop_assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-12);
        for pat in d.keys() {
            prop_assert!(pat.bright_count() >= 1 && pat.bright_count() <= n);
        }
    }

    #[test]
    fn confusion_then_correction_is_identity(seed in any::<u64>(), e0 in 0.0f64..0.1, e1 in 0.0f64..0.1) {
        let u = random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let truth: BTreeMap<Pattern, f64> = (0..8)
            .map(|i| (Pattern::from_mask(i, 3), u[(i, 0)].norm_sqr()))
            .collect();
        let c = Confusion { p_bright_given_dark: e0, p_dark_given_bright: e1 };
        let model = DetectionModel::uniform(3, c);
        let back = correct_readout(&model.apply(&truth).unwrap(), &model).unwrap();
        for (pat, &x) in &truth {
            prop_assert!((back.probabilities.get(pat).copied().unwrap_or(0.0) - x).abs() < 1e-9);
        }
    }
}
