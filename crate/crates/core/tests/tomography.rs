use std::f64::consts::PI;

use phononet::fock::{parse_state, DensityMatrix, FockSector, FockState};
use phononet::linalg::{hermitian_eigen, max_abs_diff, trace, CMat, CVec, C64};
use phononet::network::{presets, theta_from_table, Confusion, DetectionModel, InterferometerConfig};
use phononet::tomography::*;
use phononet::{Error, Exec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn table_iv_setup(n: usize) -> TomographySetup {
    TomographySetup::new(2, 2, n, vec![presets::table_iv()]).unwrap()
}

fn three_phase_setup(theta_table: f64) -> TomographySetup {
    TomographySetup::new(2, 0, 1, presets::three_phase_settings(theta_table)).unwrap()
}

fn rank(m: &CMat) -> usize {
    let s = m.clone().svd(false, false).singular_values;
    let top = s.max();
    s.iter().filter(|&&v| v > 1e-10 * top).count()
}

fn random_pure(rng: &mut ChaCha8Rng, n: usize) -> FockState {
    let sector = FockSector::new(2, n).unwrap();
    let v = CVec::from_fn(sector.dim(), |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    FockState::new(sector, v.normalize()).unwrap()
}

fn random_mixed(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let d = FockSector::new(2, n).unwrap().dim();
    let g = CMat::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let t = trace(&m);
    DensityMatrix::new(FockSector::new(2, n).unwrap(), m.map(|z| z / t)).unwrap()
}

/// Output probabilities of setting `g` for an `N = 1` input, computed directly from
/// the mode propagator: a single phonon in input mode `a` ends in mode `nu` with
/// amplitude `V[nu, a]`.
fn single_phonon_oracle(setup: &TomographySetup, rho: &CMat) -> Vec<f64> {
    let mut out = Vec::new();
    for cfg in &setup.settings {
        let v = phononet::network::compose_interferometer(cfg).unwrap();
        for nu in 0..setup.total_modes() {
            let mut p = C64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    p += v[(nu, a)] * rho[(a, b)] * v[(nu, b)].conj();
                }
            }
            out.push(p.re);
        }
    }
    out
}

#[test]
fn three_phase_settings_have_full_rank() {
    let l = build_superoperator(&three_phase_setup(0.304)).unwrap();
    assert_eq!(l.matrix.shape(), (6, 4));
    assert_eq!(rank(&l.matrix), 4);
}

#[test]
fn table_iv_has_full_rank_for_one_and_two_phonons() {
    for (n, d) in [(1, 2), (2, 3)] {
        let l = build_superoperator(&table_iv_setup(n)).unwrap();
        assert_eq!(l.input_dim(), d);
        assert_eq!(rank(&l.matrix), d * d, "N = {n}");
    }
}

#[test]
fn single_setting_without_ancillas_is_ill_conditioned() {
    let setup = TomographySetup::new(2, 0, 1, presets::three_phase_settings(0.304)[..1].to_vec()).unwrap();
    let l = build_superoperator(&setup).unwrap();
    let r = reconstruct(&[0.5, 0.5], &l, None);
    assert!(matches!(r, Err(Error::IllConditioned { .. })), "{r:?}");
}

#[test]
fn superoperator_is_hermiticity_preserving() {
    let l = build_superoperator(&table_iv_setup(2)).unwrap();
    let d = l.input_dim();
    for row in 0..l.rows() {
        for a in 0..d {
            for b in 0..d {
                let x = l.matrix[(row, a * d + b)];
                let y = l.matrix[(row, b * d + a)];
                assert!((x - y.conj()).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn superoperator_matches_fock_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for n in [1, 2] {
        let setup = table_iv_setup(n);
        let l = build_superoperator(&setup).unwrap();
        for _ in 0..25 {
            let rho = random_mixed(&mut rng, n);
            let via_l = l.apply(rho.matrix()).unwrap();
            let via_fock = exact_probabilities(&rho, &setup).unwrap().concat();
            for (x, y) in via_l.iter().zip(&via_fock) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn single_phonon_probabilities_match_mode_propagator() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for setup in [table_iv_setup(1), three_phase_setup(0.304)] {
        let l = build_superoperator(&setup).unwrap();
        for _ in 0..10 {
            let rho = random_mixed(&mut rng, 1);
            let got = l.apply(rho.matrix()).unwrap();
            let want = single_phonon_oracle(&setup, rho.matrix());
            for (x, y) in got.iter().zip(&want) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn basis_state_round_trip() {
    let setup = table_iv_setup(1);
    let l = build_superoperator(&setup).unwrap();
    let rho = FockState::basis_state(FockSector::new(2, 1).unwrap(), &[1, 0]).unwrap().density();
    let p = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
    let r = reconstruct(&p.probabilities, &l, Some(rho.matrix())).unwrap();
    assert!(r.fidelity.unwrap() >= 1.0 - 1e-8);
}

#[test]
fn superposition_reconstructs_to_table_matrix() {
    let setup = table_iv_setup(1);
    let l = build_superoperator(&setup).unwrap();
    let rho = parse_state("(|10>+|01>)/sqrt2").unwrap().density();
    let p = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
    let r = reconstruct(&p.probabilities, &l, None).unwrap();
    let want = CMat::from_element(2, 2, C64::new(0.5, 0.0));
    assert!(max_abs_diff(&r.rho_raw, &want) < 1e-8);
    assert!(max_abs_diff(&r.rho_ml, &want) < 1e-8);
    assert!(r.clipped_eigenmass < 1e-8);
    assert_eq!(r.dropped_singular_values, 0);
}

#[test]
fn random_pure_states_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for n in [1, 2] {
        let setup = table_iv_setup(n);
        let l = build_superoperator(&setup).unwrap();
        for _ in 0..10 {
            let psi = random_pure(&mut rng, n);
            let rho = psi.density();
            let p = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
            let r = reconstruct(&p.probabilities, &l, Some(rho.matrix())).unwrap();
            assert!(r.fidelity.unwrap() >= 1.0 - 1e-8, "N = {n}: {:?}", r.fidelity);
            assert!((r.purity - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn raw_reconstruction_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let setup = table_iv_setup(2);
    let l = build_superoperator(&setup).unwrap();
    let (r1, r2) = (random_mixed(&mut rng, 2), random_mixed(&mut rng, 2));
    let p1 = l.apply(r1.matrix()).unwrap();
    let p2 = l.apply(r2.matrix()).unwrap();
    let a = 0.3;
    let mix: Vec<f64> = p1.iter().zip(&p2).map(|(x, y)| a * x + (1.0 - a) * y).collect();
    let r = reconstruct(&mix, &l, None).unwrap();
    let want = r1.matrix().scale(a) + r2.matrix().scale(1.0 - a);
    assert!(max_abs_diff(&r.rho_raw, &want) < 1e-9);
}

#[test]
fn tabulated_single_phonon_result_has_quoted_fidelity() {
    let rho = CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(0.469, 0.0),
            C64::new(0.472, -0.005),
            C64::new(0.472, 0.005),
            C64::new(0.475, 0.0),
        ],
    );
    let psi = CVec::from_element(2, C64::new(1.0, 0.0));
    let f = fidelity_to_pure(&rho, &psi);
    assert!((f - 0.9449).abs() <= 0.005, "{f}");
}

#[test]
fn table_iv_beats_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for n in [1, 2] {
        let setup = table_iv_setup(n);
        let reference = log_det_gram(&setup).unwrap().unwrap();
        let mut wins = 0;
        for _ in 0..1000 {
            let mut s = setup.clone();
            for bs in &mut s.settings[0].beamsplitters {
                bs.theta = rng.random::<f64>() * PI;
                bs.phi = rng.random::<f64>() * 2.0 * PI;
            }
            if log_det_gram(&s).unwrap().is_none_or(|v| v < reference) {
                wins += 1;
            }
        }
        assert!(wins >= 990, "N = {n}: {wins}/1000");
    }
}

#[test]
fn optimizer_reaches_tabulated_three_phase_setting() {
    let reference = log_det_gram(&three_phase_setup(0.304)).unwrap().unwrap();
    let template = ConfigTemplate::single_bs(3, 1).unwrap();
    let opts = OptimizeOptions::default();
    let best = optimize_configuration(&template, &opts, Exec::Parallel).unwrap();
    assert!(best.det >= reference.exp() * (1.0 - 1e-6), "{} vs {}", best.det, reference.exp());
    let again = optimize_configuration(&template, &opts, Exec::Sequential).unwrap();
    assert_eq!(best.parameters, again.parameters);
    // the optimum sits at 0.304 pi in table notation or its mirror 0.696 pi
    let t = phononet::network::theta_to_table(best.parameters[0].rem_euclid(PI / 2.0));
    assert!((t - 0.304).abs() < 0.01 || (t - 0.696).abs() < 0.01, "{t}");
    let gap = (best.parameters[2] - best.parameters[1]).rem_euclid(2.0 * PI);
    assert!((gap - 2.0 * PI / 3.0).abs() < 1e-3 || (gap - 4.0 * PI / 3.0).abs() < 1e-3);
}

#[test]
fn grid_scan_confirms_three_phase_optimum() {
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 1..250 {
        let t = i as f64 * 0.002;
        if let Some(v) = log_det_gram(&three_phase_setup(t)).unwrap() {
            if v > best.1 {
                best = (t, v);
            }
        }
    }
    assert!((best.0 - 0.304).abs() < 0.003, "{best:?}");
    let at = log_det_gram(&three_phase_setup(0.304)).unwrap().unwrap();
    assert!((best.1 - at).abs() < 1e-5);
}

#[test]
fn unmixed_template_is_degenerate() {
    let mut setup = three_phase_setup(0.0);
    for cfg in &mut setup.settings {
        cfg.beamsplitters[0].theta = theta_from_table(0.0);
    }
    let template = ConfigTemplate::new(
        setup,
        vec![FreeParameter {
            kind: ParameterKind::Phi,
            targets: vec![(1, 0), (2, 0)],
        }],
    )
    .unwrap();
    let r = optimize_configuration(&template, &OptimizeOptions::default(), Exec::Parallel);
    assert!(matches!(r, Err(Error::DegenerateTemplate)));
}

#[test]
fn sampling_is_reproducible() {
    let setup = table_iv_setup(1);
    let rho = parse_state("(|10>+|01>)/sqrt2").unwrap().density();
    let opts = MeasurementOptions {
        shots: 300,
        seed: 17,
        ..Default::default()
    };
    let a = simulate_measurement(&rho, &setup, &opts).unwrap();
    let b = simulate_measurement(&rho, &setup, &opts).unwrap();
    assert_eq!(a.probabilities, b.probabilities);
    assert_eq!(a.records, b.records);
    assert!(a.records[0].counts.iter().map(|c| c.n).sum::<u64>() == 300);
}

#[test]
fn shot_noise_median_fidelity() {
    let setup = table_iv_setup(1);
    let l = build_superoperator(&setup).unwrap();
    let rho = parse_state("(|10>+|01>)/sqrt2").unwrap().density();
    let mut f: Vec<f64> = (0..100)
        .map(|seed| {
            let opts = MeasurementOptions {
                shots: 300,
                seed,
                ..Default::default()
            };
            let p = simulate_measurement(&rho, &setup, &opts).unwrap();
            reconstruct(&p.probabilities, &l, Some(rho.matrix())).unwrap().fidelity.unwrap()
        })
        .collect();
    f.sort_by(f64::total_cmp);
    assert!(f[50] >= 0.97, "median {}", f[50]);
}

#[test]
fn ideal_binary_readout_matches_fock_resolution() {
    for (n, state) in [(1, "(|10>+i|01>)/sqrt2"), (2, "(|11>+i|02>+i|20>)/sqrt3")] {
        let setup = table_iv_setup(n);
        let rho = parse_state(state).unwrap().density();
        let direct = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
        let binary = simulate_measurement(
            &rho,
            &setup,
            &MeasurementOptions {
                detection: Some(DetectionModel::ideal(4)),
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in direct.probabilities.iter().zip(&binary.probabilities) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn corrected_readout_recovers_exact_probabilities() {
    let setup = table_iv_setup(1);
    let rho = parse_state("(|10>+|01>)/sqrt2").unwrap().density();
    let exact = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
    let noisy = MeasurementOptions {
        detection: Some(DetectionModel::uniform(4, Confusion::symmetric(0.03))),
        ..Default::default()
    };
    let raw = simulate_measurement(&rho, &setup, &noisy).unwrap();
    let err: f64 = raw.probabilities.iter().zip(&exact.probabilities).map(|(x, y)| (x - y).abs()).sum();
    assert!(err > 1e-3);
    let corrected = simulate_measurement(
        &rho,
        &setup,
        &MeasurementOptions {
            correct_readout: true,
            ..noisy
        },
    )
    .unwrap();
    for (x, y) in corrected.probabilities.iter().zip(&exact.probabilities) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn records_round_trip_through_json() {
    let setup = table_iv_setup(2);
    let rho = parse_state("(|11>+i|02>+i|20>)/sqrt3").unwrap().density();
    for detection in [None, Some(DetectionModel::ideal(4))] {
        let opts = MeasurementOptions {
            shots: 300,
            seed: 3,
            detection: detection.clone(),
            correct_readout: false,
        };
        let m = simulate_measurement(&rho, &setup, &opts).unwrap();
        let text = serde_json::to_string(&m.records).unwrap();
        let back: Vec<MeasurementRecord> = serde_json::from_str(&text).unwrap();
        let p = probabilities_from_records(&back, &setup, detection.as_ref(), false).unwrap();
        assert_eq!(p, m.probabilities);
    }
}

#[test]
fn superoperator_json_records_ordering() {
    let l = build_superoperator(&table_iv_setup(1)).unwrap();
    let v = l.to_json();
    assert!(v["vec_ordering"].as_str().unwrap().starts_with("row-major"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["input_basis"][0], serde_json::json!([1, 0]));
}

#[test]
fn report_serializes_complex_entries() {
    let setup = table_iv_setup(1);
    let l = build_superoperator(&setup).unwrap();
    let rho = parse_state("(|10>+i|01>)/sqrt2").unwrap().density();
    let p = simulate_measurement(&rho, &setup, &MeasurementOptions::default()).unwrap();
    let r = reconstruct(&p.probabilities, &l, Some(rho.matrix())).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let off = &v["rho"][0][1];
    assert!((off[0].as_f64().unwrap()).abs() < 1e-8);
    assert!((off[1].as_f64().unwrap() + 0.5).abs() < 1e-8);
    assert!(v["condition_number"].as_f64().unwrap() >= 1.0);
}

#[test]
fn mismatched_probabilities_are_rejected() {
    let l = build_superoperator(&table_iv_setup(1)).unwrap();
    assert!(matches!(reconstruct(&[0.5, 0.5], &l, None), Err(Error::DimensionMismatch(_))));
    assert!(matches!(reconstruct(&[0.5, 0.5, 0.5, 0.5], &l, None), Err(Error::Validation(_))));
}

#[test]
fn config_with_wrong_mode_count_is_rejected() {
    let r = TomographySetup::new(2, 2, 1, vec![InterferometerConfig::identity(3)]);
    assert!(matches!(r, Err(Error::DimensionMismatch(_))));
}

fn hermitian_strategy(d: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |v| {
        let m = CMat::from_fn(d, d, |i, j| C64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]));
        (&m + m.adjoint()).scale(0.5)
    })
}

fn state_strategy(d: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |v| {
        let g = CMat::from_fn(d, d, |i, j| C64::new(v[2 * (i * d + j)], v[2 * (i * d + j) + 1]));
        let m = &g * g.adjoint() + CMat::identity(d, d).scale(1e-3);
        let t = trace(&m);
        m.map(|z| z / t)
    })
}

proptest! {
    #[test]
    fn projection_is_a_valid_state(h in hermitian_strategy(3)) {
        let p = ml_project(&h);
        let (vals, _) = hermitian_eigen(&p);
        prop_assert!(vals[0] > -1e-10);
        prop_assert!((trace(&p).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_is_closest_feasible_point(h in hermitian_strategy(3), s in state_strategy(3)) {
        let p = ml_project(&h);
        prop_assert!((&p - &h).norm() <= (&s - &h).norm() + 1e-12);
    }

    #[test]
    fn projection_is_idempotent(s in state_strategy(3)) {
        prop_assert!(max_abs_diff(&ml_project(&s), &s) < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric(a in state_strategy(3), b in state_strategy(3)) {
        let f1 = state_fidelity(&a, &b).unwrap();
        let f2 = state_fidelity(&b, &a).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&f1));
    }

    #[test]
    fn noisy_reconstruction_is_physical(seed in 0u64..10_000) {
        let setup = table_iv_setup(2);
        let l = build_superoperator(&setup).unwrap();
        let rho = parse_state("(|11>+i|02>+i|20>)/sqrt3").unwrap().density();
        let opts = MeasurementOptions { shots: 300, seed, ..Default::default() };
        let p = simulate_measurement(&rho, &setup, &opts).unwrap();
        let r = reconstruct(&p.probabilities, &l, Some(rho.matrix())).unwrap();
        let (vals, _) = hermitian_eigen(&r.rho_ml);
        prop_assert!(vals[0] > -1e-10);
        prop_assert!((trace(&r.rho_ml).re - 1.0).abs() < 1e-10);
        prop_assert!(r.purity > 0.0 && r.purity <= 1.0 + 1e-9);
    }
}
