use std::collections::BTreeMap;

use phononet::fock::oracle::{lift_unitary_dense, permanent_naive};
use phononet::fock::*;
use phononet::linalg::{max_abs_diff, random_unitary, trace, unitarity_residual, CMat, C64};
use phononet::network::{compose_interferometer, presets};
use phononet::Exec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Column `input` of the lifted propagator, obtained by expanding
/// `prod_a (sum_nu V[nu, a] a_nu^dag)^{n_a} |0> / sqrt(prod n_a!)` term by term.
fn creation_expansion(v: &CMat, input: &[u32]) -> BTreeMap<Vec<u32>, C64> {
    let m = input.len();
    let mut state: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    state.insert(vec![0; m], C64::new(1.0, 0.0));
    let mut norm = 1.0;
    for (a, &n_a) in input.iter().enumerate() {
        for k in 1..=n_a {
            norm *= k as f64;
            let mut next = BTreeMap::new();
            for (occ, amp) in &state {
                for nu in 0..m {
                    let mut o = occ.clone();
                    o[nu] += 1;
                    let f = (o[nu] as f64).sqrt();
                    *next.entry(o).or_insert(C64::new(0.0, 0.0)) += amp * v[(nu, a)] * f;
                }
            }
            state = next;
        }
    }
    state.values_mut().for_each(|x| *x /= norm.sqrt());
    state
}

fn expansion_matrix(v: &CMat, sector: &FockSector) -> CMat {
    let d = sector.dim();
    let mut w = CMat::zeros(d, d);
    for (col, occ) in sector.basis().iter().enumerate() {
        for (out, amp) in creation_expansion(v, &occ.0) {
            w[(sector.index_of_slice(&out).unwrap(), col)] = amp;
        }
    }
    w
}

#[test]
fn sector_sizes() {
    assert_eq!(sector_size(4, 1), 4);
    assert_eq!(sector_size(4, 2), 10);
    assert_eq!(FockSector::new(4, 2).unwrap().dim(), 10);
    assert_eq!(FockSector::new(2, 3).unwrap().dim(), 4);
}

#[test]
fn ryser_matches_permutation_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=7 {
        let a = gaussian(&mut rng, n, n);
        let fast = permanent(&a);
        let slow = permanent_naive(&a);
        assert!((fast - slow).norm() <= 1e-12 * slow.norm().max(1.0), "n = {n}");
    }
}

#[test]
fn permanent_of_all_ones_is_factorial() {
    for n in 1..=8usize {
        let a = CMat::from_element(n, n, C64::new(1.0, 0.0));
        let want: f64 = (1..=n).map(|k| k as f64).product();
        assert!((permanent(&a).re - want).abs() < 1e-9 * want);
    }
}

#[test]
fn permanent_is_row_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = gaussian(&mut rng, 5, 5);
    let b = gaussian(&mut rng, 1, 5);
    let s = C64::new(0.7, -1.3);
    let mut scaled = a.clone();
    scaled.row_mut(2).iter_mut().for_each(|x| *x *= s);
    assert!((permanent(&scaled) - s * permanent(&a)).norm() < 1e-10);
    let mut sum = a.clone();
    let mut other = a.clone();
    for j in 0..5 {
        sum[(2, j)] += b[(0, j)];
        other[(2, j)] = b[(0, j)];
    }
    assert!((permanent(&sum) - permanent(&a) - permanent(&other)).norm() < 1e-10);
}

#[test]
fn lift_matches_creation_operator_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (m, n) in [(2, 2), (3, 2), (4, 2), (3, 3), (4, 3)] {
        let v = random_unitary(&mut rng, m);
        let sector = FockSector::new(m, n).unwrap();
        let w = lift_unitary(&v, &sector).unwrap();
        assert!(max_abs_diff(&w, &expansion_matrix(&v, &sector)) < 1e-12, "M = {m}, N = {n}");
    }
}

#[test]
fn lift_matches_dense_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, n) in [(2, 1), (3, 2), (4, 2)] {
        let v = random_unitary(&mut rng, m);
        let sector = FockSector::new(m, n).unwrap();
        let w = lift_unitary(&v, &sector).unwrap();
        assert!(max_abs_diff(&w, &lift_unitary_dense(&v, &sector).unwrap()) < 1e-9);
    }
}

#[test]
fn table_iv_two_phonon_populations() {
    let v = compose_interferometer(&presets::table_iv()).unwrap();
    let sector = FockSector::new(4, 2).unwrap();
    let w = lift_unitary(&v, &sector).unwrap();
    let input = FockState::basis_state(sector.clone(), &[1, 1, 0, 0]).unwrap();
    let p = forward_probabilities(&input.density(), &w).unwrap();
    let want = creation_expansion(&v, &[1, 1, 0, 0]);
    for (occ, pi) in sector.basis().iter().zip(&p) {
        let q = want.get(&occ.0).map_or(0.0, |a| a.norm_sqr());
        assert!((pi - q).abs() < 1e-12, "{occ}");
    }
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn single_phonon_lift_is_the_mode_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = random_unitary(&mut rng, 5);
    let sector = FockSector::new(5, 1).unwrap();
    let w = lift_unitary(&v, &sector).unwrap();
    // descending order puts |10000> first, so the basis runs over modes in order
    assert!(max_abs_diff(&w, &v) < 1e-14);
}

#[test]
fn sequential_and_parallel_lifts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let v = random_unitary(&mut rng, 5);
    let sector = FockSector::new(5, 3).unwrap();
    let a = lift_unitary_with(&v, &sector, Exec::Sequential).unwrap();
    let b = lift_unitary_with(&v, &sector, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_and_forward_conventions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sector = FockSector::new(3, 2).unwrap();
    let d = sector.dim();
    let g = gaussian(&mut rng, d, d);
    let m = &g * g.adjoint();
    let t = trace(&m);
    let rho = DensityMatrix::new(sector.clone(), m.map(|z| z / t)).unwrap();
    let v = random_unitary(&mut rng, 3);
    let w = lift_unitary(&v, &sector).unwrap();
    let a = forward_probabilities(&rho, &w).unwrap();
    let b = output_probabilities(&rho, &w.adjoint()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-13);
    }
}

#[test]
fn parsed_state_has_expected_amplitudes() {
    let s = parse_state("(|1000> + |0100>)/sqrt(2)").unwrap();
    assert_eq!(s.sector().n_modes(), 4);
    assert_eq!(s.sector().n_phonons(), 1);
    let a = s.amplitudes();
    assert!((a[0].re - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((a[1].re - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn ancilla_padding_keeps_probabilities() {
    let s = parse_state("0.6|10> + 0.8i|01>").unwrap();
    let padded = s.density().with_ancillas(2).unwrap();
    assert_eq!(padded.sector().n_modes(), 4);
    let p = forward_probabilities(&padded, &CMat::identity(4, 4)).unwrap();
    assert!((p[0] - 0.36).abs() < 1e-14 && (p[1] - 0.64).abs() < 1e-14);
}

fn unitary_strategy(m: usize) -> impl Strategy<Value = CMat> {
    any::<u64>().prop_map(move |seed| random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sector_size_is_binomial(m in 1usize..8, n in 0usize..8) {
        let binom = |a: u128, b: u128| (1..=b).fold(1u128, |acc, k| acc * (a - b + k) / k);
        prop_assert_eq!(sector_size(m, n), binom((n + m - 1) as u128, n as u128));
        let sector = FockSector::new(m, n).unwrap();
        prop_assert_eq!(sector.dim() as u128, sector_size(m, n));
        for (i, occ) in sector.basis().iter().enumerate() {
            prop_assert_eq!(occ.total(), n);
            prop_assert_eq!(sector.index_of(occ), Some(i));
        }
        prop_assert!(sector.basis().windows(2).all(|w| w[0].0 > w[1].0));
    }

    #[test]
    fn lifted_unitary_is_unitary(u in unitary_strategy(4), n in 1usize..4) {
        let sector = FockSector::new(4, n).unwrap();
        prop_assert!(unitarity_residual(&lift_unitary(&u, &sector).unwrap()) < 1e-9);
    }

    #[test]
    fn lift_is_a_homomorphism(u in unitary_strategy(3), v in unitary_strategy(3), n in 1usize..4) {
        let sector = FockSector::new(3, n).unwrap();
        let lhs = lift_unitary(&(&u * &v), &sector).unwrap();
        let rhs = lift_unitary(&u, &sector).unwrap() * lift_unitary(&v, &sector).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn probabilities_are_conserved(u in unitary_strategy(4), seed in any::<u64>()) {
        let sector = FockSector::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = gaussian(&mut rng, sector.dim(), 1).column(0).normalize();
        let psi = FockState::new(sector.clone(), amps).unwrap();
        let p = forward_probabilities(&psi.density(), &lift_unitary(&u, &sector).unwrap()).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= -1e-15));
    }
}
