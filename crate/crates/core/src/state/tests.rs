use std::f64::consts::{FRAC_1_SQRT_2, PI};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{frobenius_norm, hermitian_part};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn assert_state_invariants(rho: &DensityMatrix) {
    let (herm, tr, neg) = rho.invariant_report();
    assert!(herm <= 1e-10, "hermiticity {herm}");
    assert!(tr <= 1e-10, "trace deviation {tr}");
    assert!(neg <= 1e-9, "negative eigenvalue {neg}");
}

fn random_hermitian(n_qubits: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let d = 1 << n_qubits;
    hermitian_part(&CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

fn random_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = 1 << n_qubits;
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::new(m * c(1.0 / tr)).unwrap()
}

#[test]
fn ghz_basis_amplitudes() {
    let g = make_ghz(0, Sign::Plus).unwrap();
    let a = g.amplitudes();
    assert_abs_diff_eq!(a[0].re, FRAC_1_SQRT_2);
    assert_abs_diff_eq!(a[7].re, FRAC_1_SQRT_2);
    assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 2);

    let g = make_ghz(3, Sign::Minus).unwrap();
    let a = g.amplitudes();
    assert_abs_diff_eq!(a[0b100].re, FRAC_1_SQRT_2);
    assert_abs_diff_eq!(a[0b011].re, -FRAC_1_SQRT_2);
    assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 2);

    let plus = make_ghz(0, Sign::Plus).unwrap();
    let minus = make_ghz(0, Sign::Minus).unwrap();
    assert_abs_diff_eq!(plus.inner(&minus).unwrap().norm(), 0.0);
    assert!(matches!(
        make_ghz(4, Sign::Plus),
        Err(Error::IndexOutOfRange { .. })
    ));
}

#[test]
fn noisy_ghz_entries() {
    let rho = noisy_ghz(0.0).unwrap();
    assert_eq!(rho, DensityMatrix::maximally_mixed(3));
    let rho = noisy_ghz(1.0).unwrap();
    assert!(frobenius_norm(&(rho.matrix() - make_ghz(0, Sign::Plus).unwrap().projector().matrix())) < 1e-15);
    let rho = noisy_ghz(0.5).unwrap();
    assert_abs_diff_eq!(rho.entry(0, 0).re, 0.3125, epsilon = 1e-15);
    assert_abs_diff_eq!(rho.entry(7, 7).re, 0.3125, epsilon = 1e-15);
    assert_abs_diff_eq!(rho.entry(0, 7).re, 0.25, epsilon = 1e-15);
    assert!(noisy_ghz(1.2).is_err());
    assert!(noisy_ghz(-0.1).is_err());
    assert!(noisy_ghz(f64::NAN).is_err());
}

/// The X-shaped matrix written out entry by entry.
fn noise_model_closed_form(p: f64, q: f64, r: f64) -> CMatrix {
    let corner_diag = (1.0 - p) / 8.0 + 0.5 * p * r;
    let inner_diag = 0.125 + (p - 4.0 * p * r) / 24.0;
    let corner_off = p * r * (q - 0.5);
    let inner_off = (1.0 - r) / 3.0 * p * (q - 0.5);
    CMatrix::from_fn(8, 8, |i, j| {
        let v = if i == j {
            if i == 0 || i == 7 {
                corner_diag
            } else {
                inner_diag
            }
        } else if i + j == 7 {
            if i == 0 || i == 7 {
                corner_off
            } else {
                inner_off
            }
        } else {
            0.0
        };
        c(v)
    })
}

#[test]
fn noise_model_matches_closed_form() {
    for &(p, q, r) in &[(0.5, 0.9084, 0.9210), (0.36, 0.9124, 0.9129), (0.8, 0.3, 0.1)] {
        let rho = noise_model_state(p, q, r).unwrap();
        assert!(frobenius_norm(&(rho.matrix() - noise_model_closed_form(p, q, r))) < 1e-15);
        assert_state_invariants(&rho);
    }
    let rho = noise_model_state(0.5, 0.9084, 0.9210).unwrap();
    assert_abs_diff_eq!(rho.entry(0, 7).re, 0.188_068_2, epsilon = 1e-7);
    for &(q, r) in &[(0.2, 0.7), (1.0, 0.0)] {
        let rho = noise_model_state(0.0, q, r).unwrap();
        assert!(frobenius_norm(&(rho.matrix() - DensityMatrix::maximally_mixed(3).matrix())) < 1e-15);
    }
    assert!(noise_model_state(0.5, 1.5, 0.5).is_err());
}

#[test]
fn noise_model_reduces_to_noisy_ghz() {
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let a = noise_model_state(p, 1.0, 1.0).unwrap();
        let b = noisy_ghz(p).unwrap();
        for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
            assert!((x - y).norm() <= 1e-14);
        }
    }
}

#[test]
fn noisy_w_entries() {
    let rho = noisy_w(0.6).unwrap();
    assert_abs_diff_eq!(rho.entry(0b001, 0b010).re, 0.2, epsilon = 1e-15);
    assert_abs_diff_eq!(rho.entry(0b001, 0b001).re, (3.0 + 5.0 * 0.6) / 24.0, epsilon = 1e-15);
    assert_abs_diff_eq!(rho.entry(0b111, 0b111).re, 0.4 / 8.0, epsilon = 1e-15);
    assert_eq!(noisy_w(0.0).unwrap(), DensityMatrix::maximally_mixed(3));
    let w = w_state().projector();
    assert!(frobenius_norm(&(noisy_w(1.0).unwrap().matrix() - w.matrix())) < 1e-15);
    assert!(noisy_w(2.0).is_err());
}

#[test]
fn constructor_outputs_satisfy_invariants() {
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        assert_state_invariants(&noisy_ghz(p).unwrap());
        assert_state_invariants(&noisy_w(p).unwrap());
        assert_state_invariants(&noise_model_state(p, 0.9, 0.8).unwrap());
        assert_state_invariants(&noisy_bell(p).unwrap());
    }
}

#[test]
fn noisy_ghz_spectrum_closed_form() {
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let vals = noisy_ghz(p).unwrap().eigenvalues();
        let mut expected = vec![(1.0 - p) / 8.0; 7];
        expected.push((1.0 + 7.0 * p) / 8.0);
        expected.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12, "p={p}: {a} vs {b}");
        }
    }
}

#[test]
fn tensor_examples() {
    let half = DensityMatrix::maximally_mixed(1);
    assert!(frobenius_norm(&(half.tensor(&half).matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-16);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_state(1, &mut rng);
    let y = random_state(2, &mut rng);
    let xy = x.tensor(&y);
    assert_abs_diff_eq!(xy.trace(), x.trace() * y.trace(), epsilon = 1e-14);

    let a = PureState::qubit(0.3, 1.1);
    let b = make_ghz(1, Sign::Minus).unwrap();
    let direct = a.tensor(&b).projector();
    let via_rho = a.projector().tensor(&b.projector());
    assert!(frobenius_norm(&(direct.matrix() - via_rho.matrix())) < 1e-15);
    let lam = via_rho.eigenvalues();
    assert_abs_diff_eq!(lam[lam.len() - 1], 1.0, epsilon = 1e-12);
}

#[test]
fn partial_trace_examples() {
    let ghz = make_ghz(0, Sign::Plus).unwrap().projector();
    let keep01 = SubsystemPartition::kept(3, &[0, 1]).unwrap();
    let reduced = ghz.partial_trace(&keep01).unwrap();
    let mut expected = CMatrix::zeros(4, 4);
    expected[(0, 0)] = c(0.5);
    expected[(3, 3)] = c(0.5);
    assert!(frobenius_norm(&(reduced.matrix() - expected)) < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let x = random_state(2, &mut rng);
        let y = random_state(1, &mut rng);
        let xy = x.tensor(&y);
        let back = xy.partial_trace(&SubsystemPartition::kept(3, &[0, 1]).unwrap()).unwrap();
        for (a, b) in back.matrix().iter().zip(x.matrix().iter()) {
            assert!((a - b).norm() <= 1e-12);
        }
        let other = xy.partial_trace(&SubsystemPartition::kept(3, &[2]).unwrap()).unwrap();
        assert!(frobenius_norm(&(other.matrix() - y.matrix())) <= 1e-12);
        assert_abs_diff_eq!(back.trace(), xy.trace(), epsilon = 1e-13);
    }
    let bad = SubsystemPartition::kept(2, &[0]).unwrap();
    assert!(ghz.partial_trace(&bad).is_err());
}

#[test]
fn partial_transpose_examples() {
    let bell = bell_phi_plus().projector();
    let cut = SubsystemPartition::bipartition(2, &[0]).unwrap();
    let pt = bell.partial_transpose(&cut, Party::B).unwrap();
    assert_abs_diff_eq!(linalg::min_eigenvalue(&pt).unwrap(), -0.5, epsilon = 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let prod = random_state(1, &mut rng).tensor(&random_state(1, &mut rng));
    let pt = prod.partial_transpose(&cut, Party::B).unwrap();
    assert!(linalg::min_eigenvalue(&pt).unwrap() >= -1e-14);
}

#[test]
fn partial_transpose_is_trace_preserving_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let m = random_hermitian(n, &mut rng);
        let subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let once = qubits::partial_transpose(&m, n, &subset).unwrap();
        let twice = qubits::partial_transpose(&once, n, &subset).unwrap();
        assert_eq!(twice, m);
        assert!((linalg::trace(&once) - linalg::trace(&m)).norm() <= 1e-14);
        assert!(linalg::hermiticity_deviation(&once) <= 1e-15);
    }
}

#[test]
fn projection_examples() {
    // |+> on the last qubit of a noisy GHZ state gives p |Phi+><Phi+| + (1-p) I/4.
    let p = 0.42;
    let rho = noisy_ghz(p).unwrap();
    let plus = PureState::qubit(PI / 4.0, 0.0);
    let part = SubsystemPartition::kept(3, &[0, 1]).unwrap();
    let (local, weight) = rho.project_subsystem(&plus, &part, true).unwrap();
    assert_abs_diff_eq!(weight, 0.5, epsilon = 1e-15);
    let expected = noisy_bell(p).unwrap();
    assert!(frobenius_norm(&(local.matrix() - expected.matrix())) < 1e-15);

    // Product state: projecting B leaves rho_A up to scale.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let a = random_state(2, &mut rng);
    let b = random_state(1, &mut rng);
    let ab = a.tensor(&b);
    let psi = PureState::qubit(0.7, 2.0);
    let (out, w) = ab.project_subsystem(&psi, &SubsystemPartition::kept(3, &[0, 1]).unwrap(), false).unwrap();
    assert!(frobenius_norm(&(out.matrix() - a.matrix() * c(w))) < 1e-14);

    // Completeness over an orthonormal basis.
    let theta = 0.3;
    let phi = 1.7;
    let b0 = PureState::qubit(theta, phi);
    let b1 = PureState::new(vec![
        Complex64::new(theta.sin(), 0.0),
        -Complex64::from_polar(theta.cos(), phi),
    ])
    .unwrap();
    assert_abs_diff_eq!(b0.inner(&b1).unwrap().norm(), 0.0, epsilon = 1e-15);
    let rho = random_state(3, &mut rng);
    let part = SubsystemPartition::kept(3, &[0, 2]).unwrap();
    let w0 = rho.project_subsystem(&b0, &part, false).unwrap().1;
    let w1 = rho.project_subsystem(&b1, &part, false).unwrap().1;
    assert_abs_diff_eq!(w0 + w1, 1.0, epsilon = 1e-14);

    // Degenerate branch.
    let zero = PureState::basis(3, 0).unwrap().projector();
    let one = PureState::basis(1, 1).unwrap();
    let part = SubsystemPartition::kept(3, &[0, 1]).unwrap();
    assert!(matches!(
        zero.project_subsystem(&one, &part, true),
        Err(Error::DegenerateProjection { .. })
    ));
    assert!(zero.project_subsystem(&one, &part, false).is_ok());
    let two = PureState::basis(2, 0).unwrap();
    assert!(rho.project_subsystem(&two, &part, true).is_err());
}

#[test]
fn fidelity_examples() {
    let g = make_ghz(0, Sign::Plus).unwrap();
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let f = noisy_ghz(p).unwrap().fidelity_with_pure(&g).unwrap();
        assert_abs_diff_eq!(f, (1.0 + 7.0 * p) / 8.0, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(noisy_ghz(0.5).unwrap().fidelity_with_pure(&g).unwrap(), 0.5625, epsilon = 1e-15);
    let mixed = DensityMatrix::maximally_mixed(3);
    assert_abs_diff_eq!(mixed.fidelity_with_pure(&w_state()).unwrap(), 0.125, epsilon = 1e-15);
    assert!(mixed.fidelity_with_pure(&bell_phi_plus()).is_err());
}

#[test]
fn local_operation_examples() {
    let plus = make_ghz(0, Sign::Plus).unwrap().projector();
    let minus = make_ghz(0, Sign::Minus).unwrap().projector();
    let flipped = plus.apply_local(&gates::PAULI_Z, 2).unwrap();
    assert!(frobenius_norm(&(flipped.matrix() - minus.matrix())) < 1e-15);

    let rho = noisy_w(0.7).unwrap();
    assert_eq!(rho.apply_local(&gates::IDENTITY, 1).unwrap(), rho);
    let twice = rho
        .apply_local(&gates::PAULI_X, 1)
        .unwrap()
        .apply_local(&gates::PAULI_X, 1)
        .unwrap();
    assert!(frobenius_norm(&(twice.matrix() - rho.matrix())) < 1e-15);
    assert!(rho.apply_local(&gates::PAULI_X, 3).is_err());
}

#[test]
fn partition_validation() {
    assert!(SubsystemPartition::new(3, vec![(Party::A, vec![0]), (Party::B, vec![1])]).is_err());
    assert!(SubsystemPartition::new(3, vec![(Party::A, vec![0, 1]), (Party::B, vec![1, 2])]).is_err());
    assert!(SubsystemPartition::new(3, vec![(Party::A, vec![0]), (Party::A, vec![1, 2])]).is_err());
    assert!(SubsystemPartition::new(2, vec![(Party::A, vec![0]), (Party::B, vec![2])]).is_err());
    let t = SubsystemPartition::tripartite();
    assert_eq!(t.qubits(Party::B), &[1]);
    assert!(t.qubits(Party::Kept).is_empty());
}

#[test]
fn json_roundtrip_and_validation() {
    let rho = noisy_w(0.3).unwrap();
    let back = DensityMatrix::from_json_str(&rho.to_json_string()).unwrap();
    assert_eq!(back, rho);

    let non_hermitian = r#"{"n_qubits":1,"re":[[0.5,0.2],[0.0,0.5]],"im":[[0,0],[0,0]]}"#;
    assert!(matches!(
        DensityMatrix::from_json_str(non_hermitian),
        Err(Error::NotHermitian { .. })
    ));
    let bad_trace = r#"{"n_qubits":1,"re":[[0.5,0],[0,0.6]],"im":[[0,0],[0,0]]}"#;
    assert!(matches!(
        DensityMatrix::from_json_str(bad_trace),
        Err(Error::InvalidState(_))
    ));
    let bad_shape = r#"{"n_qubits":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#;
    assert!(matches!(DensityMatrix::from_json_str(bad_shape), Err(Error::Parse(_))));
    assert!(matches!(DensityMatrix::from_json_str("{"), Err(Error::Parse(_))));
}

proptest! {
    #[test]
    fn noisy_ghz_is_valid_for_all_p(p in 0.0f64..=1.0) {
        let rho = noisy_ghz(p).unwrap();
        let (h, t, n) = rho.invariant_report();
        prop_assert!(h <= 1e-10 && t <= 1e-10 && n <= 1e-9);
    }

    #[test]
    fn projector_of_random_qubit_state_is_pure(theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
        let rho = PureState::qubit(theta, phi).projector();
        let vals = rho.eigenvalues();
        prop_assert!(vals[0].abs() < 1e-14);
        prop_assert!((vals[1] - 1.0).abs() < 1e-14);
    }
}
