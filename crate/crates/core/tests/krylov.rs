mod common;

use effbasis_core::hamiltonian::{exact_ground_state, lowest_determinant};
use effbasis_core::krylov::{krylov_basis, krylov_energy};
use effbasis_core::{Complex64, KrylovConfig, KrylovMode, Sector, DEFAULT_THRESHOLD};
use nalgebra::{DMatrix, DVector};

#[test]
fn realtime_basis_matches_dense_exponential() {
    let qh = common::qubit("h4_square_d1.5");
    let refs = vec![0b00001111, 0b00111100];
    let cfg = KrylovConfig {
        references: refs.clone(),
        ..KrylovConfig::new(KrylovMode::Realtime, 6, 4)
    };
    let basis = krylov_basis(&qh, &cfg).unwrap();
    let h = common::kron_matrix(&qh);
    let step: DMatrix<Complex64> = (h * Complex64::new(0.0, -cfg.dt)).exp();
    for (j, v) in basis.iter().enumerate() {
        let mut expect = DVector::from_element(256, Complex64::new(0.0, 0.0));
        expect[refs[j % 2]] = Complex64::new(1.0, 0.0);
        for _ in 0..j / 2 {
            expect = &step * expect;
        }
        let err = v
            .amplitudes()
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "vector {j}: {err:e}");
    }
}

#[test]
fn realtime_energies_are_bounded_and_nested() {
    let qh = common::qubit("h4_linear_r1.5");
    let (fci, _) = exact_ground_state(&qh, 4).unwrap();
    let (_, e0) = lowest_determinant(&qh, Sector::singlet(4)).unwrap();
    let mut last = f64::INFINITY;
    for n in 1..=5 {
        let r = krylov_energy(
            &qh,
            &KrylovConfig::new(KrylovMode::Realtime, n, 4),
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        assert!(r.ground_energy >= fci - 1e-9);
        // Nested spaces can only lower the value while nothing is discarded.
        if r.retained_rank == n {
            assert!(r.ground_energy <= last + 1e-8);
        }
        if n == 1 {
            assert!((r.ground_energy - e0).abs() < 1e-10);
        }
        last = r.ground_energy;
    }
    assert!(last < e0);
}

#[test]
fn power_basis_reaches_the_ground_state() {
    let qh = common::qubit("h4_square_d1.5");
    let (fci, _) = exact_ground_state(&qh, 4).unwrap();
    let r = krylov_energy(
        &qh,
        &KrylovConfig::new(KrylovMode::Power, 12, 4),
        DEFAULT_THRESHOLD,
    )
    .unwrap();
    assert!(r.ground_energy >= fci - 1e-9);
    assert!(r.ground_energy - fci < 1e-3, "{}", r.ground_energy - fci);
}
