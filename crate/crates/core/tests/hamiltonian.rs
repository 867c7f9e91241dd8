mod common;

use effbasis_core::hamiltonian::{apply_hamiltonian, exact_ground_state, jordan_wigner};
use effbasis_core::{Complex64, PauliString, QubitHamiltonian, StateVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURES: [&str; 8] = [
    "h4_square_d1.5",
    "h4_linear_r1.5",
    "h6_linear_r1.5",
    "beh2_r1.5",
    "beh2_r2.0",
    "beh2_r2.6",
    "beh2_r3.0",
    "beh2_r3.5",
];

fn random_pauli(rng: &mut impl Rng, n: usize) -> PauliString {
    let x = rng.gen_range(0u64..1 << n);
    let z = rng.gen_range(0u64..1 << n);
    PauliString::from_masks(x, z)
}

#[test]
fn matvec_matches_kronecker_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = 6;
        let terms: Vec<(f64, PauliString)> = (0..25)
            .map(|_| (rng.gen_range(-1.0..1.0), random_pauli(&mut rng, n)))
            .collect();
        let qh = QubitHamiltonian::new(n, terms).unwrap();
        let amps: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let v = StateVector::from_amplitudes(amps.clone()).unwrap();
        let fast = apply_hamiltonian(&qh, &v).unwrap();
        let dense = common::kron_matrix(&qh) * DVector::from_vec(amps);
        let err = fast
            .amplitudes()
            .iter()
            .zip(dense.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "max deviation {err:e}");
    }
}

#[test]
fn encoding_matches_second_quantization() {
    for name in ["h4_square_d1.5", "beh2_r2.6"] {
        let fh = common::fermion(name);
        let qh = jordan_wigner(&fh).unwrap();
        let all: Vec<usize> = (0..1 << qh.n_qubits()).collect();
        let oracle = common::fermion_matrix(&fh, &all);
        let dense = common::kron_matrix(&qh);
        let err = (dense.map(|c| c.re) - oracle).abs().max();
        assert!(err < 1e-10, "{name}: {err:e}");
        assert!(dense.map(|c| c.im).abs().max() < 1e-12);
    }
}

#[test]
fn particle_number_and_spin_are_conserved() {
    for name in FIXTURES {
        let qh = common::qubit(name);
        let sparse = qh.to_sparse();
        let sz = |b: usize| {
            (0..qh.n_qubits())
                .filter(|q| b >> q & 1 == 1)
                .map(|q| if q % 2 == 0 { 1 } else { -1 })
                .sum::<i32>()
        };
        for row in 0..1usize << qh.n_qubits() {
            for (col, v) in sparse.row(row) {
                if v.norm() > 1e-12 {
                    assert_eq!(row.count_ones(), col.count_ones(), "{name}");
                    assert_eq!(sz(row), sz(col), "{name}");
                }
            }
        }
    }
}

#[test]
fn ground_energies_match_reference_values() {
    let refs = common::references();
    assert_eq!(refs.len(), FIXTURES.len());
    for name in FIXTURES {
        let r = &refs[name];
        let fh = common::fermion(name);
        assert_eq!(fh.n_spatial(), r.n_spatial);
        assert_eq!(fh.n_electrons(), r.n_electrons);
        let qh = jordan_wigner(&fh).unwrap();
        let (e, psi) = exact_ground_state(&qh, r.n_electrons).unwrap();
        assert!(
            (e - r.fci_energy).abs() < 1e-8,
            "{name}: {e} vs {}",
            r.fci_energy
        );

        let half = r.n_electrons / 2;
        let dets = common::determinants(r.n_spatial, half, half);
        let oracle = common::fermion_matrix(&fh, &dets);
        let lowest = nalgebra::SymmetricEigen::new(oracle).eigenvalues.min();
        assert!((e - lowest).abs() < 1e-9, "{name}: {e} vs {lowest}");

        let hpsi = apply_hamiltonian(&qh, &psi).unwrap();
        let residual: f64 = hpsi
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual < 1e-8, "{name}: residual {residual:e}");
    }
}

#[test]
fn number_operator_counts_electrons() {
    let n = QubitHamiltonian::number_operator(6);
    let dense: DMatrix<Complex64> = common::kron_matrix(&n);
    for b in 0..64usize {
        assert!((dense[(b, b)].re - b.count_ones() as f64).abs() < 1e-12);
    }
}
