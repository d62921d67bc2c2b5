use num_complex::Complex64;
use proptest::prelude::*;

use nhtopo::poly::{characteristic_polynomial, polynomial_roots};
use nhtopo::spectra::{chain_eigenvectors, eigenvalues_closed_form};
use nhtopo::{build_chain_hamiltonian, ChainParams};

fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS
        .iter()
        .map(|p| (0..3).map(|k| (a[k] - b[p[k]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn scale(l1: f64, l2: f64, kappa: f64) -> f64 {
    kappa.max(l1.abs()).max(l2.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn vieta_trace_and_product(l1 in -10.0..10.0f64, l2 in -10.0..10.0f64, kappa in 0.0..10.0f64) {
        let s = eigenvalues_closed_form(l1, l2, kappa);
        prop_assert!((s.sum() + Complex64::new(0.0, kappa / 2.0)).norm() < 1e-9 * kappa.max(1.0));
        let expected = Complex64::new(0.0, kappa * l2 * l2 / 2.0);
        prop_assert!((s.product() - expected).norm() < 1e-8 * scale(l1, l2, kappa).powi(3));
    }

    #[test]
    fn closed_form_matches_root_finder(l1 in -10.0..10.0f64, l2 in -10.0..10.0f64, kappa in 0.01..10.0f64) {
        let s = eigenvalues_closed_form(l1, l2, kappa);
        prop_assume!(s.min_gap() > 1e-3 * kappa);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa).unwrap());
        let roots = polynomial_roots(&characteristic_polynomial(&h)).unwrap();
        prop_assert!(matching_distance(s.energies(), &roots) < 1e-8 * scale(l1, l2, kappa));
    }

    #[test]
    fn spectrum_is_symmetric_under_minus_conjugate(l1 in -10.0..10.0f64, l2 in -10.0..10.0f64, kappa in 0.0..10.0f64) {
        let s = eigenvalues_closed_form(l1, l2, kappa);
        let mirrored: Vec<Complex64> = s.energies().iter().map(|e| -e.conj()).collect();
        let tol = 1e-10 * scale(l1, l2, kappa);
        prop_assert!(matching_distance(s.energies(), &mirrored) < tol);
    }

    #[test]
    fn lossless_spectra_are_real(l1 in -10.0..10.0f64, l2 in -10.0..10.0f64) {
        let s = eigenvalues_closed_form(l1, l2, 0.0);
        for e in s.energies() {
            prop_assert!(e.im.abs() < 1e-12 * scale(l1, l2, 0.0));
        }
    }

    #[test]
    fn eigenvector_residuals(l1 in -10.0..10.0f64, l2 in -10.0..10.0f64, kappa in 0.01..10.0f64) {
        let s = eigenvalues_closed_form(l1, l2, kappa);
        prop_assume!(s.min_gap() > 1e-3 * kappa);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa).unwrap());
        let (spectrum, vectors) = chain_eigenvectors(l1, l2, kappa).unwrap();
        for (e, v) in spectrum.energies().iter().zip(&vectors) {
            let r: f64 = h.shifted(*e).mul_vec(v.state.amplitudes()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(r < 1e-9 * h.frobenius_norm() * v.state.norm());
        }
    }

    #[test]
    fn chain_matrix_structure(
        kappas in prop::collection::vec(0.0..10.0f64, 2..=8),
        seed in prop::collection::vec(-10.0..10.0f64, 7),
    ) {
        let n = kappas.len();
        let lambdas = seed[..n - 1].to_vec();
        let h = build_chain_hamiltonian(&ChainParams::new(n, kappas.clone(), lambdas.clone()).unwrap());
        prop_assert!(h.is_complex_symmetric(0.0));
        let trace: f64 = kappas.iter().sum::<f64>() / 2.0;
        prop_assert!((h.trace() - Complex64::new(0.0, -trace)).norm() < 1e-12 * trace.max(1.0));
        let lossless = build_chain_hamiltonian(&ChainParams::new(n, vec![0.0; n], lambdas).unwrap());
        prop_assert!(lossless.is_hermitian(0.0));
    }
}
