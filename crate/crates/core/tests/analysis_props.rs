use num_complex::Complex64;
use proptest::prelude::*;

use nhtopo::analysis::{
    fit_symmetric_parametrization, matrix_pencil, pairwise_concurrence, reduced_two_mode_state, wootters_concurrence,
    SymmetricParametrization,
};
use nhtopo::dynamics::evolve_nh_with;
use nhtopo::{build_chain_hamiltonian, ChainParams, StateVector};

fn unit_state(re: &[f64], im: &[f64]) -> Option<StateVector> {
    let amps: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let psi = StateVector::new(amps);
    (psi.norm() > 1e-3).then(|| psi.normalized())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_concurrence_matches_wootters(
        re in prop::collection::vec(-1.0..1.0f64, 3),
        im in prop::collection::vec(-1.0..1.0f64, 3),
        pair in prop::sample::select(vec![(0usize, 1usize), (0, 2), (1, 2)]),
    ) {
        let Some(psi) = unit_state(&re, &im) else { return Ok(()) };
        // pairwise_concurrence itself enforces the 1e-10 agreement; check it independently too
        let closed = pairwise_concurrence(&psi, pair).unwrap();
        let general = wootters_concurrence(&reduced_two_mode_state(&psi, pair).unwrap()).unwrap();
        prop_assert!((closed - general).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&closed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fit_inverts_reconstruct(r in 0.1..20.0f64, i1 in 0.0..5.0f64, i2 in 0.0..5.0f64) {
        let exact = SymmetricParametrization { r, i1, i2, residual: 0.0 };
        let fit = fit_symmetric_parametrization(&exact.reconstruct(), 0.02).unwrap();
        prop_assert!((fit.r - r).abs() <= 1e-15 * r);
        prop_assert_eq!(fit.i1, i1);
        prop_assert!((fit.i2 - i2).abs() <= 1e-15 * i2.max(1.0));
        prop_assert!(fit.residual <= 1e-14 * r);
    }

    #[test]
    fn pencil_recovers_separated_exponentials(
        raw in prop::collection::vec((-5.0..5.0f64, -1.0..0.0f64, 0.2..1.0f64, 0.0..6.3f64), 1..=3),
    ) {
        let energies: Vec<Complex64> = raw.iter().map(|&(re, im, _, _)| Complex64::new(re, im)).collect();
        for a in 0..energies.len() {
            for b in 0..a {
                prop_assume!((energies[a] - energies[b]).norm() >= 0.01);
            }
        }
        let dt = 0.05;
        let samples: Vec<Complex64> = (0..400)
            .map(|k| {
                let t = k as f64 * dt;
                raw.iter()
                    .map(|&(re, im, amp, phase)| {
                        Complex64::from_polar(amp, phase) * (-Complex64::i() * Complex64::new(re, im) * t).exp()
                    })
                    .sum()
            })
            .collect();
        let found = matrix_pencil(&samples, dt, energies.len()).unwrap();
        prop_assert_eq!(found.len(), energies.len());
        for e in &energies {
            let best = found.iter().map(|f| (f.energy - e).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-6 * e.norm().max(1e-2), "{:?} missing from {:?}", e, found);
        }
    }
}

#[test]
fn concurrence_is_bounded_along_a_trace() {
    let h = build_chain_hamiltonian(&ChainParams::three_mode(1.0, 0.6, 1.0).unwrap());
    let trace = evolve_nh_with(&h, &StateVector::basis(3, 1), 1e-3, 20.0, 100).unwrap();
    for state in &trace.states {
        let psi = state.normalized();
        for pair in [(0, 1), (0, 2), (1, 2)] {
            let c = pairwise_concurrence(&psi, pair).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&c));
        }
    }
}

#[test]
fn pencil_resolves_minimal_separation() {
    let energies = [Complex64::new(1.0, -0.2), Complex64::new(1.01, -0.2), Complex64::new(-2.0, -0.5)];
    let dt = 0.05;
    let samples: Vec<Complex64> = (0..400)
        .map(|k| energies.iter().map(|e| (-Complex64::i() * e * (k as f64 * dt)).exp()).sum())
        .collect();
    let found = matrix_pencil(&samples, dt, 3).unwrap();
    for e in &energies {
        let best = found.iter().map(|f| (f.energy - e).norm()).fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-6 * e.norm(), "{e} -> {best:e}");
    }
}
