use num_complex::Complex64;
use proptest::prelude::*;

use nhtopo::dynamics::{bessel_j, evolve_nh, evolve_nh_with};
use nhtopo::{build_chain_hamiltonian, ChainParams, StateVector};

/// `exp(−iHt)(0, 1)ᵀ` for the two-mode chain.
fn two_mode_exact(l1: f64, kappa: f64, t: f64) -> [Complex64; 2] {
    let i = Complex64::i();
    let tau = -i * kappa / 4.0;
    let (a, d) = (-i * kappa / 2.0 - tau, -tau);
    let omega = (a * a + l1 * l1).sqrt();
    let phase = (-i * tau * t).exp();
    let (c, s) = ((omega * t).cos(), (omega * t).sin() / omega);
    [phase * (-i * s * l1), phase * (c - i * s * d)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_decay_law(l1 in 0.1..5.0f64, l2 in 0.1..5.0f64, kappa in 0.1..5.0f64, start in 0usize..3) {
        let dt = 1e-3;
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa).unwrap());
        let trace = evolve_nh(&h, &StateVector::basis(3, start), dt, 2.0).unwrap();
        for k in 1..trace.len() - 1 {
            let slope = (trace.norms[k + 1] - trace.norms[k - 1]) / (2.0 * dt);
            let c1 = trace.states[k].amplitudes()[0].norm_sqr();
            prop_assert!((slope + kappa * c1).abs() < 1e-5 * kappa.max(1.0), "t = {}", trace.times[k]);
        }
        for p in &trace.populations {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_is_fourth_order(l1 in 0.5..5.0f64, kappa in 0.5..5.0f64) {
        let t = 1.0;
        let exact = two_mode_exact(l1, kappa, t);
        let h = build_chain_hamiltonian(&ChainParams::two_mode(l1, kappa).unwrap());
        let error = |dt: f64| {
            let trace = evolve_nh(&h, &StateVector::basis(2, 1), dt, t).unwrap();
            let last = trace.states.last().unwrap();
            last.amplitudes().iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        };
        let ratio = error(0.01) / error(0.005);
        prop_assert!((14.0..=18.0).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn bessel_recurrence(n in 1u32..19, x in 0.5..30.0f64) {
        let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
        let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "n = {}, x = {}: {} vs {}", n, x, lhs, rhs);
    }
}

#[test]
fn strided_trace_matches_full_trace() {
    let h = build_chain_hamiltonian(&ChainParams::three_mode(1.0, 0.5, 2.0).unwrap());
    let psi0 = StateVector::basis(3, 1);
    let full = evolve_nh(&h, &psi0, 1e-3, 1.0).unwrap();
    let strided = evolve_nh_with(&h, &psi0, 1e-3, 1.0, 10).unwrap();
    assert_eq!(strided.len(), 101);
    for (k, state) in strided.states.iter().enumerate() {
        assert_eq!(state, &full.states[10 * k]);
    }
}
