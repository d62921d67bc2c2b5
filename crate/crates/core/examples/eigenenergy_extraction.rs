//! Recovering complex eigenenergies from simulated amplitudes and fitting the
//! symmetric `{−i·i1, ±r − i·i2}` form.

use std::f64::consts::TAU;

use nhtopo::analysis::{extract_eigenenergies, fit_symmetric_parametrization, perturbation_ratios, DEFAULT_RE_TOL};
use nhtopo::dynamics::evolve_nh_with;
use nhtopo::spectra::{eigenvalues_closed_form, eigenvalues_two_mode};
use nhtopo::{build_chain_hamiltonian, ChainParams, StateVector};

fn main() -> nhtopo::Result<()> {
    let kappa = 5.0;

    let l1 = 2.5;
    let h2 = build_chain_hamiltonian(&ChainParams::two_mode(l1, kappa)?);
    let trace = evolve_nh_with(&h2, &StateVector::basis(2, 1), 1e-3, 4.0, 20)?;
    println!("two-mode, lambda1 = {l1}: exact {:?}", eigenvalues_two_mode(l1, kappa));
    println!("  extracted {:?}", extract_eigenenergies(&trace, 1, 2)?);

    for theta in [TAU / 8.0, TAU / 6.0] {
        let (l1, l2) = (TAU * theta.sin(), TAU * theta.cos());
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa)?);
        let trace = evolve_nh_with(&h, &StateVector::basis(3, 1), 1e-3, 4.0, 20)?;
        let found = extract_eigenenergies(&trace, 1, 3)?;
        let exact = eigenvalues_closed_form(l1, l2, kappa);
        let err = found
            .iter()
            .zip(exact.energies())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let fit = fit_symmetric_parametrization(&found, DEFAULT_RE_TOL * kappa)?;
        let ratios = perturbation_ratios(l1, l2, kappa)?;
        println!("theta = {:.4}: max error vs closed form {err:.2e}", theta);
        println!("  r = {:.6}, i1 = {:.6}, i2 = {:.6}, residual {:.1e}", fit.r, fit.i1, fit.i2, fit.residual);
        println!(
            "  ratios: 1-2 {:.4}, 2-3 {:.4}, kappa/(8 lambda) {:.4}",
            ratios.ratio12, ratios.ratio23, ratios.reference
        );
    }
    Ok(())
}
