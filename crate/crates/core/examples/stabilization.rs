//! No-jump dynamics in the isofrequency region: the state locks onto the
//! longest-lived eigenvector while the success probability keeps falling.

use nhtopo::dynamics::{evolve_nh_with, stabilization_metrics};
use nhtopo::spectra::chain_eigenvectors;
use nhtopo::{build_chain_hamiltonian, ChainParams, StateVector};

fn main() -> nhtopo::Result<()> {
    let kappa = 1.0;
    let (l1, l2) = (0.2 * kappa, 0.02 * kappa);
    let (spectrum, vectors) = chain_eigenvectors(l1, l2, kappa)?;
    for e in spectrum.energies() {
        println!("E = {:+.1e} {:+.6}i", e.re, e.im);
    }
    let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa)?);
    let trace = evolve_nh_with(&h, &StateVector::basis(3, 2), 0.01, 400.0, 100)?;
    let states: Vec<StateVector> = vectors.into_iter().map(|v| v.state).collect();
    let report = stabilization_metrics(&trace, &spectrum, &states)?;
    let dominant = report.dominant.expect("distinct decay rates");
    let fidelity = &report.fidelities[dominant];
    println!("dominant eigenvector {dominant}, fidelity > 0.99 from t = {:?} us", report.time_to_threshold);
    for k in (0..trace.len()).step_by(50) {
        println!(
            "t = {:6.1} us  norm2 = {:.4e}  fidelity = {:.6}",
            trace.times[k], trace.norms[k], fidelity[k]
        );
    }
    Ok(())
}
