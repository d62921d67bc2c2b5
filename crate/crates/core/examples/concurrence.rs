//! Pairwise entanglement of the coalesced EP3 eigenvector.

use nhtopo::analysis::{pairwise_concurrence, reduced_two_mode_state, wootters_concurrence};
use nhtopo::spectra::{eigenvalues_closed_form, eigenvector_for, locate_ep3};
use nhtopo::{build_chain_hamiltonian, ChainParams};

fn main() -> nhtopo::Result<()> {
    let kappa = 1.0;
    let (l1, l2) = locate_ep3(kappa)?[0];
    let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa)?);
    let energy = eigenvalues_closed_form(l1, l2, kappa).sum() / 3.0;
    let psi = eigenvector_for(&h, energy)?.state.normalized();
    let pops: Vec<String> = psi.populations().iter().map(|p| format!("{p:.6}")).collect();
    println!("EP3 eigenvector populations: {}", pops.join(", "));
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let c = pairwise_concurrence(&psi, (i, j))?;
        let w = wootters_concurrence(&reduced_two_mode_state(&psi, (i, j))?)?;
        println!("C{}{} = {c:.10} (Wootters {w:.10})", i + 1, j + 1);
    }
    println!("sqrt(2/3) = {:.10}, sqrt(1/3) = {:.10}, sqrt(2/9) = {:.10}", (2f64 / 3.0).sqrt(), (1f64 / 3.0).sqrt(), (2f64 / 9.0).sqrt());
    Ok(())
}
