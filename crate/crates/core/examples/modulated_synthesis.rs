//! Two-tone qubit modulation versus the effective three-mode chain.

use nhtopo::dynamics::{
    effective_couplings, evolve_modulated_with, evolve_nh, population_rms, ExperimentalSetup, Resonance, DEFAULT_DT,
};
use nhtopo::{build_chain_hamiltonian, ChainParams, StateVector};

fn main() -> nhtopo::Result<()> {
    let setup = ExperimentalSetup::reference();
    let (l1, l2) = ExperimentalSetup::reference_couplings();
    let t_final = 1.0;

    let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, setup.kappa)?);
    let psi0 = StateVector::basis(3, 1);
    let effective = evolve_nh(&h, &psi0, DEFAULT_DT, t_final)?;

    for resonance in [Resonance::Bare, Resonance::Dressed] {
        let cfg = setup.modulation_for(l1, l2, resonance)?;
        let (mu1, mu2) = cfg.indices()?;
        let dt = cfg.max_dt();
        let stride = (DEFAULT_DT / dt).round().max(1.0) as usize;
        let full = evolve_modulated_with(&cfg, &psi0, dt, t_final, stride)?;
        let rms = population_rms(&effective, &full)?;
        let (e1, e2) = effective_couplings(&cfg)?;
        println!(
            "{resonance:?}: nu = ({:.3}, {:.3}) /us, mu = ({mu1:.5}, {mu2:.5}), lambda = ({e1:.4}, {e2:.4}), rms = {rms:.4}",
            cfg.nu1, cfg.nu2
        );
    }
    Ok(())
}
