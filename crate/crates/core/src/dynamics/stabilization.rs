use super::TimeTrace;
use crate::error::{Error, Result};
use crate::spectra::ComplexSpectrum;
use crate::state::StateVector;

/// Fidelity reported as "stabilized".
pub const FIDELITY_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationReport {
    /// `fidelities[n][k] = |⟨Φ_n|ψ(t_k)⟩|² / (‖Φ_n‖²‖ψ(t_k)‖²)`.
    pub fidelities: Vec<Vec<f64>>,
    /// Index of the eigenvector with the strictly largest `Im E`.
    pub dominant: Option<usize>,
    /// First sample time at which the dominant fidelity exceeds [`FIDELITY_THRESHOLD`].
    pub time_to_threshold: Option<f64>,
    /// Two or more spectrum entries coincide (an EP); the fidelities then
    /// refer to the single coalesced eigenvector.
    pub defective_advisory: bool,
}

impl StabilizationReport {
    pub fn dominant_fidelity(&self) -> Option<&[f64]> {
        self.dominant.map(|n| self.fidelities[n].as_slice())
    }
}

pub fn stabilization_metrics(
    trace: &TimeTrace,
    spectrum: &ComplexSpectrum,
    eigenvectors: &[StateVector],
) -> Result<StabilizationReport> {
    if eigenvectors.len() != spectrum.len() {
        return Err(Error::DimensionMismatch {
            what: "eigenvectors",
            expected: spectrum.len(),
            actual: eigenvectors.len(),
        });
    }
    if let Some(v) = eigenvectors.iter().find(|v| v.dim() != trace.dim()) {
        return Err(Error::DimensionMismatch {
            what: "eigenvector dimension",
            expected: trace.dim(),
            actual: v.dim(),
        });
    }
    let energies = spectrum.energies();
    let scale = energies.iter().map(|e| e.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let defective_advisory = spectrum.min_gap() < 1e-6 * scale;

    let fidelities: Vec<Vec<f64>> = eigenvectors
        .iter()
        .map(|phi| {
            trace
                .states
                .iter()
                .map(|psi| {
                    let overlap: num_complex::Complex64 = phi
                        .amplitudes()
                        .iter()
                        .zip(psi.amplitudes())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    overlap.norm_sqr() / (phi.norm() * phi.norm() * psi.norm() * psi.norm())
                })
                .collect()
        })
        .collect();

    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[b].im.total_cmp(&energies[a].im));
    let dominant = match order.as_slice() {
        [only] => Some(*only),
        [first, second, ..] if energies[*first].im - energies[*second].im > 1e-9 * scale => Some(*first),
        _ => None,
    };
    let time_to_threshold = dominant.and_then(|n| {
        fidelities[n]
            .iter()
            .position(|&f| f > FIDELITY_THRESHOLD)
            .map(|k| trace.times[k])
    });
    Ok(StabilizationReport {
        fidelities,
        dominant,
        time_to_threshold,
        defective_advisory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_nh_with;
    use crate::model::{build_chain_hamiltonian, ChainParams};
    use crate::spectra::chain_eigenvectors;

    #[test]
    fn isofrequency_point_stabilizes() {
        let k = 1.0;
        let (l1, l2) = (0.2 * k, 0.02 * k);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, k).unwrap());
        let (spectrum, vecs) = chain_eigenvectors(l1, l2, k).unwrap();
        let states: Vec<StateVector> = vecs.into_iter().map(|v| v.state).collect();
        let trace = evolve_nh_with(&h, &StateVector::basis(3, 2), 0.01, 400.0, 100).unwrap();
        let report = stabilization_metrics(&trace, &spectrum, &states).unwrap();
        assert!(report.dominant.is_some());
        assert!(report.time_to_threshold.is_some());
        assert!(!report.defective_advisory);
    }

    #[test]
    fn lossless_chain_has_no_dominant_mode() {
        let h = build_chain_hamiltonian(&ChainParams::three_mode(1.0, 0.7, 0.0).unwrap());
        let (spectrum, vecs) = chain_eigenvectors(1.0, 0.7, 0.0).unwrap();
        let states: Vec<StateVector> = vecs.into_iter().map(|v| v.state).collect();
        let trace = evolve_nh_with(&h, &StateVector::basis(3, 2), 0.01, 10.0, 10).unwrap();
        let report = stabilization_metrics(&trace, &spectrum, &states).unwrap();
        assert_eq!(report.dominant, None);
        assert_eq!(report.time_to_threshold, None);
    }

    #[test]
    fn eigenstate_fidelity_stays_one() {
        let (l1, l2, k) = (1.0, 0.6, 1.0);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, k).unwrap());
        let (spectrum, vecs) = chain_eigenvectors(l1, l2, k).unwrap();
        let states: Vec<StateVector> = vecs.into_iter().map(|v| v.state).collect();
        let trace = evolve_nh_with(&h, &states[1], 0.001, 5.0, 50).unwrap();
        let report = stabilization_metrics(&trace, &spectrum, &states).unwrap();
        assert!(report.fidelities[1].iter().all(|&f| (f - 1.0).abs() < 1e-9));
    }
}
