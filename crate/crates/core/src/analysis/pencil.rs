use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::dynamics::TimeTrace;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};
use crate::poly::{characteristic_polynomial, polynomial_roots, sort_spectrum};

/// Singular values below this fraction of the largest count as noise.
pub const RANK_TOL: f64 = 1e-10;
/// Components whose amplitude is below this fraction of the largest are dropped.
pub const PRUNE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilComponent {
    /// Exponent in `a·e^{−iEt}`.
    pub energy: Complex64,
    pub amplitude: Complex64,
}

/// Singular values of the Hankel matrix (pencil length half the sample
/// count), largest first, and the matching rows of Vᴴ as columns.
///
/// faer rather than nalgebra here: nalgebra's complex SVD returns wrong
/// singular vectors for some low-rank Hankel matrices (reconstruction error
/// 0.3 on a rank-one 200×201 case).
fn hankel_svd(samples: &[Complex64]) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = samples.len();
    let pencil = n / 2;
    let hankel = faer::Mat::<faer::c64>::from_fn(n - pencil, pencil + 1, |r, c| samples[r + c]);
    let svd = hankel
        .thin_svd()
        .map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let (sigma, v) = (svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..sigma.nrows()).collect();
    order.sort_by(|&a, &b| sigma[b].re.total_cmp(&sigma[a].re));
    let values = order.iter().map(|&k| sigma[k].re).collect();
    // Rows of Y = UΣVᴴ are combinations of the columns of conj(V), i.e. of the rows of Vᴴ.
    let v = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])].conj());
    Ok((values, v))
}

/// Least-squares solution of `a·x = b` for a tall `a` of full column rank.
///
/// Householder QR; nalgebra's SVD of the shifted subspace blocks (tall, with
/// clustered singular values) reconstructs only to ~1e-6.
fn least_squares(a: DMatrix<Complex64>, b: &DMatrix<Complex64>, what: &str) -> Result<DMatrix<Complex64>> {
    let qr = a.qr();
    let r = qr.r();
    let largest = r.diagonal().iter().map(|d| d.norm()).fold(0.0, f64::max);
    if r.diagonal().iter().any(|d| d.norm() <= 1e-14 * largest) {
        return Err(Error::InvalidParams(format!("{what} failed: rank-deficient system")));
    }
    r.solve_upper_triangular(&(qr.q().adjoint() * b))
        .ok_or_else(|| Error::InvalidParams(format!("{what} failed: singular triangular factor")))
}

/// Number of singular values of the Hankel matrix above `tol` times the largest.
pub fn numerical_rank(samples: &[Complex64], tol: f64) -> Result<usize> {
    if samples.len() < 2 {
        return Ok(0);
    }
    let (values, _) = hankel_svd(samples)?;
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(values.iter().filter(|&&s| s > tol * top).count())
}

/// Matrix-pencil fit of `y_k = Σ a_n e^{−iE_n kΔt}` with `model_order` terms.
///
/// The pencil length is half the sample count. The signal subspace comes from
/// the leading right singular vectors of the Hankel matrix; the poles are the
/// eigenvalues of the least-squares shift operator on that subspace.
pub fn matrix_pencil(samples: &[Complex64], dt: f64, model_order: usize) -> Result<Vec<PencilComponent>> {
    if model_order == 0 {
        return Err(Error::InvalidParams("model order must be at least 1".into()));
    }
    if samples.len() < 4 * model_order {
        return Err(Error::InvalidParams(format!(
            "{} samples cannot resolve {model_order} exponentials (need {})",
            samples.len(),
            4 * model_order
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("sample spacing must be positive, got {dt}")));
    }
    let (values, v) = hankel_svd(samples)?;
    let top = values[0];
    let rank = if top == 0.0 {
        0
    } else {
        values.iter().filter(|&&s| s > RANK_TOL * top).count()
    };
    if rank < model_order {
        return Err(Error::RankDeficient { rank, order: model_order });
    }

    let m = model_order;
    let l = v.nrows() - 1;
    let v1 = v.view((0, 0), (l, m)).into_owned();
    let v2 = v.view((1, 0), (l, m)).into_owned();
    let shift = least_squares(v1, &v2, "pencil reduction")?;
    // Schur form rather than the characteristic polynomial: the poles cluster
    // near the unit circle, where polynomial coefficients lose accuracy.
    let poles: Vec<Complex64> = match Schur::try_new(shift.clone(), 1e-15, 10_000) {
        Some(schur) => schur.eigenvalues().map(|v| v.iter().copied().collect()),
        None => None,
    }
    .map_or_else(
        || {
            let m = ComplexMatrix::from_entries(m, shift.transpose().iter().copied().collect())?;
            polynomial_roots(&characteristic_polynomial(&m))
        },
        Ok,
    )?;

    let mut energies = Vec::with_capacity(m);
    for z in &poles {
        let energy = I * z.ln() / dt;
        let product = energy.norm() * dt;
        if product >= PI {
            return Err(Error::Aliasing { product });
        }
        energies.push(energy);
    }

    // amplitudes by least squares on the Vandermonde system
    let n = samples.len();
    let vander = DMatrix::from_fn(n, m, |k, c| poles[c].powu(k as u32));
    let rhs = DMatrix::from_column_slice(n, 1, samples);
    let amps = least_squares(vander, &rhs, "amplitude fit")?;
    let largest = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut out: Vec<PencilComponent> = energies
        .into_iter()
        .zip(amps.iter())
        .filter(|(_, a)| a.norm() >= PRUNE_TOL * largest)
        .map(|(energy, &amplitude)| PencilComponent { energy, amplitude })
        .collect();
    let mut keys: Vec<Complex64> = out.iter().map(|c| c.energy).collect();
    sort_spectrum(&mut keys);
    out.sort_by_key(|c| keys.iter().position(|k| *k == c.energy).unwrap_or(usize::MAX));
    Ok(out)
}

/// Complex eigenenergies present in the amplitude of `component` (0-based).
pub fn extract_eigenenergies(trace: &TimeTrace, component: usize, model_order: usize) -> Result<Vec<Complex64>> {
    if !(1..=3).contains(&model_order) {
        return Err(Error::InvalidParams(format!("model order must be 1, 2 or 3, got {model_order}")));
    }
    if component >= trace.dim() {
        return Err(Error::InvalidParams(format!(
            "component {component} out of range for a {}-mode trace",
            trace.dim()
        )));
    }
    let dt = trace
        .uniform_step()
        .ok_or_else(|| Error::InvalidParams("trace samples are not uniformly spaced".into()))?;
    Ok(matrix_pencil(&trace.component(component), dt, model_order)?
        .into_iter()
        .map(|c| c.energy)
        .collect())
}

/// Beat exponents `E_n − E_m*` expected in the raw population `|c(t)|²`.
pub fn expected_beats(energies: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = energies
        .iter()
        .flat_map(|a| energies.iter().map(move |b| a - b.conj()))
        .collect();
    sort_spectrum(&mut out);
    out
}

/// Validation route on populations: fits the raw population `|c(t)|²` of
/// `component` and returns the beat exponents found (each of the form
/// `E_n − E_m*`).
pub fn population_beats(trace: &TimeTrace, component: usize) -> Result<Vec<Complex64>> {
    let dt = trace
        .uniform_step()
        .ok_or_else(|| Error::InvalidParams("trace samples are not uniformly spaced".into()))?;
    let samples: Vec<Complex64> = trace
        .states
        .iter()
        .map(|s| Complex64::new(s.amplitudes()[component].norm_sqr(), 0.0))
        .collect();
    let order = numerical_rank(&samples, RANK_TOL)?.max(1);
    Ok(matrix_pencil(&samples, dt, order)?.into_iter().map(|c| c.energy).collect())
}

/// Largest distance from each beat in `found` to the nearest expected beat.
pub fn beat_mismatch(found: &[Complex64], energies: &[Complex64]) -> f64 {
    let expected = expected_beats(energies);
    found
        .iter()
        .map(|f| expected.iter().map(|e| (f - e).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_nh_with;
    use crate::model::{build_chain_hamiltonian, ChainParams};
    use crate::spectra::{eigenvalues_closed_form, eigenvalues_two_mode};
    use crate::state::StateVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_damped_exponential() {
        let e = c(1.0, -0.1);
        let dt = 0.05;
        let samples: Vec<Complex64> = (0..64).map(|k| (-I * e * (k as f64 * dt)).exp()).collect();
        let found = matrix_pencil(&samples, dt, 1).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].energy - e).norm() < 1e-8);
        assert!((found[0].amplitude - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn three_exponentials() {
        let es = [c(2.0, -0.1), c(-1.0, -0.5), c(0.3, -1.2)];
        let amps = [c(0.5, 0.1), c(-0.2, 0.4), c(0.3, 0.0)];
        let dt = 0.1;
        let samples: Vec<Complex64> = (0..80)
            .map(|k| {
                let t = k as f64 * dt;
                es.iter().zip(&amps).map(|(e, a)| a * (-I * e * t).exp()).sum()
            })
            .collect();
        assert_eq!(numerical_rank(&samples, RANK_TOL).unwrap(), 3);
        let found = matrix_pencil(&samples, dt, 3).unwrap();
        for e in es {
            assert!(found.iter().any(|f| (f.energy - e).norm() < 1e-8 * e.norm()));
        }
        assert!(matches!(matrix_pencil(&samples, dt, 4), Err(Error::RankDeficient { rank: 3, order: 4 })));
    }

    #[test]
    fn long_decayed_record() {
        // two poles 0.19 apart, decayed to ~1e-6 by the end of the record
        let terms = [
            (c(4.6437547069201965, -0.6563496190278464), Complex64::from_polar(0.35330887124960536, 0.0)),
            (c(-3.7255547564404576, -0.5935070895272191), Complex64::from_polar(0.4853345906938384, 5.4670634705827315)),
            (c(4.452472564269131, -0.6557389636506853), Complex64::from_polar(0.2, 3.661287008955781)),
        ];
        let dt = 0.05;
        let samples: Vec<Complex64> = (0..400)
            .map(|k| terms.iter().map(|(e, a)| a * (-I * e * (k as f64 * dt)).exp()).sum())
            .collect();
        let found = matrix_pencil(&samples, dt, 3).unwrap();
        for (e, a) in terms {
            let f = found.iter().find(|f| (f.energy - e).norm() < 1e-9 * e.norm()).expect("energy recovered");
            assert!((f.amplitude - a).norm() < 1e-9);
        }
    }

    #[test]
    fn strongly_decaying_single_term() {
        let (e, a) = (c(-0.4163085342967305, -0.9912294100041715), Complex64::from_polar(0.2, 5.135862739908911));
        let dt = 0.05;
        let samples: Vec<Complex64> = (0..400).map(|k| a * (-I * e * (k as f64 * dt)).exp()).collect();
        assert_eq!(numerical_rank(&samples, RANK_TOL).unwrap(), 1);
        let found = matrix_pencil(&samples, dt, 1).unwrap();
        assert!((found[0].energy - e).norm() < 1e-10);
        assert!((found[0].amplitude - a).norm() < 1e-10);
    }

    #[test]
    fn aliasing_and_preconditions() {
        let e = c(40.0, 0.0);
        let dt = 0.1;
        let samples: Vec<Complex64> = (0..32).map(|k| (-I * e * (k as f64 * dt)).exp()).collect();
        // a real frequency beyond the Nyquist limit folds back undetected
        let found = matrix_pencil(&samples, dt, 1).unwrap();
        assert!((found[0].energy - e).norm() > 1.0);
        let e = c(0.0, -40.0);
        let samples: Vec<Complex64> = (0..32).map(|k| (-I * e * (k as f64 * dt)).exp()).collect();
        assert!(matches!(matrix_pencil(&samples, dt, 1), Err(Error::Aliasing { .. })));
        assert!(matrix_pencil(&samples[..3], dt, 1).is_err());
        assert!(matrix_pencil(&samples, dt, 0).is_err());
    }

    #[test]
    fn two_mode_trace() {
        let (l1, k) = (2.5, 5.0);
        let h = build_chain_hamiltonian(&ChainParams::two_mode(l1, k).unwrap());
        let trace = evolve_nh_with(&h, &StateVector::basis(2, 1), 1e-3, 4.0, 20).unwrap();
        let found = extract_eigenenergies(&trace, 1, 2).unwrap();
        let (p, m) = eigenvalues_two_mode(l1, k);
        for e in [p, m] {
            assert!(found.iter().any(|f| (f - e).norm() < 1e-6 * e.norm()));
        }
    }

    #[test]
    fn three_mode_trace_and_beats() {
        let (lm, k) = (std::f64::consts::TAU, 5.0);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(lm, lm, k).unwrap());
        let trace = evolve_nh_with(&h, &StateVector::basis(3, 1), 1e-3, 4.0, 20).unwrap();
        let found = extract_eigenenergies(&trace, 1, 3).unwrap();
        let exact = eigenvalues_closed_form(lm, lm, k);
        for e in exact.energies() {
            assert!(found.iter().any(|f| (f - e).norm() < 1e-6 * e.norm()));
        }
        let beats = population_beats(&trace, 1).unwrap();
        assert_eq!(beats.len(), 6);
        assert!(beat_mismatch(&beats, exact.energies()) < 1e-5);
    }
}
