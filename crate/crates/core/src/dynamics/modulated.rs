use std::f64::consts::TAU;

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bessel_j, check_step, rk4_step, Rk4Scratch, TimeTrace, NORM_GROWTH_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};
use crate::state::StateVector;

/// Two-tone frequency modulation of the qubit coupled to a lossy readout
/// resonator (mode 1) and a bus resonator (mode 3). All values in 1/μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationConfig {
    pub g_b: f64,
    pub g_r: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// `ω_b − ω_0`
    pub delta_b: f64,
    /// `ω_r − ω_0`
    pub delta_r: f64,
    /// Readout decay, added as `−iκ/2` on mode 1.
    #[serde(default)]
    pub kappa: f64,
}

impl ModulationConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.g_b,
            self.g_r,
            self.epsilon1,
            self.epsilon2,
            self.nu1,
            self.nu2,
            self.delta_b,
            self.delta_r,
            self.kappa,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("modulation parameters must be finite".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParams(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        Ok(())
    }

    /// Modulation indices `(ε1/ν1, ε2/ν2)`.
    pub fn indices(&self) -> Result<(f64, f64)> {
        if self.nu1 == 0.0 || self.nu2 == 0.0 {
            return Err(Error::InvalidParams("modulation frequencies must be non-zero".into()));
        }
        Ok((self.epsilon1 / self.nu1, self.epsilon2 / self.nu2))
    }

    /// `(ν1 − δ_r, ν2 + δ_b)`; both vanish at the bare sideband resonances.
    pub fn resonance_mismatch(&self) -> (f64, f64) {
        (self.nu1 - self.delta_r, self.nu2 + self.delta_b)
    }

    pub fn is_resonant(&self, tol: f64) -> bool {
        let (a, b) = self.resonance_mismatch();
        a.abs() <= tol && b.abs() <= tol
    }

    pub fn max_frequency(&self) -> f64 {
        [self.nu1, self.nu2, self.delta_b, self.delta_r]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest step resolving the fastest phase: `0.02 / max(ν1, ν2, |δ_b|, |δ_r|)`.
    pub fn max_dt(&self) -> f64 {
        0.02 / self.max_frequency()
    }

    /// Single-excitation matrix of the interaction-picture Hamiltonian at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        let [h00, h01, h21] = self.entries_at(t);
        let mut h = ComplexMatrix::zeros(3);
        h[(0, 0)] = h00;
        h[(0, 1)] = h01;
        h[(1, 0)] = h01.conj();
        h[(2, 1)] = h21;
        h[(1, 2)] = h21.conj();
        h
    }

    fn entries_at(&self, t: f64) -> [Complex64; 3] {
        let (mu1, mu2) = (self.epsilon1 / self.nu1, self.epsilon2 / self.nu2);
        let phase = -(mu1 * (self.nu1 * t).sin() + mu2 * (self.nu2 * t).sin());
        let f = Complex64::from_polar(1.0, phase);
        [
            -I * (self.kappa / 2.0),
            f * Complex64::from_polar(self.g_r, self.delta_r * t),
            f * Complex64::from_polar(self.g_b, self.delta_b * t),
        ]
    }
}

/// Sideband couplings `λ1 = g_r J1(μ1) J0(μ2)` and `λ2 = g_b J0(μ1) J1(μ2)`.
pub fn effective_couplings(cfg: &ModulationConfig) -> Result<(f64, f64)> {
    let (mu1, mu2) = cfg.indices()?;
    let (j0a, j1a) = (bessel_j(0, mu1)?, bessel_j(1, mu1)?);
    let (j0b, j1b) = (bessel_j(0, mu2)?, bessel_j(1, mu2)?);
    Ok((cfg.g_r * j1a * j0b, cfg.g_b * j0a * j1b))
}

/// Location of the first maximum of `J1`.
const J1_PEAK: f64 = 1.841_183_781_340_659;

fn inverse_j1(target: f64) -> Result<f64> {
    let peak = bessel_j(1, J1_PEAK)?;
    if !(target.abs() <= peak) {
        return Err(Error::OutOfRange(format!(
            "J1 never reaches {target} below its first maximum {peak}"
        )));
    }
    let (mut lo, mut hi) = (0.0, J1_PEAK);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(1, mid)? < target.abs() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(target.signum() * 0.5 * (lo + hi))
}

/// Modulation indices `(μ1, μ2)` producing the requested couplings, found by
/// fixed-point iteration on the coupled Bessel relations.
pub fn invert_effective_couplings(g_r: f64, g_b: f64, lambda1: f64, lambda2: f64) -> Result<(f64, f64)> {
    if g_r == 0.0 || g_b == 0.0 {
        return Err(Error::InvalidParams("couplings g_r and g_b must be non-zero".into()));
    }
    let (mut mu1, mut mu2) = (0.0, 0.0);
    for _ in 0..200 {
        let next1 = inverse_j1(lambda1 / (g_r * bessel_j(0, mu2)?))?;
        let next2 = inverse_j1(lambda2 / (g_b * bessel_j(0, next1)?))?;
        let done = (next1 - mu1).abs() < 1e-15 && (next2 - mu2).abs() < 1e-15;
        mu1 = next1;
        mu2 = next2;
        if done {
            return Ok((mu1, mu2));
        }
    }
    Err(Error::NoConvergence {
        iterations: 200,
        residual: 0.0,
    })
}

/// How the modulation frequencies are matched to the sideband transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resonance {
    /// `ν1 = δ_r`, `ν2 = −δ_b`.
    Bare,
    /// Splittings of the static qubit–resonator eigenmodes, which include the
    /// dispersive shifts `≈ g²/δ`.
    Dressed,
}

/// Static device parameters in the interaction frame of the mean qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalSetup {
    pub g_b: f64,
    pub g_r: f64,
    pub kappa: f64,
    pub delta_b: f64,
    pub delta_r: f64,
}

impl ExperimentalSetup {
    /// `g_b = 2π×20`, `g_r = 2π×41`, `κ = 5`, resonators at 2π×5.58 GHz and
    /// 2π×6.66 GHz, mean qubit frequency 2π×5.98 GHz (all in 1/μs).
    pub fn reference() -> Self {
        let omega0 = TAU * 5980.0;
        Self {
            g_b: TAU * 20.0,
            g_r: TAU * 41.0,
            kappa: 5.0,
            delta_b: TAU * 5580.0 - omega0,
            delta_r: TAU * 6660.0 - omega0,
        }
    }

    /// Target couplings of the reference run, `2π×(0.21, 0.31)` per μs.
    pub fn reference_couplings() -> (f64, f64) {
        (TAU * 0.21, TAU * 0.31)
    }

    /// Frequencies of the static eigenmodes continuously connected to the
    /// bare (readout, qubit, bus) modes.
    pub fn dressed_frequencies(&self) -> [f64; 3] {
        let m = Matrix3::new(
            self.delta_r, self.g_r, 0.0, //
            self.g_r, 0.0, self.g_b, //
            0.0, self.g_b, self.delta_b,
        );
        let eig = SymmetricEigen::new(m);
        let mut out = [0.0; 3];
        let mut taken = [false; 3];
        for (mode, slot) in out.iter_mut().enumerate() {
            let best = (0..3)
                .filter(|&k| !taken[k])
                .max_by(|&a, &b| {
                    eig.eigenvectors[(mode, a)]
                        .abs()
                        .total_cmp(&eig.eigenvectors[(mode, b)].abs())
                })
                .expect("three eigenvectors");
            taken[best] = true;
            *slot = eig.eigenvalues[best];
        }
        out
    }

    /// Modulation reaching the couplings `(λ1, λ2)` at the chosen resonance.
    pub fn modulation_for(&self, lambda1: f64, lambda2: f64, resonance: Resonance) -> Result<ModulationConfig> {
        let (nu1, nu2) = match resonance {
            Resonance::Bare => (self.delta_r, -self.delta_b),
            Resonance::Dressed => {
                let [r, q, b] = self.dressed_frequencies();
                (r - q, q - b)
            }
        };
        let (mu1, mu2) = invert_effective_couplings(self.g_r, self.g_b, lambda1, lambda2)?;
        let cfg = ModulationConfig {
            g_b: self.g_b,
            g_r: self.g_r,
            epsilon1: mu1 * nu1,
            epsilon2: mu2 * nu2,
            nu1,
            nu2,
            delta_b: self.delta_b,
            delta_r: self.delta_r,
            kappa: self.kappa,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Integrates the modulated model with RK4, recording every step.
pub fn evolve_modulated(cfg: &ModulationConfig, psi0: &StateVector, dt: f64, t_final: f64) -> Result<TimeTrace> {
    evolve_modulated_with(cfg, psi0, dt, t_final, 1)
}

/// [`evolve_modulated`] recording every `stride`-th step (and the last).
pub fn evolve_modulated_with(
    cfg: &ModulationConfig,
    psi0: &StateVector,
    dt: f64,
    t_final: f64,
    stride: usize,
) -> Result<TimeTrace> {
    cfg.validate()?;
    cfg.indices()?;
    if psi0.dim() != 3 {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: 3,
            actual: psi0.dim(),
        });
    }
    let limit = cfg.max_dt();
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidParams(format!(
            "time step {dt} under-resolves the fastest phase; need dt <= {limit}"
        )));
    }
    let steps = check_step(dt, t_final)?;
    let stride = stride.max(1);

    let mut f = |t: f64, psi: &[Complex64], out: &mut [Complex64]| {
        let [h00, h01, h21] = cfg.entries_at(t);
        out[0] = -I * (h00 * psi[0] + h01 * psi[1]);
        out[1] = -I * (h01.conj() * psi[0] + h21.conj() * psi[2]);
        out[2] = -I * (h21 * psi[1]);
    };
    let mut psi = psi0.amplitudes().to_vec();
    let mut scratch = Rk4Scratch::new(3);
    let mut trace = TimeTrace::with_capacity(steps / stride + 2);
    trace.push(0.0, &psi);
    let mut norm2 = psi0.norm() * psi0.norm();
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        rk4_step(&mut f, t, dt, &mut psi, &mut scratch);
        let next = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !next.is_finite() || next > norm2 * (1.0 + NORM_GROWTH_TOL) {
            return Err(Error::Unstable {
                time: step as f64 * dt,
                norm: next,
            });
        }
        norm2 = next;
        if step % stride == 0 || step == steps {
            trace.push(step as f64 * dt, &psi);
        }
    }
    Ok(trace)
}

/// Time-averaged RMS difference of the renormalized populations, evaluated at
/// the samples of `reference` (other populations linearly interpolated).
pub fn population_rms(reference: &TimeTrace, other: &TimeTrace) -> Result<f64> {
    if reference.dim() != other.dim() {
        return Err(Error::DimensionMismatch {
            what: "trace dimension",
            expected: reference.dim(),
            actual: other.dim(),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (t, p) in reference.times.iter().zip(&reference.populations) {
        let Some(q) = other.populations_at(*t) else { continue };
        sum += p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        count += p.len();
    }
    if count == 0 {
        return Err(Error::InvalidParams("traces do not overlap in time".into()));
    }
    Ok((sum / count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(eps1: f64, eps2: f64) -> ModulationConfig {
        ModulationConfig {
            g_b: 20.0,
            g_r: 41.0,
            epsilon1: eps1,
            epsilon2: eps2,
            nu1: 700.0,
            nu2: 400.0,
            delta_b: -400.0,
            delta_r: 700.0,
            kappa: 0.0,
        }
    }

    #[test]
    fn couplings_from_bessel_functions() {
        assert_eq!(effective_couplings(&config(0.0, 0.0)).unwrap(), (0.0, 0.0));
        let cfg = ModulationConfig { epsilon1: 0.5 * 700.0, ..config(0.0, 0.0) };
        let (l1, l2) = effective_couplings(&cfg).unwrap();
        assert!((l1 - 41.0 * 0.2422684576748739).abs() < 1e-12);
        assert_eq!(l2, 0.0);
        assert!(effective_couplings(&ModulationConfig { nu2: 0.0, ..cfg }).is_err());
    }

    #[test]
    fn inversion_round_trips() {
        let (mu1, mu2) = invert_effective_couplings(41.0, 20.0, 3.0, 2.0).unwrap();
        let cfg = ModulationConfig { epsilon1: mu1 * 700.0, epsilon2: mu2 * 400.0, ..config(0.0, 0.0) };
        let (l1, l2) = effective_couplings(&cfg).unwrap();
        assert!((l1 - 3.0).abs() < 1e-12 && (l2 - 2.0).abs() < 1e-12);
        assert!(invert_effective_couplings(41.0, 20.0, 41.0, 2.0).is_err());
    }

    #[test]
    fn dressed_frequencies_include_dispersive_shifts() {
        let s = ExperimentalSetup::reference();
        let [r, q, b] = s.dressed_frequencies();
        assert!(r > s.delta_r && b < s.delta_b);
        // second-order shifts
        let expected_q = -s.g_r * s.g_r / s.delta_r - s.g_b * s.g_b / s.delta_b;
        assert!((q - expected_q).abs() < 0.05 * expected_q.abs());
        let cfg = s.modulation_for(1.0, 1.0, Resonance::Bare).unwrap();
        assert!(cfg.is_resonant(0.0));
        let cfg = s.modulation_for(1.0, 1.0, Resonance::Dressed).unwrap();
        assert!(!cfg.is_resonant(1.0));
    }

    #[test]
    fn hamiltonian_is_hermitian_without_loss() {
        let cfg = config(30.0, 10.0);
        for t in [0.0, 0.013, 0.5] {
            assert!(cfg.hamiltonian_at(t).is_hermitian(1e-12));
        }
    }

    #[test]
    fn detuned_qubit_stays_put() {
        let cfg = config(0.0, 0.0);
        let dt = cfg.max_dt();
        let trace = evolve_modulated_with(&cfg, &StateVector::basis(3, 1), dt, 0.5, 50).unwrap();
        let bound = 8.0 * (41.0f64 / 700.0).powi(2).max((20.0f64 / 400.0).powi(2));
        for p in &trace.populations {
            assert!(1.0 - p[1] < bound);
        }
        assert!(evolve_modulated(&cfg, &StateVector::basis(3, 1), 2.0 * dt, 0.1).is_err());
    }
}
