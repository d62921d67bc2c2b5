//! No-jump evolution `i dψ/dt = Hψ` under the chain matrix, the modulated
//! interaction-picture model it approximates, and helpers built on traces.

mod bessel;
mod modulated;
mod stabilization;

use std::io::{self, Write};

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{ComplexMatrix, I};
use crate::state::StateVector;

pub use bessel::{bessel_j, MAX_ARGUMENT, MAX_ORDER};
pub use modulated::{
    effective_couplings, evolve_modulated, evolve_modulated_with, invert_effective_couplings, population_rms,
    ExperimentalSetup, ModulationConfig, Resonance,
};
pub use stabilization::{stabilization_metrics, StabilizationReport, FIDELITY_THRESHOLD};

/// Default step for effective (static) dynamics, μs.
pub const DEFAULT_DT: f64 = 1e-3;

/// Relative per-step norm growth tolerated for a dissipative matrix.
pub const NORM_GROWTH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `‖ψ‖²`, the no-jump success probability.
    pub norms: Vec<f64>,
    /// Renormalized populations `|c_k|²/‖ψ‖²`.
    pub populations: Vec<Vec<f64>>,
}

impl TimeTrace {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            norms: Vec::with_capacity(n),
            populations: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, psi: &[Complex64]) {
        let state = StateVector::new(psi.to_vec());
        self.times.push(t);
        self.norms.push(state.norm() * state.norm());
        self.populations.push(state.populations());
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, StateVector::dim)
    }

    /// Amplitude of `mode` (0-based) at every sample.
    pub fn component(&self, mode: usize) -> Vec<Complex64> {
        self.states.iter().map(|s| s.amplitudes()[mode]).collect()
    }

    /// Uniform sample spacing, if the times are uniformly spaced.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt);
        uniform.then_some(dt)
    }

    /// Keeps every `stride`-th sample (always including the first).
    pub fn decimated(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let mut out = Self::with_capacity(self.len() / stride + 1);
        for k in (0..self.len()).step_by(stride) {
            out.times.push(self.times[k]);
            out.states.push(self.states[k].clone());
            out.norms.push(self.norms[k]);
            out.populations.push(self.populations[k].clone());
        }
        out
    }

    /// Renormalized populations at time `t`, linearly interpolated.
    pub fn populations_at(&self, t: f64) -> Option<Vec<f64>> {
        let first = *self.times.first()?;
        let last = *self.times.last()?;
        if t < first || t > last {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return Some(self.populations[0].clone());
        }
        if k == self.len() {
            return Some(self.populations[k - 1].clone());
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(
            self.populations[k - 1]
                .iter()
                .zip(&self.populations[k])
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    pub fn csv_header(&self) -> String {
        let n = self.dim();
        let mut cols = vec!["t".to_string()];
        for k in 1..=n {
            cols.push(format!("re_c{k}"));
            cols.push(format!("im_c{k}"));
        }
        cols.push("norm2".into());
        for k in 1..=n {
            cols.push(format!("p{k}"));
        }
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, stride: usize) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for k in (0..self.len()).step_by(stride.max(1)) {
            let mut fields = vec![fmt_f64(self.times[k])];
            for c in self.states[k].amplitudes() {
                fields.push(fmt_f64(c.re));
                fields.push(fmt_f64(c.im));
            }
            fields.push(fmt_f64(self.norms[k]));
            fields.extend(self.populations[k].iter().map(|&p| fmt_f64(p)));
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn check_step(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!("time step must be positive, got {dt}")));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!("final time must be positive, got {t_final}")));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(1.0);
    if steps > 1e9 {
        return Err(Error::InvalidParams(format!("{steps} steps requested; increase dt")));
    }
    Ok(steps as usize)
}

/// One classical RK4 step of `dψ/dt = f(t, ψ)`.
pub(crate) fn rk4_step(
    f: &mut impl FnMut(f64, &[Complex64], &mut [Complex64]),
    t: f64,
    dt: f64,
    psi: &mut [Complex64],
    scratch: &mut Rk4Scratch,
) {
    let n = psi.len();
    let Rk4Scratch { k1, k2, k3, k4, tmp } = scratch;
    f(t, psi, k1);
    for i in 0..n {
        tmp[i] = psi[i] + k1[i] * (dt / 2.0);
    }
    f(t + dt / 2.0, tmp, k2);
    for i in 0..n {
        tmp[i] = psi[i] + k2[i] * (dt / 2.0);
    }
    f(t + dt / 2.0, tmp, k3);
    for i in 0..n {
        tmp[i] = psi[i] + k3[i] * dt;
    }
    f(t + dt, tmp, k4);
    for i in 0..n {
        psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
    }
}

pub(crate) struct Rk4Scratch {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Scratch {
    pub(crate) fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

/// True when the anti-Hermitian part `(H − H†)/2i` is negative semidefinite,
/// so exact evolution can only lose norm.
pub fn is_dissipative(matrix: &ComplexMatrix) -> bool {
    let loss = matrix.add(&matrix.adjoint().scale(Complex64::new(-1.0, 0.0))).scale(-I / 2.0);
    let eig = SymmetricEigen::new(loss.to_nalgebra());
    let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
    eig.eigenvalues.iter().all(|&v| v <= 1e-12 * scale)
}

/// Integrates `i dψ/dt = Hψ` with fixed-step RK4, recording every step.
pub fn evolve_nh(matrix: &ComplexMatrix, psi0: &StateVector, dt: f64, t_final: f64) -> Result<TimeTrace> {
    evolve_nh_with(matrix, psi0, dt, t_final, 1)
}

/// [`evolve_nh`] recording every `stride`-th step (the final step is always kept).
pub fn evolve_nh_with(
    matrix: &ComplexMatrix,
    psi0: &StateVector,
    dt: f64,
    t_final: f64,
    stride: usize,
) -> Result<TimeTrace> {
    let n = matrix.dim();
    if psi0.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: n,
            actual: psi0.dim(),
        });
    }
    let steps = check_step(dt, t_final)?;
    let stride = stride.max(1);
    let dissipative = is_dissipative(matrix);
    let generator = matrix.scale(-I);
    let mut f = |_t: f64, psi: &[Complex64], out: &mut [Complex64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = generator.row(i).iter().zip(psi).map(|(a, b)| a * b).sum();
        }
    };

    let mut psi = psi0.amplitudes().to_vec();
    let mut scratch = Rk4Scratch::new(n);
    let mut trace = TimeTrace::with_capacity(steps / stride + 2);
    trace.push(0.0, &psi);
    let mut norm2 = psi0.norm() * psi0.norm();
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        rk4_step(&mut f, t, dt, &mut psi, &mut scratch);
        let next = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !next.is_finite() || (dissipative && next > norm2 * (1.0 + NORM_GROWTH_TOL)) {
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
