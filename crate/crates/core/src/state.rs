use num_complex::Complex64;

use crate::linalg::{vec_norm, ONE, ZERO};

/// State amplitudes in the single-excitation basis, with their Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    norm: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        let norm = vec_norm(&amplitudes);
        Self { amplitudes, norm }
    }

    /// All weight on `mode` (0-based) out of `dim` modes.
    pub fn basis(dim: usize, mode: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[mode] = ONE;
        Self::new(amplitudes)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn normalized(&self) -> Self {
        if self.norm == 0.0 {
            return self.clone();
        }
        Self::new(self.amplitudes.iter().map(|z| z / self.norm).collect())
    }

    /// `|c_k|² / ‖c‖²` for every mode.
    pub fn populations(&self) -> Vec<f64> {
        let n2 = self.norm * self.norm;
        self.amplitudes.iter().map(|z| z.norm_sqr() / n2).collect()
    }

    /// Rotates the global phase so the largest-magnitude component (first one on ties)
    /// is real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let max = self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let lead = self
            .amplitudes
            .iter()
            .find(|z| z.norm() >= (1.0 - 1e-9) * max)
            .copied()
            .unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        Self::new(self.amplitudes.iter().map(|z| z * phase).collect())
    }
}
