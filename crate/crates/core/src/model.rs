//! Chain parameters and the single-excitation matrices built from them.
//!
//! All rates and couplings are angular frequencies in 1/μs. The basis of the
//! single-excitation subspace is (mode 1 excited, ..., mode N excited) and
//! mode 1 is the decaying mode in the three-mode setting.
//!
//! The decay rate κ = 5 is read as 5/μs (not 2π×5/μs); with λ in the same
//! units this reproduces the perturbative ratio κ/(8λ) ≈ 0.099 at λ = 2π.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};

/// Nearest-neighbour chain of `n_modes` modes with decay rates `kappas` and
/// couplings `lambdas` (`lambdas[j]` couples modes `j` and `j + 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainParams")]
pub struct ChainParams {
    n_modes: usize,
    kappas: Vec<f64>,
    lambdas: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChainParams {
    n_modes: usize,
    kappas: Vec<f64>,
    lambdas: Vec<f64>,
}

impl TryFrom<RawChainParams> for ChainParams {
    type Error = Error;

    fn try_from(raw: RawChainParams) -> Result<Self> {
        ChainParams::new(raw.n_modes, raw.kappas, raw.lambdas)
    }
}

impl ChainParams {
    pub fn new(n_modes: usize, kappas: Vec<f64>, lambdas: Vec<f64>) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidParams(format!(
                "a chain needs at least two modes, got {n_modes}"
            )));
        }
        if kappas.len() != n_modes {
            return Err(Error::DimensionMismatch {
                what: "kappas",
                expected: n_modes,
                actual: kappas.len(),
            });
        }
        if lambdas.len() != n_modes - 1 {
            return Err(Error::DimensionMismatch {
                what: "lambdas",
                expected: n_modes - 1,
                actual: lambdas.len(),
            });
        }
        if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "decay rates must be finite and non-negative, got {k}"
            )));
        }
        if let Some(l) = lambdas.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidParams(format!("coupling {l} is not finite")));
        }
        Ok(Self {
            n_modes,
            kappas,
            lambdas,
        })
    }

    /// The three-mode chain with decay `kappa` on mode 1 only.
    pub fn three_mode(lambda1: f64, lambda2: f64, kappa: f64) -> Result<Self> {
        Self::new(3, vec![kappa, 0.0, 0.0], vec![lambda1, lambda2])
    }

    /// The two-mode reduction (decaying mode 1 coupled to mode 2).
    pub fn two_mode(lambda1: f64, kappa: f64) -> Result<Self> {
        Self::new(2, vec![kappa, 0.0], vec![lambda1])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain parameters always serialize")
    }
}

/// Single-excitation matrix of the chain: `-iκ_j/2` on the diagonal and
/// `λ_j` on the first super- and sub-diagonals.
pub fn build_chain_hamiltonian(params: &ChainParams) -> ComplexMatrix {
    let n = params.n_modes();
    let mut h = ComplexMatrix::zeros(n);
    for (j, &kappa) in params.kappas().iter().enumerate() {
        h[(j, j)] = -I * (kappa / 2.0);
    }
    for (j, &lambda) in params.lambdas().iter().enumerate() {
        h[(j, j + 1)] = Complex64::new(lambda, 0.0);
        h[(j + 1, j)] = Complex64::new(lambda, 0.0);
    }
    h
}

/// Degeneracy models whose resultant winding vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ReferenceModel {
    /// `ω_x σ_x + ω_y σ_y`, a diabolical point at the origin.
    #[serde(rename = "DP2D")]
    Dp2d { omega_x: f64, omega_y: f64 },
    /// The lossless three-mode chain, a threefold diabolical point at the origin.
    #[serde(rename = "DP3D")]
    Dp3d { lambda1: f64, lambda2: f64 },
    /// Dissipative qubit with a ring of EP2s at `|J| = γ/4`.
    #[serde(rename = "EP2Qubit")]
    Ep2Qubit { j_x: f64, j_y: f64, gamma: f64 },
}

impl ReferenceModel {
    /// Same model kind evaluated at another point `(x, y)` of its parameter plane.
    pub fn at(&self, x: f64, y: f64) -> Self {
        match *self {
            ReferenceModel::Dp2d { .. } => ReferenceModel::Dp2d {
                omega_x: x,
                omega_y: y,
            },
            ReferenceModel::Dp3d { .. } => ReferenceModel::Dp3d {
                lambda1: x,
                lambda2: y,
            },
            ReferenceModel::Ep2Qubit { gamma, .. } => ReferenceModel::Ep2Qubit {
                j_x: x,
                j_y: y,
                gamma,
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ReferenceModel::Dp2d { .. } => "DP2D",
            ReferenceModel::Dp3d { .. } => "DP3D",
            ReferenceModel::Ep2Qubit { .. } => "EP2Qubit",
        }
    }
}

pub fn build_reference_model(model: &ReferenceModel) -> Result<ComplexMatrix> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match *model {
        ReferenceModel::Dp2d { omega_x, omega_y } => ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(omega_x, -omega_y)],
            vec![c(omega_x, omega_y), c(0.0, 0.0)],
        ]),
        ReferenceModel::Dp3d { lambda1, lambda2 } => ComplexMatrix::from_real_rows(&[
            vec![0.0, lambda2, 0.0],
            vec![lambda2, 0.0, lambda1],
            vec![0.0, lambda1, 0.0],
        ]),
        ReferenceModel::Ep2Qubit { j_x, j_y, gamma } => {
            if !(gamma >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "dissipation rate must be non-negative, got {gamma}"
                )));
            }
            ComplexMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(j_x, -j_y)],
                vec![c(j_x, j_y), c(0.0, -gamma / 2.0)],
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    #[test]
    fn three_mode_matrix_transcribes_the_chain() {
        let h = build_chain_hamiltonian(&ChainParams::three_mode(0.7, 1.3, 2.0).unwrap());
        let expected = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, -1.0), Complex64::new(0.7, 0.0), ZERO],
            vec![Complex64::new(0.7, 0.0), ZERO, Complex64::new(1.3, 0.0)],
            vec![ZERO, Complex64::new(1.3, 0.0), ZERO],
        ])
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn lossless_chain_is_real_symmetric() {
        let h = build_chain_hamiltonian(&ChainParams::three_mode(1.0, 1.0, 0.0).unwrap());
        assert!(h.entries().iter().all(|z| z.im == 0.0));
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn two_mode_reduction() {
        let h = build_chain_hamiltonian(&ChainParams::two_mode(0.4, 3.0).unwrap());
        assert_eq!(h.dim(), 2);
        assert_eq!(h[(0, 0)], Complex64::new(0.0, -1.5));
        assert_eq!(h[(0, 1)], Complex64::new(0.4, 0.0));
        assert_eq!(h[(1, 1)], ZERO);
    }

    #[test]
    fn trace_is_minus_i_half_total_decay() {
        let p = ChainParams::new(4, vec![1.0, 0.5, 0.0, 2.5], vec![1.0, -2.0, 0.3]).unwrap();
        let h = build_chain_hamiltonian(&p);
        assert!((h.trace() - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert!(h.is_complex_symmetric(0.0));
    }

    #[test]
    fn rejects_invalid_chains() {
        assert!(matches!(
            ChainParams::new(3, vec![1.0, 0.0], vec![1.0, 1.0]),
            Err(Error::DimensionMismatch { what: "kappas", .. })
        ));
        assert!(matches!(
            ChainParams::new(3, vec![1.0, 0.0, 0.0], vec![1.0]),
            Err(Error::DimensionMismatch { what: "lambdas", .. })
        ));
        assert!(ChainParams::new(1, vec![1.0], vec![]).is_err());
        assert!(ChainParams::new(2, vec![-1.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn chain_json_rejects_unknown_keys() {
        let ok = r#"{"n_modes": 2, "kappas": [5, 0], "lambdas": [1.5]}"#;
        let p = ChainParams::from_json(ok).unwrap();
        assert_eq!(p.lambdas(), &[1.5]);
        assert_eq!(ChainParams::from_json(&p.to_json()).unwrap(), p);

        let extra = r#"{"n_modes": 2, "kappas": [5, 0], "lambdas": [1.5], "gamma": 1}"#;
        assert!(ChainParams::from_json(extra).is_err());
        let bad = r#"{"n_modes": 3, "kappas": [5, 0], "lambdas": [1.5, 2]}"#;
        assert!(ChainParams::from_json(bad).is_err());
    }

    #[test]
    fn reference_models() {
        let sx = build_reference_model(&ReferenceModel::Dp2d {
            omega_x: 1.0,
            omega_y: 0.0,
        })
        .unwrap();
        assert_eq!(sx, ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());

        let zero = build_reference_model(&ReferenceModel::Dp3d {
            lambda1: 0.0,
            lambda2: 0.0,
        })
        .unwrap();
        assert_eq!(zero, ComplexMatrix::zeros(3));

        let ep = build_reference_model(&ReferenceModel::Ep2Qubit {
            j_x: 0.25,
            j_y: 0.0,
            gamma: 1.0,
        })
        .unwrap();
        // Eigenvalues of [[0, J], [J, -iγ/2]] coincide at -iγ/4 when J = γ/4.
        let tr = ep.trace();
        let disc = tr * tr - 4.0 * ep.determinant();
        assert!(disc.norm() < 1e-15);
        assert!((tr / 2.0 - Complex64::new(0.0, -0.25)).norm() < 1e-15);

        assert!(build_reference_model(&ReferenceModel::Ep2Qubit {
            j_x: 0.0,
            j_y: 0.0,
            gamma: -1.0
        })
        .is_err());
    }
}
