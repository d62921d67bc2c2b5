use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::poly::{characteristic_polynomial, polynomial_roots};
use crate::state::StateVector;

/// Agreement required between the closed form `2|c_i||c_j|` and the
/// general two-qubit value.
pub const CONCURRENCE_AGREEMENT_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidDensityMatrix(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let rho = Self { dim, entries };
        rho.validate()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let n = psi.len();
        let entries = (0..n * n).map(|k| psi[k / n] * psi[k % n].conj()).collect();
        Self::new(n, entries)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        if self.entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        for i in 0..n {
            for j in 0..=i {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > 1e-12 {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {d:e}"
                    )));
                }
            }
        }
        let trace: f64 = (0..n).map(|i| self.get(i, i).re).sum();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}, not 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.to_nalgebra()).eigenvalues.iter().copied().collect()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_entries(self.dim, self.entries.clone()).expect("square by construction")
    }
}

/// `σ_y ⊗ σ_y` in the basis |00⟩, |01⟩, |10⟩, |11⟩.
fn spin_flip() -> DMatrix<Complex64> {
    let mut s = DMatrix::from_element(4, 4, ZERO);
    s[(0, 3)] = Complex64::new(-1.0, 0.0);
    s[(1, 2)] = Complex64::new(1.0, 0.0);
    s[(2, 1)] = Complex64::new(1.0, 0.0);
    s[(3, 0)] = Complex64::new(-1.0, 0.0);
    s
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDensityMatrix(format!(
            "concurrence needs a 4x4 two-qubit state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Wootters concurrence `max(0, λ1 − λ2 − λ3 − λ4)`.
///
/// The `λ_k` (square roots of the eigenvalues of `ρ(σy⊗σy)ρ*(σy⊗σy)`) are
/// obtained as the singular values of `τ = Vᵀ(σy⊗σy)V` for a decomposition
/// `ρ = VV†`, which avoids the square-root loss of accuracy at the zero
/// eigenvalues of the product matrix.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let eig = SymmetricEigen::new(rho.to_nalgebra());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    let cutoff = 64.0 * f64::EPSILON * max;
    let keep: Vec<usize> = (0..4).filter(|&k| eig.eigenvalues[k] > cutoff).collect();
    let mut v = DMatrix::from_element(4, keep.len(), ZERO);
    for (col, &k) in keep.iter().enumerate() {
        let w = eig.eigenvalues[k].sqrt();
        for row in 0..4 {
            v[(row, col)] = eig.eigenvectors[(row, k)] * w;
        }
    }
    let tau = v.transpose() * spin_flip() * &v;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.resize(4, 0.0);
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).max(0.0))
}

/// Descending `λ_k`, from the roots of the characteristic polynomial of
/// `ρ(σy⊗σy)ρ*(σy⊗σy)`. Less accurate than [`wootters_concurrence`] near
/// rank-deficient states; kept as an independent check.
pub fn spin_flip_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    check_two_qubit(rho)?;
    let r = rho.to_nalgebra();
    let s = spin_flip();
    let product = &r * &s * r.conjugate() * &s;
    let m = ComplexMatrix::from_entries(4, product.transpose().iter().copied().collect())?;
    let roots = polynomial_roots(&characteristic_polynomial(&m))?;
    let mut out: Vec<f64> = roots.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

fn check_pair(psi: &StateVector, pair: (usize, usize)) -> Result<()> {
    let n = psi.dim();
    let (i, j) = pair;
    if i == j || i >= n || j >= n {
        return Err(Error::InvalidParams(format!(
            "mode pair ({i}, {j}) invalid for a {n}-mode state"
        )));
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: psi.norm() });
    }
    Ok(())
}

/// Reduced state of modes `i` and `j` (0-based) of a single-excitation pure
/// state, in the basis |n_i n_j⟩ = |00⟩, |01⟩, |10⟩, |11⟩.
pub fn reduced_two_mode_state(psi: &StateVector, pair: (usize, usize)) -> Result<DensityMatrix> {
    check_pair(psi, pair)?;
    let c = psi.amplitudes();
    let (ci, cj) = (c[pair.0], c[pair.1]);
    let rest = (1.0 - ci.norm_sqr() - cj.norm_sqr()).max(0.0);
    let phi = [ZERO, cj, ci, ZERO];
    let mut entries = vec![ZERO; 16];
    for a in 0..4 {
        for b in 0..4 {
            entries[4 * a + b] = phi[a] * phi[b].conj();
        }
    }
    entries[0] += Complex64::new(rest, 0.0);
    DensityMatrix::new(4, entries)
}

/// Concurrence between modes `i` and `j` (0-based) of a single-excitation
/// pure state: `2|c_i||c_j|`, checked against [`wootters_concurrence`] of the
/// reduced state.
pub fn pairwise_concurrence(psi: &StateVector, pair: (usize, usize)) -> Result<f64> {
    check_pair(psi, pair)?;
    let c = psi.amplitudes();
    let closed = 2.0 * c[pair.0].norm() * c[pair.1].norm();
    let general = wootters_concurrence(&reduced_two_mode_state(psi, pair)?)?;
    if (closed - general).abs() > CONCURRENCE_AGREEMENT_TOL {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: (closed - general).abs(),
        });
    }
    Ok(closed)
}
