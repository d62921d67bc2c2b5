//! Complex polynomials, characteristic polynomials and a simultaneous
//! (Aberth–Ehrlich) root finder used as the independent oracle for the
//! closed-form spectra.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Polynomial with coefficients in descending degree order.
///
/// The degree is the declared one (`coefficients.len() - 1`); a leading zero
/// is allowed so that a constant can be treated as a degree-1 polynomial when
/// assembling a Sylvester matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        assert!(!coefficients.is_empty(), "polynomial needs at least one coefficient");
        Self { coefficients }
    }

    pub fn from_real(coefficients: &[f64]) -> Self {
        Self::new(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `Π (z - r)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coefficients = vec![ONE];
        for &r in roots {
            coefficients.push(ZERO);
            for k in (1..coefficients.len()).rev() {
                let prev = coefficients[k - 1];
                coefficients[k] -= r * prev;
            }
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Declared degree, counting padded leading zeros.
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Same polynomial padded with leading zeros up to `degree`.
    pub fn padded(&self, degree: usize) -> Self {
        let mut coefficients = vec![ZERO; degree.saturating_sub(self.degree())];
        coefficients.extend_from_slice(&self.coefficients);
        Self { coefficients }
    }

    /// Leading zeros removed (the zero polynomial keeps one coefficient).
    pub fn trimmed(&self) -> Self {
        let first = self
            .coefficients
            .iter()
            .position(|c| *c != ZERO)
            .unwrap_or(self.coefficients.len() - 1);
        Self {
            coefficients: self.coefficients[first..].to_vec(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Derivative, keeping the declared degree bookkeeping (degree − 1, min 0).
    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::new(vec![ZERO]);
        }
        let coefficients = self.coefficients[..n]
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (n - k) as f64)
            .collect();
        Self { coefficients }
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_k| |z|^k`, the scale of rounding errors in `eval(z)`.
    fn eval_magnitude(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coefficients.iter().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn roots(&self) -> Result<Vec<Complex64>> {
        polynomial_roots(self)
    }
}

/// `det(H - E·1)` as a polynomial in `E`, via Faddeev–LeVerrier.
///
/// For a 2×2 matrix this is `E² - tr(H) E + det(H)`; for 3×3 the leading
/// coefficient is −1.
pub fn characteristic_polynomial(matrix: &ComplexMatrix) -> Polynomial {
    let n = matrix.dim();
    // det(E·1 - H) = E^n + c[1] E^{n-1} + ... + c[n]
    let mut c = vec![ZERO; n + 1];
    c[0] = ONE;
    let mut m = ComplexMatrix::zeros(n);
    for k in 1..=n {
        // M_k = H M_{k-1} + c_{k-1} 1
        m = matrix.matmul(&m);
        for i in 0..n {
            m[(i, i)] += c[k - 1];
        }
        c[k] = -matrix.matmul(&m).trace() / k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Polynomial::new(c.into_iter().map(|x| x * sign).collect())
}

const MAX_ABERTH_ITERATIONS: usize = 500;

/// All complex roots (with multiplicity) by Aberth–Ehrlich iteration.
///
/// Leading zero coefficients are stripped first. Roots are returned in
/// descending imaginary part, then descending real part.
pub fn polynomial_roots(poly: &Polynomial) -> Result<Vec<Complex64>> {
    let p = poly.trimmed();
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidParams(
            "root finding needs a polynomial of degree at least 1".into(),
        ));
    }
    let lead = p.coefficients()[0];
    let monic = Polynomial::new(p.coefficients().iter().map(|c| c / lead).collect());
    let dmonic = monic.derivative();

    if n == 1 {
        return Ok(vec![-monic.coefficients()[1]]);
    }

    // Initial guesses on a circle around the centroid, radius from the
    // Fujiwara bound of the shifted polynomial.
    let centroid = -monic.coefficients()[1] / n as f64;
    let radius = fujiwara_bound(&monic).max(1e-12);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            centroid + Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();

    let mut converged = vec![false; n];
    let mut iterations = 0;
    while iterations < MAX_ABERTH_ITERATIONS && converged.iter().any(|c| !c) {
        iterations += 1;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let pz = monic.eval(z[k]);
            if pz == ZERO {
                converged[k] = true;
                continue;
            }
            let dpz = dmonic.eval(z[k]);
            let ratio = pz / dpz;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| ONE / (z[k] - z[j]))
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            let step = if step.is_finite() { step } else { ratio };
            z[k] -= step;
            let floor = 4.0 * f64::EPSILON * monic.eval_magnitude(z[k]);
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300)
                || monic.eval(z[k]).norm() <= floor
            {
                converged[k] = true;
            }
        }
    }

    let max_coef = monic.max_coefficient();
    let mut worst = 0.0f64;
    for &r in &z {
        let residual = monic.eval(r).norm();
        let allowed = (1e-12 * max_coef).max(64.0 * f64::EPSILON * monic.eval_magnitude(r));
        if !(residual <= allowed) {
            worst = worst.max(if residual.is_finite() { residual } else { f64::INFINITY });
        }
    }
    if worst > 0.0 {
        return Err(Error::NoConvergence {
            iterations,
            residual: worst,
        });
    }
    sort_spectrum(&mut z);
    Ok(z)
}

fn fujiwara_bound(monic: &Polynomial) -> f64 {
    let n = monic.degree();
    let c = monic.coefficients();
    (1..=n)
        .map(|k| {
            let a = c[k].norm();
            if k == n {
                (a / 2.0).powf(1.0 / k as f64)
            } else {
                a.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0
}

/// Deterministic ordering: descending imaginary part, then descending real part.
///
/// Imaginary parts closer than a rounding-level tolerance are treated as
/// equal so that symmetric pairs `±R - iI` always come out `+R` first.
pub fn sort_spectrum(values: &mut [Complex64]) {
    let scale = values.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let tol = 1e-11 * scale;
    values.sort_by(|a, b| {
        if (a.im - b.im).abs() > tol {
            b.im.total_cmp(&a.im)
        } else {
            b.re.total_cmp(&a.re)
        }
    });
}
