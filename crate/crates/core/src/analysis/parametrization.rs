use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// Default classification tolerance for the near-imaginary energy, relative to κ.
pub const DEFAULT_RE_TOL: f64 = 0.02;

/// Spectrum of the form `{−i·i1, r − i·i2, −r − i·i2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParametrization {
    pub r: f64,
    pub i1: f64,
    pub i2: f64,
    /// Largest distance between the fitted and the reconstructed energies.
    pub residual: f64,
}

impl SymmetricParametrization {
    pub fn reconstruct(&self) -> [Complex64; 3] {
        [
            Complex64::new(0.0, -self.i1),
            Complex64::new(self.r, -self.i2),
            Complex64::new(-self.r, -self.i2),
        ]
    }

    /// `|i1 − i2|`
    pub fn delta(&self) -> f64 {
        (self.i1 - self.i2).abs()
    }
}

pub fn fit_symmetric_parametrization(energies: &[Complex64], re_tol: f64) -> Result<SymmetricParametrization> {
    if energies.len() != 3 {
        return Err(Error::DimensionMismatch {
            what: "energies",
            expected: 3,
            actual: energies.len(),
        });
    }
    let near: Vec<usize> = (0..3).filter(|&k| energies[k].re.abs() < re_tol).collect();
    if near.len() != 1 {
        return Err(Error::NotSymmetric(format!(
            "{} energies have |Re E| < {re_tol}; expected exactly one",
            near.len()
        )));
    }
    let lone = energies[near[0]];
    let pair: Vec<Complex64> = (0..3).filter(|&k| k != near[0]).map(|k| energies[k]).collect();
    if pair[0].re.signum() == pair[1].re.signum() {
        return Err(Error::NotSymmetric("the remaining pair has real parts of equal sign".into()));
    }
    let fit = SymmetricParametrization {
        r: (pair[0].re.abs() + pair[1].re.abs()) / 2.0,
        i1: -lone.im,
        i2: -(pair[0].im + pair[1].im) / 2.0,
        residual: 0.0,
    };
    let rec = fit.reconstruct();
    let matched = [lone, if pair[0].re > 0.0 { pair[0] } else { pair[1] }, if pair[0].re > 0.0 { pair[1] } else { pair[0] }];
    let residual = rec
        .iter()
        .zip(&matched)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(SymmetricParametrization { residual, ..fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRatios {
    /// `θ` with `tan θ = λ1/λ2`.
    pub theta: f64,
    pub lambda: f64,
    /// `|H^ndg_{1,2}| / |H^0_{1,1} − H^0_{2,2}|`
    pub ratio12: f64,
    /// `|H^ndg_{2,3}| / |H^0_{2,2} − H^0_{3,3}|`
    pub ratio23: f64,
    /// `κ/(8λ)`
    pub reference: f64,
}

/// Size of the off-diagonal couplings relative to the level gaps, in the
/// eigenbasis of the lossless chain.
pub fn perturbation_ratios(lambda1: f64, lambda2: f64, kappa: f64) -> Result<PerturbationRatios> {
    let lambda = lambda1.hypot(lambda2);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams("perturbation ratios need lambda > 0".into()));
    }
    let theta = lambda1.atan2(lambda2);
    let (s, c) = theta.sin_cos();
    let off12 = kappa * (2.0 * theta).sin().abs() / (4.0 * 2f64.sqrt());
    let gap12 = Complex64::new(-lambda, kappa / 4.0 * s * s - kappa / 2.0 * c * c).norm();
    let off23 = kappa * s * s / 4.0;
    Ok(PerturbationRatios {
        theta,
        lambda,
        ratio12: off12 / gap12,
        ratio23: off23 / (2.0 * lambda),
        reference: kappa / (8.0 * lambda),
    })
}

/// One row of extracted eigenenergies and their symmetric fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub energies: Vec<Complex64>,
    pub fit: Option<SymmetricParametrization>,
}

pub const EXTRACTION_CSV_HEADER: &str = "lambda1,lambda2,re_E1,im_E1,re_E2,im_E2,re_E3,im_E3,R,I1,I2,residual";

pub fn write_extraction_csv<W: Write>(out: &mut W, rows: &[ExtractionRow]) -> io::Result<()> {
    writeln!(out, "{EXTRACTION_CSV_HEADER}")?;
    for row in rows {
        let mut fields = vec![fmt_f64(row.lambda1), fmt_f64(row.lambda2)];
        for k in 0..3 {
            match row.energies.get(k) {
                Some(e) => {
                    fields.push(fmt_f64(e.re));
                    fields.push(fmt_f64(e.im));
                }
                None => fields.extend([String::new(), String::new()]),
            }
        }
        match &row.fit {
            Some(f) => fields.extend([fmt_f64(f.r), fmt_f64(f.i1), fmt_f64(f.i2), fmt_f64(f.residual)]),
            None => fields.extend(std::iter::repeat_n(String::new(), 4)),
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
