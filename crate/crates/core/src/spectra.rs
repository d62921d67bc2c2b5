//! Complex eigenenergies of the three-mode chain: the Cardano-type closed
//! form, the two-mode reduction, eigenvectors, degeneracy classification and
//! spectral-gap maps over the (λ1, λ2) plane.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, null_space, vec_norm, ComplexMatrix, I, ZERO};
use crate::model::{build_chain_hamiltonian, ChainParams};
use crate::poly::sort_spectrum;
use crate::state::StateVector;
use crate::topology::resultant_vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumOrdering {
    ByRealPart,
    ByImaginaryPart,
    Unordered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    energies: Vec<Complex64>,
    ordering: SpectrumOrdering,
}

impl ComplexSpectrum {
    /// Sorts by descending imaginary part, then descending real part.
    pub fn new(mut energies: Vec<Complex64>) -> Self {
        sort_spectrum(&mut energies);
        Self {
            energies,
            ordering: SpectrumOrdering::ByImaginaryPart,
        }
    }

    pub fn unordered(energies: Vec<Complex64>) -> Self {
        Self {
            energies,
            ordering: SpectrumOrdering::Unordered,
        }
    }

    pub fn energies(&self) -> &[Complex64] {
        &self.energies
    }

    pub fn ordering(&self) -> SpectrumOrdering {
        self.ordering
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.energies.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.energies.iter().product()
    }

    fn pairs(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let e = &self.energies;
        (0..e.len()).flat_map(move |i| (0..i).map(move |j| (e[i], e[j])))
    }

    pub fn min_gap(&self) -> f64 {
        self.pairs().map(|(a, b)| (a - b).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        self.pairs().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_re_gap(&self) -> f64 {
        self.pairs().map(|(a, b)| (a.re - b.re).abs()).fold(0.0, f64::max)
    }

    pub fn max_im_gap(&self) -> f64 {
        self.pairs().map(|(a, b)| (a.im - b.im).abs()).fold(0.0, f64::max)
    }
}

/// `det(H - E)` of the three-mode chain: `-E³ - (iκ/2)E² + (λ1²+λ2²)E + iκλ2²/2`.
fn chain_cubic(lambda1: f64, lambda2: f64, kappa: f64, e: Complex64) -> Complex64 {
    let l2 = lambda1 * lambda1 + lambda2 * lambda2;
    ((-e - I * (kappa / 2.0)) * e + l2) * e + I * (kappa * lambda2 * lambda2 / 2.0)
}

/// Eigenenergies of the three-mode chain from the closed-form cubic roots.
///
/// With `ξ = 3λ1² + 3λ2² − κ²/4`, `η = −(iκ/4)(18λ2² − 9λ1² + κ²/2)` and
/// `α³ = η ± √(η² − ξ³)`, the roots are `−iκ/6 − (ξ/α + α)/3` over the three
/// cube roots `α`. The square-root sign is chosen to keep `|α³|` large and the
/// cube-root branch minimizing the polynomial residual is kept.
pub fn eigenvalues_closed_form(lambda1: f64, lambda2: f64, kappa: f64) -> ComplexSpectrum {
    let shift = -I * (kappa / 6.0);
    let xi = Complex64::new(
        3.0 * lambda1 * lambda1 + 3.0 * lambda2 * lambda2 - kappa * kappa / 4.0,
        0.0,
    );
    let eta = -I * (kappa / 4.0)
        * (18.0 * lambda2 * lambda2 - 9.0 * lambda1 * lambda1 + kappa * kappa / 2.0);
    let root = (eta * eta - xi * xi * xi).sqrt();
    let (plus, minus) = (eta + root, eta - root);
    let cube = if plus.norm() >= minus.norm() { plus } else { minus };
    if cube == ZERO {
        // ξ = η = 0: threefold root.
        return ComplexSpectrum::new(vec![shift; 3]);
    }

    let alpha0 = cube.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3);
    let mut best: Option<(f64, [Complex64; 3])> = None;
    for branch in 0..3 {
        let alpha = alpha0 * omega.powu(branch);
        let roots = [0u32, 1, 2].map(|m| {
            let a = alpha * omega.powu(m);
            shift - (xi / a + a) / 3.0
        });
        let residual = roots
            .iter()
            .map(|&e| chain_cubic(lambda1, lambda2, kappa, e).norm())
            .fold(0.0, f64::max);
        if best.is_none_or(|(r, _)| residual < r) {
            best = Some((residual, roots));
        }
    }
    let (_, roots) = best.expect("three branches evaluated");
    ComplexSpectrum::new(roots.to_vec())
}

/// `E'± = −iκ/4 ± √(λ1² − κ²/16)`; a negative radicand gives a positive-imaginary root.
pub fn eigenvalues_two_mode(lambda1: f64, kappa: f64) -> (Complex64, Complex64) {
    let radicand = lambda1 * lambda1 - kappa * kappa / 16.0;
    let root = if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-radicand).sqrt())
    };
    let center = -I * (kappa / 4.0);
    (center + root, center - root)
}

/// Relative residual above which an energy is rejected by [`eigenvector_for`].
pub const EIGENVECTOR_RESIDUAL_TOL: f64 = 1e-6;

/// Right eigenvector together with the exceptional-point advisory.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvector {
    pub state: StateVector,
    /// The left and right eigenvectors are (numerically) orthogonal, i.e. the
    /// eigenvalue is defective.
    pub defective: bool,
    /// Dimension of the numerical null space of `H − E`.
    pub geometric_multiplicity: usize,
}

/// Unit-norm null vector of `H − E` by complete-pivoting elimination, with the
/// largest component made real and positive.
pub fn eigenvector_for(matrix: &ComplexMatrix, energy: Complex64) -> Result<Eigenvector> {
    let shifted = matrix.shifted(energy);
    let scale = matrix.frobenius_norm().max(energy.norm());
    if scale == 0.0 {
        let mut amps = vec![ZERO; matrix.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        return Ok(Eigenvector {
            state: StateVector::new(amps),
            defective: false,
            geometric_multiplicity: matrix.dim(),
        });
    }
    let right = null_space(&shifted);
    let residual = vec_norm(&shifted.mul_vec(&right.vector));
    if !(residual <= EIGENVECTOR_RESIDUAL_TOL * scale) {
        return Err(Error::NotAnEigenvalue { energy, residual });
    }
    let geometric_multiplicity = right.nullity(1e-8 * scale).max(1);

    // Left eigenvector w with wᵀ(H − E) = 0; a vanishing bilinear overlap wᵀv
    // marks a defective eigenvalue.
    let left = null_space(&shifted.transpose());
    let overlap: Complex64 = left.vector.iter().zip(&right.vector).map(|(w, v)| w * v).sum();
    let defective = geometric_multiplicity == 1 && overlap.norm() < 1e-6;

    Ok(Eigenvector {
        state: StateVector::new(right.vector).with_canonical_phase(),
        defective,
        geometric_multiplicity,
    })
}

/// Eigenvectors of the three-mode chain for every closed-form energy.
pub fn chain_eigenvectors(
    lambda1: f64,
    lambda2: f64,
    kappa: f64,
) -> Result<(ComplexSpectrum, Vec<Eigenvector>)> {
    let spectrum = eigenvalues_closed_form(lambda1, lambda2, kappa);
    let h = build_chain_hamiltonian(&ChainParams::three_mode(lambda1, lambda2, kappa)?);
    let vectors = spectrum
        .energies()
        .iter()
        .map(|&e| eigenvector_for(&h, e))
        .collect::<Result<Vec<_>>>()?;
    Ok((spectrum, vectors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    Regular,
    EP2,
    EP3,
    DP,
}

impl PointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointKind::Regular => "regular",
            PointKind::EP2 => "EP2",
            PointKind::EP3 => "EP3",
            PointKind::DP => "DP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpClassification {
    pub kind: PointKind,
    pub degenerate_energy: Option<Complex64>,
    pub min_gap: f64,
}

/// Default degeneracy tolerance, relative to κ.
pub const DEFAULT_GAP_TOL: f64 = 1e-6;

/// Classifies a point of the (λ1, λ2) plane by its closest eigenvalue pairs.
///
/// A degeneracy is a DP when the chain is lossless or when `H − E` has a
/// two-dimensional null space (the degenerate eigenvectors stay independent);
/// otherwise it is exceptional.
pub fn classify_point(lambda1: f64, lambda2: f64, kappa: f64, gap_tol: f64) -> Result<EpClassification> {
    if !(gap_tol > 0.0) {
        return Err(Error::InvalidParams(format!("gap tolerance must be positive, got {gap_tol}")));
    }
    let spectrum = eigenvalues_closed_form(lambda1, lambda2, kappa);
    let e = spectrum.energies();
    let min_gap = spectrum.min_gap();
    let close: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .filter(|&(a, b)| (e[a] - e[b]).norm() < gap_tol)
        .collect();

    let (kind, degenerate_energy) = match close.len() {
        0 => (PointKind::Regular, None),
        1 | 2 => {
            let (a, b) = close[0];
            (PointKind::EP2, Some((e[a] + e[b]) / 2.0))
        }
        _ => (PointKind::EP3, Some(spectrum.sum() / 3.0)),
    };
    let kind = match (kind, degenerate_energy) {
        (PointKind::Regular, _) | (_, None) => kind,
        (_, Some(energy)) => {
            if kappa == 0.0 {
                PointKind::DP
            } else {
                let h = build_chain_hamiltonian(&ChainParams::three_mode(lambda1, lambda2, kappa)?);
                let scale = h.frobenius_norm().max(energy.norm());
                let ns = null_space(&h.shifted(energy));
                if ns.nullity(1e-8 * scale) >= 2 {
                    PointKind::DP
                } else {
                    kind
                }
            }
        }
    };
    Ok(EpClassification {
        kind,
        degenerate_energy,
        min_gap,
    })
}

/// Analytic EP3 coordinates `(√2κ/(3√3), κ/(6√3))` in the first quadrant.
pub fn ep3_seed(kappa: f64) -> (f64, f64) {
    let s3 = 3f64.sqrt();
    (2f64.sqrt() * kappa / (3.0 * s3), kappa / (6.0 * s3))
}

fn max_gap_at(p: (f64, f64), kappa: f64) -> f64 {
    eigenvalues_closed_form(p.0, p.1, kappa).max_gap()
}

/// The four EP3s `(±λ1ᶜ, ±λ2ᶜ)`.
///
/// The first-quadrant seed is refined by a compass search on the maximum
/// pairwise gap, continued down to the floating-point lattice around the seed;
/// the spectrum depends on λ1² and λ2² only, so the other quadrants are mirrors.
/// Points are returned as `(+,+), (+,−), (−,+), (−,−)`.
pub fn locate_ep3(kappa: f64) -> Result<[(f64, f64); 4]> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParams(format!("EP3s need kappa > 0, got {kappa}")));
    }
    let seed = ep3_seed(kappa);
    let mut best = seed;
    let mut best_gap = max_gap_at(seed, kappa);

    let mut step = 1e-3 * kappa;
    while step > 1e-18 * kappa {
        let mut moved = false;
        for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let trial = (best.0 + dx, best.1 + dy);
            let gap = max_gap_at(trial, kappa);
            if gap < best_gap {
                best = trial;
                best_gap = gap;
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }

    const LATTICE: i32 = 16;
    let center = best;
    let (u1, u2) = (ulp(center.0), ulp(center.1));
    for i in -LATTICE..=LATTICE {
        for j in -LATTICE..=LATTICE {
            let trial = (center.0 + i as f64 * u1, center.1 + j as f64 * u2);
            let gap = max_gap_at(trial, kappa);
            if gap < best_gap {
                best = trial;
                best_gap = gap;
            }
        }
    }

    let drift = ((best.0 - seed.0).powi(2) + (best.1 - seed.1).powi(2)).sqrt();
    if drift > 1e-3 * kappa {
        return Err(Error::RefinementDiverged { drift });
    }
    let (a, b) = best;
    Ok([(a, b), (a, -b), (-a, b), (-a, -b)])
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

/// Rectangular grid over the (λ1, λ2) plane, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lambda1_min: f64,
    pub lambda1_max: f64,
    pub n_lambda1: usize,
    pub lambda2_min: f64,
    pub lambda2_max: f64,
    pub n_lambda2: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda1_min, self.lambda1_max, self.lambda2_min, self.lambda2_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("grid bounds must be finite".into()));
        }
        if !(self.lambda1_max > self.lambda1_min && self.lambda2_max > self.lambda2_min) {
            return Err(Error::InvalidParams("grid extent must be positive on both axes".into()));
        }
        if self.n_lambda1 < 2 || self.n_lambda2 < 2 {
            return Err(Error::InvalidParams("grids need at least two points per axis".into()));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, n: usize, k: usize) -> f64 {
        if k + 1 == n {
            max
        } else {
            min + (max - min) * k as f64 / (n - 1) as f64
        }
    }

    pub fn lambda1(&self, k: usize) -> f64 {
        Self::axis(self.lambda1_min, self.lambda1_max, self.n_lambda1, k)
    }

    pub fn lambda2(&self, k: usize) -> f64 {
        Self::axis(self.lambda2_min, self.lambda2_max, self.n_lambda2, k)
    }

    pub fn len(&self) -> usize {
        self.n_lambda1 * self.n_lambda2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in row-major order: λ1 is the outer (row) index.
    pub fn point(&self, index: usize) -> (f64, f64) {
        (self.lambda1(index / self.n_lambda2), self.lambda2(index % self.n_lambda2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRecord {
    pub lambda1: f64,
    pub lambda2: f64,
    pub max_re_gap: f64,
    pub max_im_gap: f64,
    pub min_gap: f64,
    /// All real parts vanish (Fermi-arc region).
    pub isofrequency: bool,
    /// All imaginary parts coincide.
    pub ifermi: bool,
}

pub const MAP_CSV_HEADER: &str = "lambda1,lambda2,max_re_gap,max_im_gap,min_gap,isofrequency,ifermi";

/// Default flag tolerance relative to `max(κ, |λ1|, |λ2|)`.
pub const DEFAULT_FLAG_TOL: f64 = 1e-8;

pub fn map_record(lambda1: f64, lambda2: f64, kappa: f64, flag_tol: f64) -> MapRecord {
    let spectrum = eigenvalues_closed_form(lambda1, lambda2, kappa);
    let scale = kappa.max(lambda1.abs()).max(lambda2.abs()).max(f64::MIN_POSITIVE);
    let tol = flag_tol * scale;
    MapRecord {
        lambda1,
        lambda2,
        max_re_gap: spectrum.max_re_gap(),
        max_im_gap: spectrum.max_im_gap(),
        min_gap: spectrum.min_gap(),
        isofrequency: spectrum.energies().iter().all(|e| e.re.abs() < tol),
        ifermi: spectrum.max_im_gap() < tol,
    }
}

/// Gap maxima and arc flags at every grid point, row-major (λ1 outer).
pub fn scan_spectral_map(kappa: f64, grid: &GridSpec) -> Result<Vec<MapRecord>> {
    scan_spectral_map_with_tol(kappa, grid, DEFAULT_FLAG_TOL)
}

pub fn scan_spectral_map_with_tol(kappa: f64, grid: &GridSpec, flag_tol: f64) -> Result<Vec<MapRecord>> {
    grid.validate()?;
    Ok((0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (l1, l2) = grid.point(idx);
            map_record(l1, l2, kappa, flag_tol)
        })
        .collect())
}

pub fn write_map_csv<W: Write>(out: &mut W, records: &[MapRecord]) -> io::Result<()> {
    use crate::format::fmt_f64;
    writeln!(out, "{MAP_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.lambda1),
            fmt_f64(r.lambda2),
            fmt_f64(r.max_re_gap),
            fmt_f64(r.max_im_gap),
            fmt_f64(r.min_gap),
            u8::from(r.isofrequency),
            u8::from(r.ifermi)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    /// Line of EP2s bounding the isofrequency region.
    Ep2,
    /// Line where all imaginary parts coincide.
    IFermi,
}

impl ArcKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArcKind::Ep2 => "ep2",
            ArcKind::IFermi => "ifermi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub kind: ArcKind,
}

/// Signed indicator functions whose zero sets are the arcs: the discriminant
/// (real part of the first resultant component) for the EP2 lines, and the
/// imaginary-part mismatch of the symmetric form for the i-Fermi arcs.
fn arc_indicators(lambda1: f64, lambda2: f64, kappa: f64) -> (f64, Option<f64>) {
    let spectrum = eigenvalues_closed_form(lambda1, lambda2, kappa);
    let discriminant = resultant_vector(&spectrum)
        .map(|r| r.r1.re)
        .unwrap_or(0.0);
    let e = spectrum.energies();
    // Outside the isofrequency region one energy is purely imaginary and the
    // other two form a ±R pair.
    let ifermi = if discriminant > 0.0 {
        let lone = (0..3)
            .min_by(|&a, &b| e[a].re.abs().total_cmp(&e[b].re.abs()))
            .expect("three energies");
        let pair: Vec<Complex64> = (0..3).filter(|&k| k != lone).map(|k| e[k]).collect();
        Some(e[lone].im - (pair[0].im + pair[1].im) / 2.0)
    } else {
        None
    };
    (discriminant, ifermi)
}

/// EP2 lines and i-Fermi arcs crossing the grid rows and columns, each
/// crossing located by bisection.
pub fn trace_arcs(kappa: f64, grid: &GridSpec) -> Result<Vec<ArcPoint>> {
    grid.validate()?;
    let rows: Vec<Vec<ArcPoint>> = (0..grid.n_lambda2 + grid.n_lambda1)
        .into_par_iter()
        .map(|line| {
            let (n, point): (usize, Box<dyn Fn(usize) -> (f64, f64) + Sync>) = if line < grid.n_lambda2 {
                let l2 = grid.lambda2(line);
                (grid.n_lambda1, Box::new(move |k| (grid.lambda1(k), l2)))
            } else {
                let l1 = grid.lambda1(line - grid.n_lambda2);
                (grid.n_lambda2, Box::new(move |k| (l1, grid.lambda2(k))))
            };
            let mut found = Vec::new();
            for k in 0..n - 1 {
                let (a, b) = (point(k), point(k + 1));
                let (da, ia) = arc_indicators(a.0, a.1, kappa);
                let (db, ib) = arc_indicators(b.0, b.1, kappa);
                if da.signum() != db.signum() && da != 0.0 && db != 0.0 {
                    let p = bisect(a, b, |p| arc_indicators(p.0, p.1, kappa).0);
                    found.push(ArcPoint { lambda1: p.0, lambda2: p.1, kind: ArcKind::Ep2 });
                }
                if let (Some(ia), Some(ib)) = (ia, ib) {
                    if ia.signum() != ib.signum() && ia != 0.0 && ib != 0.0 {
                        let p = bisect(a, b, |p| arc_indicators(p.0, p.1, kappa).1.unwrap_or(f64::NAN));
                        found.push(ArcPoint { lambda1: p.0, lambda2: p.1, kind: ArcKind::IFermi });
                    }
                }
            }
            found
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn bisect(mut a: (f64, f64), mut b: (f64, f64), f: impl Fn((f64, f64)) -> f64) -> (f64, f64) {
    let fa = f(a);
    for _ in 0..60 {
        let m = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let fm = f(m);
        if fm.is_nan() {
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
}

/// Normalized overlap `|⟨a|b⟩|` of two states.
pub fn overlap(a: &StateVector, b: &StateVector) -> f64 {
    inner(a.amplitudes(), b.amplitudes()).norm() / (a.norm() * b.norm())
}
