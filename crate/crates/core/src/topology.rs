//! Resultant vectors of the chain spectrum and their winding along closed
//! loops of the (λ1, λ2) plane.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{ComplexMatrix, I};
use crate::model::{build_reference_model, ReferenceModel};
use crate::poly::{characteristic_polynomial, Polynomial};
use crate::spectra::{eigenvalues_closed_form, ComplexSpectrum};

/// Relative imaginary part tolerated before a resultant is declared non-real.
pub const REALNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultantVector {
    pub r1: Complex64,
    pub r2: Complex64,
    pub norm: f64,
    /// `atan2(Re r2, Re r1)`.
    pub phase: f64,
}

impl ResultantVector {
    pub fn new(r1: Complex64, r2: Complex64) -> Self {
        Self {
            r1,
            r2,
            norm: (r1.norm_sqr() + r2.norm_sqr()).sqrt(),
            phase: r2.re.atan2(r1.re),
        }
    }

    /// Largest imaginary part relative to the norm (0 for the zero vector).
    pub fn relative_imaginary(&self) -> f64 {
        if self.norm == 0.0 {
            return 0.0;
        }
        self.r1.im.abs().max(self.r2.im.abs()) / self.norm
    }

    pub fn ensure_real(&self, tol: f64) -> Result<(f64, f64)> {
        let relative = self.relative_imaginary();
        if relative > tol {
            return Err(Error::RealnessViolation { relative });
        }
        Ok((self.r1.re, self.r2.re))
    }
}

fn product_formulas(e: &[Complex64]) -> (Complex64, Complex64) {
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    let d = (e1 - e2) * (e1 - e3) * (e2 - e3);
    let r1 = d * d;
    let r2 = I * 8.0 * (e1 + e3 - 2.0 * e2) * (e1 + e2 - 2.0 * e3) * (e2 + e3 - 2.0 * e1);
    (r1, r2)
}

/// `r1 = Π(Ea − Eb)²` and `r2 = 8i(E1+E3−2E2)(E1+E2−2E3)(E2+E3−2E1)`.
///
/// Both are symmetric in the energies, so the ordering of the spectrum is
/// irrelevant. No realness check is made; see [`resultant_vector_checked`].
pub fn resultant_vector(spectrum: &ComplexSpectrum) -> Result<ResultantVector> {
    if spectrum.len() != 3 {
        return Err(Error::DimensionMismatch {
            what: "spectrum",
            expected: 3,
            actual: spectrum.len(),
        });
    }
    let (r1, r2) = product_formulas(spectrum.energies());
    Ok(ResultantVector::new(r1, r2))
}

/// [`resultant_vector`] for spectra of real chain parameters, rejecting
/// components whose imaginary parts exceed [`REALNESS_TOL`] of the norm.
pub fn resultant_vector_checked(spectrum: &ComplexSpectrum) -> Result<ResultantVector> {
    let r = resultant_vector(spectrum)?;
    r.ensure_real(REALNESS_TOL)?;
    Ok(r)
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n): n shifted rows of
/// `p` followed by m shifted rows of `q`. Declared degrees are used as given,
/// so a padded constant counts as degree 1.
pub fn sylvester_matrix(p: &Polynomial, q: &Polynomial) -> Result<ComplexMatrix> {
    let (m, n) = (p.degree(), q.degree());
    if m == 0 && n == 0 {
        return Err(Error::InvalidParams("resultant of two constants is undefined".into()));
    }
    let size = m + n;
    let mut s = ComplexMatrix::zeros(size);
    for row in 0..n {
        for (k, &c) in p.coefficients().iter().enumerate() {
            s[(row, row + k)] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in q.coefficients().iter().enumerate() {
            s[(n + row, row + k)] = c;
        }
    }
    Ok(s)
}

pub fn sylvester_resultant(p: &Polynomial, q: &Polynomial) -> Result<Complex64> {
    Ok(sylvester_matrix(p, q)?.determinant())
}

/// Resultant vector from the characteristic polynomial `P(E) = det(H − E)`.
///
/// Cubics use `r1 = R(P, P′)` and `r2 = −i·R(P, P″)`, which reproduce the
/// product formulas for a leading coefficient of −1. Quadratics follow the
/// two-level convention `r1 = R(P, P′)`, `r2 = R(P, P″)` with `P″` padded to
/// degree 1.
pub fn resultant_vector_from_polynomial(p: &Polynomial) -> Result<ResultantVector> {
    let d1 = p.derivative();
    let d2 = d1.derivative();
    match p.degree() {
        3 => {
            let r1 = sylvester_resultant(p, &d1)?;
            let r2 = -I * sylvester_resultant(p, &d2)?;
            Ok(ResultantVector::new(r1, r2))
        }
        2 => {
            let r1 = sylvester_resultant(p, &d1)?;
            let r2 = sylvester_resultant(p, &d2.padded(1))?;
            Ok(ResultantVector::new(r1, r2))
        }
        d => Err(Error::InvalidParams(format!(
            "resultant vectors are defined for degree 2 or 3, got {d}"
        ))),
    }
}

/// Point of the square loop at angle θ:
/// `λm·(½(1 − cosθ|cosθ| + sinθ|sinθ|), ½(1 − cosθ|cosθ| − sinθ|sinθ|))`.
pub fn square_loop_point(theta: f64, lambda_m: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let (cc, ss) = (c * c.abs(), s * s.abs());
    (lambda_m * 0.5 * (1.0 - cc + ss), lambda_m * 0.5 * (1.0 - cc - ss))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Forward,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LoopShape {
    /// Straight-edged square `(0,0) → (λm,0) → (λm,λm) → (0,λm) → (0,0)`.
    Square { lambda_m: f64 },
    /// The same square traced by [`square_loop_point`] with `samples` initial θ samples.
    ParametricTheta { lambda_m: f64, samples: usize },
    /// Closed polygon; the first vertex equals the last.
    Polyline { vertices: Vec<(f64, f64)> },
    /// Counter-clockwise circle.
    Circle { center: (f64, f64), radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterLoop {
    pub shape: LoopShape,
    pub orientation: Orientation,
}

/// Initial samples per edge (or per full turn for smooth loops).
pub const DEFAULT_SAMPLES_PER_EDGE: usize = 512;

impl ParameterLoop {
    pub fn square(lambda_m: f64) -> Result<Self> {
        check_positive("lambda_m", lambda_m)?;
        Ok(Self::forward(LoopShape::Square { lambda_m }))
    }

    pub fn parametric_theta(lambda_m: f64, samples: usize) -> Result<Self> {
        check_positive("lambda_m", lambda_m)?;
        if samples < 4 {
            return Err(Error::InvalidParams(format!(
                "a theta loop needs at least 4 samples, got {samples}"
            )));
        }
        Ok(Self::forward(LoopShape::ParametricTheta { lambda_m, samples }))
    }

    pub fn polyline(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(Error::InvalidParams(format!(
                "a closed polyline needs at least 3 distinct vertices plus the closing one, got {} points",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !(v.0.is_finite() && v.1.is_finite())) {
            return Err(Error::InvalidParams("polyline vertices must be finite".into()));
        }
        if vertices.first() != vertices.last() {
            return Err(Error::InvalidParams("polyline is not closed: first vertex must equal the last".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("polyline has a zero-length edge".into()));
        }
        Ok(Self::forward(LoopShape::Polyline { vertices }))
    }

    pub fn circle(center: (f64, f64), radius: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        if !(center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::InvalidParams("circle center must be finite".into()));
        }
        Ok(Self::forward(LoopShape::Circle { center, radius }))
    }

    fn forward(shape: LoopShape) -> Self {
        Self {
            shape,
            orientation: Orientation::Forward,
        }
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        };
        self
    }

    /// Point at fraction `s ∈ [0, 1]` of the loop (arclength fraction for
    /// straight-edged and circular loops, θ/2π for parametric ones).
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let s = match self.orientation {
            Orientation::Forward => s,
            Orientation::Reversed => 1.0 - s,
        };
        match &self.shape {
            LoopShape::Square { lambda_m } => {
                let m = *lambda_m;
                let corners = [(0.0, 0.0), (m, 0.0), (m, m), (0.0, m), (0.0, 0.0)];
                along_edges(&corners, &[0.0, 0.25, 0.5, 0.75, 1.0], s)
            }
            LoopShape::ParametricTheta { lambda_m, .. } => square_loop_point(TAU * s, *lambda_m),
            LoopShape::Polyline { vertices } => along_edges(vertices, &cumulative_fractions(vertices), s),
            LoopShape::Circle { center, radius } => {
                if s <= 0.0 || s >= 1.0 {
                    return (center.0 + radius, center.1);
                }
                let (sn, cs) = (TAU * s).sin_cos();
                (center.0 + radius * cs, center.1 + radius * sn)
            }
        }
    }

    /// Initial sampling fractions, starting at 0 and ending at 1, with
    /// `per_edge` samples on each straight edge (or per turn).
    pub fn initial_fractions(&self, per_edge: usize) -> Vec<f64> {
        let per_edge = per_edge.max(1);
        let breaks: Vec<f64> = match &self.shape {
            LoopShape::Square { .. } => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            LoopShape::Polyline { vertices } => cumulative_fractions(vertices),
            LoopShape::ParametricTheta { samples, .. } => {
                return (0..=*samples).map(|k| k as f64 / *samples as f64).collect();
            }
            LoopShape::Circle { .. } => vec![0.0, 1.0],
        };
        let mut out = Vec::with_capacity(per_edge * (breaks.len() - 1) + 1);
        for w in breaks.windows(2) {
            for k in 0..per_edge {
                out.push(w[0] + (w[1] - w[0]) * k as f64 / per_edge as f64);
            }
        }
        out.push(1.0);
        if self.orientation == Orientation::Reversed {
            // keep edge-aligned breakpoints in the reversed parametrization
            out = out.iter().rev().map(|s| 1.0 - s).collect();
        }
        out
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {value}")))
    }
}

fn cumulative_fractions(vertices: &[(f64, f64)]) -> Vec<f64> {
    let lengths: Vec<f64> = vertices
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .collect();
    let total: f64 = lengths.iter().sum();
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for (k, l) in lengths.iter().enumerate() {
        acc += l;
        out.push(if k + 1 == lengths.len() { 1.0 } else { acc / total });
    }
    out
}

fn along_edges(vertices: &[(f64, f64)], fractions: &[f64], s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return vertices[0];
    }
    if s >= 1.0 {
        return *vertices.last().expect("non-empty");
    }
    let k = fractions.partition_point(|&f| f <= s).clamp(1, fractions.len() - 1) - 1;
    let t = (s - fractions[k]) / (fractions[k + 1] - fractions[k]);
    let (a, b) = (vertices[k], vertices[k + 1]);
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

/// Real resultant components as a function of a point in a parameter plane.
pub trait ResultantField {
    fn resultant_at(&self, x: f64, y: f64) -> Result<(f64, f64)>;
}

/// The three-mode chain with decay κ over the (λ1, λ2) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainField {
    pub kappa: f64,
}

impl ResultantField for ChainField {
    fn resultant_at(&self, lambda1: f64, lambda2: f64) -> Result<(f64, f64)> {
        let spectrum = eigenvalues_closed_form(lambda1, lambda2, self.kappa);
        let r = resultant_vector(&spectrum)?;
        // At an EP3 both components vanish and only round-off is left, so the
        // realness test is meaningless there; hand the zero to the caller.
        let s = self.kappa.max(lambda1.abs()).max(lambda2.abs());
        if r.norm < 1e-9 * (s.powi(3) + s.powi(6)) {
            return Ok((r.r1.re, r.r2.re));
        }
        r.ensure_real(REALNESS_TOL)
    }
}

/// A reference model over its own two-parameter plane, via Sylvester resultants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceField {
    pub model: ReferenceModel,
}

impl ResultantField for ReferenceField {
    fn resultant_at(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let h = build_reference_model(&self.model.at(x, y))?;
        resultant_vector_from_polynomial(&characteristic_polynomial(&h))?.ensure_real(REALNESS_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    pub samples_per_edge: usize,
    /// Largest accepted phase step between consecutive samples.
    pub max_phase_step: f64,
    pub max_samples: usize,
    pub quantization_tol: f64,
    /// Samples with `‖r‖` below this fraction of the largest norm seen count as zeros.
    pub zero_rel_tol: f64,
    /// Smallest loop-fraction interval bisection may produce before the
    /// phase jump is attributed to a zero on the loop.
    pub min_fraction_step: f64,
    pub record_trace: bool,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            samples_per_edge: DEFAULT_SAMPLES_PER_EDGE,
            max_phase_step: PI / 2.0,
            max_samples: 1 << 20,
            quantization_tol: 1e-3,
            zero_rel_tol: 1e-12,
            min_fraction_step: 1e-14,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingSample {
    pub s: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub r1_normalized: f64,
    pub r2_normalized: f64,
    pub phase_unwrapped: f64,
}

pub const WINDING_CSV_HEADER: &str = "s,lambda1,lambda2,r1_normalized,r2_normalized,phase_unwrapped";

#[derive(Debug, Clone, PartialEq)]
pub struct Winding {
    pub raw: f64,
    pub rounded: i64,
    pub samples: usize,
    /// Filled when [`WindingOptions::record_trace`] is set.
    pub trace: Vec<WindingSample>,
}

#[derive(Clone, Copy)]
struct Sample {
    s: f64,
    point: (f64, f64),
    r: (f64, f64),
}

struct Accumulator<'a, F: ResultantField + ?Sized> {
    lp: &'a ParameterLoop,
    field: &'a F,
    opts: WindingOptions,
    max_norm: f64,
    samples: usize,
    phase: f64,
    integral: f64,
    trace: Vec<WindingSample>,
}

impl<F: ResultantField + ?Sized> Accumulator<'_, F> {
    fn sample(&mut self, s: f64) -> Result<Sample> {
        let point = self.lp.point_at(s);
        let r = self.field.resultant_at(point.0, point.1)?;
        self.samples += 1;
        if self.samples > self.opts.max_samples {
            return Err(Error::SampleCapExceeded { cap: self.opts.max_samples });
        }
        let norm = r.0.hypot(r.1);
        if !norm.is_finite() {
            return Err(Error::OutOfRange(format!(
                "non-finite resultant at ({}, {})",
                point.0, point.1
            )));
        }
        self.max_norm = self.max_norm.max(norm);
        Ok(Sample { s, point, r })
    }

    fn check_nonzero(&self, x: &Sample) -> Result<()> {
        if x.r.0.hypot(x.r.1) <= self.opts.zero_rel_tol * self.max_norm {
            return Err(Error::ResultantZeroOnLoop {
                lambda1: x.point.0,
                lambda2: x.point.1,
            });
        }
        Ok(())
    }

    fn push_trace(&mut self, x: &Sample) {
        if self.opts.record_trace {
            let n = x.r.0.hypot(x.r.1);
            self.trace.push(WindingSample {
                s: x.s,
                lambda1: x.point.0,
                lambda2: x.point.1,
                r1_normalized: x.r.0 / n,
                r2_normalized: x.r.1 / n,
                phase_unwrapped: x.r.1.atan2(x.r.0),
            });
        }
    }

    fn refine(&mut self, a: Sample, b: Sample) -> Result<()> {
        let step = wrap(b.r.1.atan2(b.r.0) - a.r.1.atan2(a.r.0));
        if step.abs() < self.opts.max_phase_step {
            self.phase += step;
            let (na, nb) = (a.r.0.hypot(a.r.1), b.r.0.hypot(b.r.1));
            let (ua, ub) = ((a.r.0 / na, a.r.1 / na), (b.r.0 / nb, b.r.1 / nb));
            let mid = ((ua.0 + ub.0) / 2.0, (ua.1 + ub.1) / 2.0);
            self.integral += (mid.0 * (ub.1 - ua.1) - mid.1 * (ub.0 - ua.0)) / (mid.0 * mid.0 + mid.1 * mid.1);
            if self.opts.record_trace {
                let n = b.r.0.hypot(b.r.1);
                self.trace.push(WindingSample {
                    s: b.s,
                    lambda1: b.point.0,
                    lambda2: b.point.1,
                    r1_normalized: b.r.0 / n,
                    r2_normalized: b.r.1 / n,
                    phase_unwrapped: self.trace.first().map_or(0.0, |t| t.phase_unwrapped) + self.phase,
                });
            }
            return Ok(());
        }
        if (b.s - a.s).abs() < self.opts.min_fraction_step {
            let mid = ((a.point.0 + b.point.0) / 2.0, (a.point.1 + b.point.1) / 2.0);
            return Err(Error::ResultantZeroOnLoop {
                lambda1: mid.0,
                lambda2: mid.1,
            });
        }
        let m = self.sample((a.s + b.s) / 2.0)?;
        self.check_nonzero(&m)?;
        self.refine(a, m)?;
        self.refine(m, b)
    }
}

fn wrap(x: f64) -> f64 {
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y <= -PI {
        y += TAU;
    }
    y
}

fn accumulate<F: ResultantField + ?Sized>(
    lp: &ParameterLoop,
    field: &F,
    opts: WindingOptions,
) -> Result<(f64, f64, usize, Vec<WindingSample>)> {
    if !(opts.max_phase_step > 0.0 && opts.max_phase_step < PI) {
        return Err(Error::InvalidParams("max_phase_step must lie in (0, pi)".into()));
    }
    let fractions = lp.initial_fractions(opts.samples_per_edge);
    let mut acc = Accumulator {
        lp,
        field,
        opts,
        max_norm: 0.0,
        samples: 0,
        phase: 0.0,
        integral: 0.0,
        trace: Vec::new(),
    };
    let initial = fractions.iter().map(|&s| acc.sample(s)).collect::<Result<Vec<_>>>()?;
    for x in &initial {
        acc.check_nonzero(x)?;
    }
    acc.push_trace(&initial[0]);
    for w in initial.windows(2) {
        acc.refine(w[0], w[1])?;
    }
    Ok((acc.phase, acc.integral, acc.samples, acc.trace))
}

fn quantize(raw: f64, samples: usize, trace: Vec<WindingSample>, tol: f64) -> Result<Winding> {
    let rounded = raw.round();
    if (raw - rounded).abs() >= tol {
        return Err(Error::NotQuantized { raw });
    }
    Ok(Winding {
        raw,
        rounded: rounded as i64,
        samples,
        trace,
    })
}

/// Winding of the resultant vector of any field along `lp`, by adaptive
/// phase unwrapping.
pub fn winding_number_of<F: ResultantField + ?Sized>(
    lp: &ParameterLoop,
    field: &F,
    opts: &WindingOptions,
) -> Result<Winding> {
    let (phase, _, samples, trace) = accumulate(lp, field, *opts)?;
    quantize(phase / TAU, samples, trace, opts.quantization_tol)
}

/// Winding of the chain resultant vector along a loop of the (λ1, λ2) plane.
pub fn winding_number(lp: &ParameterLoop, kappa: f64, opts: &WindingOptions) -> Result<Winding> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParams(format!("kappa must be finite and non-negative, got {kappa}")));
    }
    winding_number_of(lp, &ChainField { kappa }, opts)
}

/// Cross-check evaluating `(1/2π)∮(r1 dr2 − r2 dr1)/‖r‖²` by midpoint
/// quadrature on the normalized vector, with phase steps kept below π/256.
pub fn winding_number_integral<F: ResultantField + ?Sized>(
    lp: &ParameterLoop,
    field: &F,
    opts: &WindingOptions,
) -> Result<Winding> {
    let opts = WindingOptions {
        max_phase_step: opts.max_phase_step.min(PI / 256.0),
        record_trace: false,
        ..*opts
    };
    let (_, integral, samples, _) = accumulate(lp, field, opts)?;
    quantize(integral / TAU, samples, Vec::new(), opts.quantization_tol)
}

pub fn write_winding_csv<W: Write>(out: &mut W, trace: &[WindingSample]) -> io::Result<()> {
    writeln!(out, "{WINDING_CSV_HEADER}")?;
    for t in trace {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(t.s),
            fmt_f64(t.lambda1),
            fmt_f64(t.lambda2),
            fmt_f64(t.r1_normalized),
            fmt_f64(t.r2_normalized),
            fmt_f64(t.phase_unwrapped)
        )?;
    }
    Ok(())
}

/// Resultant vector at a point of the chain plane (convenience for plotting).
pub fn chain_resultant(lambda1: f64, lambda2: f64, kappa: f64) -> Result<ResultantVector> {
    resultant_vector(&eigenvalues_closed_form(lambda1, lambda2, kappa))
}
