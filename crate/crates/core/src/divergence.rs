//! Matrix divergences under the normalized trace `τ = (1/n)·Tr`.
//!
//! All quantities are spectral: once the eigenvalues of `A`, `B` and the
//! midpoint `(A+B)/2` are known, each divergence is a short sum. Squared
//! values that come out slightly negative from roundoff are clamped to zero
//! inside `(−tol_div, 0)` with `tol_div = 1e-12·n`; anything more negative is
//! reported as [`Error::NumericalInconsistency`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{HermitianMatrix, SpectralDecomposition};
use crate::quadrature::{self, MAX_INTERVALS};
use crate::random::Sampler;
use crate::scalar;
use crate::{Error, Result};

/// Slack for metric triangle checks in [`metric_suite`].
pub const TOL_TRI: f64 = 1e-10;

/// `η(x) = x·log x` extended by `η(0) = 0`.
pub fn eta(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// A squared divergence together with its square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceValue {
    pub squared: f64,
    pub root: f64,
}

impl DivergenceValue {
    pub const ZERO: Self = Self { squared: 0.0, root: 0.0 };

    /// Wraps a raw squared value computed for `n×n` inputs.
    pub fn from_squared(raw: f64, n: usize) -> Result<Self> {
        let tol = 1e-12 * n as f64;
        if raw.is_nan() || raw <= -tol {
            return Err(Error::NumericalInconsistency(raw));
        }
        let squared = if raw <= 0.0 {
            log::debug!("clamping squared divergence {raw:e} to zero");
            0.0
        } else {
            raw
        };
        Ok(Self { squared, root: squared.sqrt() })
    }
}

fn check_dims(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// Spectra of `A`, `B` and `(A+B)/2` for PSD inputs, small negatives clamped.
struct TripleSpectrum {
    a: Vec<f64>,
    b: Vec<f64>,
    mid: Vec<f64>,
}

impl TripleSpectrum {
    fn psd(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Self> {
        check_dims(a, b)?;
        let sa = a.spectral_psd()?;
        let sb = b.spectral_psd()?;
        let sm = a.midpoint(b)?.spectral_psd()?;
        Ok(Self { a: sa.eigenvalues, b: sb.eigenvalues, mid: sm.eigenvalues })
    }

    fn n(&self) -> usize {
        self.a.len()
    }

    fn max_eigenvalue(&self) -> f64 {
        self.a[0].max(self.b[0])
    }

    /// `Σ f(m) − ½Σ f(a) − ½Σ f(b)`, unnormalized.
    fn gap(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sm: f64 = self.mid.iter().map(|&x| f(x)).sum();
        let sa: f64 = self.a.iter().map(|&x| f(x)).sum();
        let sb: f64 = self.b.iter().map(|&x| f(x)).sum();
        sm - 0.5 * sa - 0.5 * sb
    }

    /// `d_τ(A+tI, B+tI)²`, with the `log t` parts cancelled analytically.
    fn shifted_sq(&self, t: f64) -> f64 {
        self.gap(|x| (x / t).ln_1p()) / self.n() as f64
    }

    /// `t²·d_τ(A+tI, B+tI)²` evaluated as a function of `u = 1/t`.
    ///
    /// Uses `log1p(x) = x + x²·h(x)`; the linear parts cancel by linearity of
    /// the trace, so only the `h` terms remain and the expression is smooth
    /// down to `u = 0`, where it equals `‖A−B‖²_{2,τ}/8`.
    fn shifted_sq_scaled(&self, u: f64) -> f64 {
        self.gap(|x| x * x * log1p_remainder(x * u)) / self.n() as f64
    }
}

/// `h(x) = (log1p(x) − x)/x²`, stable near zero.
fn log1p_remainder(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // −1/2 + x/3 − x²/4 + … ; 12 terms reach double precision for |x| < 1e-2
        let mut acc = 0.0;
        for k in (2..14).rev() {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            acc = acc * x + sign / k as f64;
        }
        acc
    } else {
        (x.ln_1p() - x) / (x * x)
    }
}

/// Trace-log distance `d_τ(A,B)² = τ log((A+B)/2) − ½τ log A − ½τ log B`.
pub fn d_tau_sq(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<DivergenceValue> {
    check_dims(a, b)?;
    if a.n() == 1 {
        let (x, y) = (a.get(0, 0).re, b.get(0, 0).re);
        if x <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: x });
        }
        if y <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: y });
        }
        return DivergenceValue::from_squared(scalar::delta_s_sq(x, y)?, 1);
    }
    let sa = a.spectral_pd()?;
    let sb = b.spectral_pd()?;
    let sm = a.midpoint(b)?.spectral_pd()?;
    let n = a.n();
    let raw = sm.trace_tau_of(f64::ln)? - 0.5 * sa.trace_tau_of(f64::ln)? - 0.5 * sb.trace_tau_of(f64::ln)?;
    DivergenceValue::from_squared(raw, n)
}

/// Shifted distance `d_{τ,t}(A,B)² = d_τ(A+tI, B+tI)²` for PSD `A`, `B`.
pub fn d_tau_shifted_sq(a: &HermitianMatrix, b: &HermitianMatrix, t: f64) -> Result<DivergenceValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::DomainError(format!("shift t must be positive, got {t}")));
    }
    let spec = TripleSpectrum::psd(a, b)?;
    DivergenceValue::from_squared(spec.shifted_sq(t), spec.n())
}

/// Quantum Jensen–Shannon divergence `J_{τ,η}(A,B) = ½τη(A) + ½τη(B) − τη((A+B)/2)`.
pub fn qjsd(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<DivergenceValue> {
    let spec = TripleSpectrum::psd(a, b)?;
    DivergenceValue::from_squared(-spec.gap(eta) / spec.n() as f64, spec.n())
}

/// `∫₀^∞ d_{τ,t}(A,B)² dt`, computed by adaptive quadrature.
///
/// `(0, T*]` with `T* = 10·(1 + ‖A‖ + ‖B‖)` is integrated in `log t`, which
/// absorbs the logarithmic blow-up at `t → 0` for rank-deficient inputs.
/// `[T*, ∞)` is mapped to `u = 1/t ∈ (0, 1/T*]`, where the integrand
/// `t²·d_{τ,t}²` is smooth, so no extrapolation of the tail is needed.
pub fn qjsd_by_integral(a: &HermitianMatrix, b: &HermitianMatrix, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
        return Err(Error::DomainError(format!("rel_tol {rel_tol:e} outside (1e-12, 1e-2)")));
    }
    let spec = TripleSpectrum::psd(a, b)?;
    let scale = spec.max_eigenvalue();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let t_star = 10.0 * (1.0 + spec.a[0] + spec.b[0]);
    let eps = 1e-14 * scale;
    let quad_tol = 0.1 * rel_tol;

    let head = quadrature::integrate(
        |s: f64| {
            let t = s.exp();
            spec.shifted_sq(t) * t
        },
        eps.ln(),
        t_star.ln(),
        1e-300,
        quad_tol,
        MAX_INTERVALS,
    )?;
    let tail =
        quadrature::integrate(|u: f64| spec.shifted_sq_scaled(u), 0.0, 1.0 / t_star, 1e-300, quad_tol, MAX_INTERVALS)?;
    // ∫₀^ε of an integrand with at most a log singularity ≈ ε·f(ε).
    let below = eps * spec.shifted_sq(eps);
    log::debug!(
        "qjsd integral: head {:e} (±{:e}, {} panels), tail {:e} (±{:e}), tail constant {:e}",
        head.value,
        head.error,
        head.intervals,
        tail.value,
        tail.error,
        spec.shifted_sq_scaled(0.0)
    );
    Ok(head.value + tail.value + below)
}

/// `lim_{t→∞} t²·d_{τ,t}(A,B)²`, which equals `‖A−B‖²_{2,τ}/8`.
pub fn shifted_tail_constant(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    Ok(TripleSpectrum::psd(a, b)?.shifted_sq_scaled(0.0))
}

/// Family of an operator convex generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `f(x) = x log x`; its measure `dt/t` is continuous, so the Jensen gap
    /// is computed spectrally.
    Eta,
    /// `f(x) = (b/2)·x²`.
    Square,
    /// `f(x) = −log(x + s)`, i.e. a single atom at `s` with weight `1/s`.
    NegLogShifted,
    /// Fully described by `b` and the atoms.
    Custom,
}

/// An operator convex generator in Nevanlinna form
/// `f'(x) = a + b·x + Σ w·x/(x+t)`.
///
/// The constant `a` only contributes affine terms, which cancel in every
/// Jensen gap, so it is not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenGenerator {
    pub kind: GeneratorKind,
    pub b: f64,
    /// `(t, weight)` pairs of the discrete measure `ν`.
    pub nu_atoms: Vec<(f64, f64)>,
}

impl JensenGenerator {
    pub fn entropy() -> Self {
        Self { kind: GeneratorKind::Eta, b: 0.0, nu_atoms: vec![] }
    }

    /// `f(x) = x²`, i.e. `b = 2`.
    pub fn square() -> Self {
        Self { kind: GeneratorKind::Square, b: 2.0, nu_atoms: vec![] }
    }

    pub fn neg_log_shifted(s: f64) -> Self {
        Self { kind: GeneratorKind::NegLogShifted, b: 0.0, nu_atoms: vec![(s, 1.0 / s)] }
    }

    pub fn custom(b: f64, nu_atoms: Vec<(f64, f64)>) -> Self {
        Self { kind: GeneratorKind::Custom, b, nu_atoms }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenerator(msg));
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return bad(format!("b must be finite and nonnegative, got {}", self.b));
        }
        for &(t, w) in &self.nu_atoms {
            if !(t > 0.0 && t.is_finite() && w > 0.0 && w.is_finite()) {
                return bad(format!("atom ({t}, {w}) needs t > 0 and weight > 0"));
            }
        }
        match self.kind {
            GeneratorKind::Eta if self.b != 0.0 || !self.nu_atoms.is_empty() => {
                bad("entropy generator carries no explicit (b, ν)".into())
            }
            GeneratorKind::Square if !(self.b > 0.0) || !self.nu_atoms.is_empty() => {
                bad("square generator needs b > 0 and no atoms".into())
            }
            GeneratorKind::NegLogShifted if self.b != 0.0 || self.nu_atoms.len() != 1 => {
                bad("shifted log generator is a single atom with b = 0".into())
            }
            GeneratorKind::Custom if self.b == 0.0 && self.nu_atoms.is_empty() => {
                bad("affine generator (b = 0, no atoms) has a zero Jensen gap".into())
            }
            _ => Ok(()),
        }
    }
}

/// Jensen divergence of an operator convex generator,
/// `(b/8)‖A−B‖²_{2,τ} + Σ w·t·d_{τ,t}(A,B)²`.
pub fn jensen_f(a: &HermitianMatrix, b: &HermitianMatrix, g: &JensenGenerator) -> Result<DivergenceValue> {
    g.validate()?;
    check_dims(a, b)?;
    if g.kind == GeneratorKind::Eta {
        return qjsd(a, b);
    }
    let spec = TripleSpectrum::psd(a, b)?;
    let quad = g.b / 8.0 * a.sub(b)?.norm_2_tau_sq();
    let atoms: f64 = g.nu_atoms.iter().map(|&(t, w)| w * t * spec.shifted_sq(t)).sum();
    DivergenceValue::from_squared(quad + atoms, spec.n())
}

/// Fuglede–Kadison determinant `Δ(A) = exp(τ log A) = det(A)^{1/n}`.
pub fn fk_determinant(a: &HermitianMatrix) -> Result<f64> {
    Ok(a.spectral_pd()?.trace_tau_of(f64::ln)?.exp())
}

/// `τ log A` from a decomposition.
pub fn trace_tau_log(spec: &SpectralDecomposition) -> Result<f64> {
    spec.trace_tau_of(f64::ln)
}

/// Which distance a [`metric_suite`] run checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetricMode {
    TraceLog,
    QjsdRoot,
    JensenRoot(JensenGenerator),
}

impl MetricMode {
    pub fn squared(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<DivergenceValue> {
        match self {
            MetricMode::TraceLog => d_tau_sq(a, b),
            MetricMode::QjsdRoot => qjsd(a, b),
            MetricMode::JensenRoot(g) => jensen_f(a, b, g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `d(i,k) − d(i,j) − d(j,k)`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceStats {
    pub checks: usize,
    pub failures: usize,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub points: usize,
    pub triangles_checked: usize,
    pub triangle_violations: Vec<TriangleViolation>,
    /// Largest `d(i,k) − d(i,j) − d(j,k)` seen; negative means slack.
    pub worst_triangle_margin: f64,
    pub symmetry_violations: Vec<(usize, usize)>,
    pub max_asymmetry: f64,
    pub identity_anomalies: Vec<(usize, usize)>,
    pub congruence: Option<InvarianceStats>,
    pub scaling: Option<InvarianceStats>,
}

impl SuiteReport {
    pub fn violation_count(&self) -> usize {
        self.triangle_violations.len()
            + self.symmetry_violations.len()
            + self.identity_anomalies.len()
            + self.congruence.as_ref().map_or(0, |c| c.failures)
            + self.scaling.as_ref().map_or(0, |c| c.failures)
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }
}

/// Checks the metric axioms of `√(squared divergence)` over a point set.
///
/// Distances are evaluated in parallel but collected in index order, so the
/// report depends only on the points, the mode and `seed` (which drives the
/// random congruences of the trace-log invariance check).
pub fn metric_suite(points: &[HermitianMatrix], mode: &MetricMode, seed: u64) -> Result<SuiteReport> {
    let m = points.len();
    if let Some(p) = points.iter().find(|p| p.n() != points[0].n()) {
        return Err(Error::DimensionMismatch(points[0].n(), p.n()));
    }
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let values: Vec<DivergenceValue> =
        pairs.par_iter().map(|&(i, j)| mode.squared(&points[i], &points[j])).collect::<Result<_>>()?;
    let d = |i: usize, j: usize| values[i * m + j];

    let mut report = SuiteReport {
        points: m,
        triangles_checked: 0,
        triangle_violations: vec![],
        worst_triangle_margin: f64::NEG_INFINITY,
        symmetry_violations: vec![],
        max_asymmetry: 0.0,
        identity_anomalies: vec![],
        congruence: None,
        scaling: None,
    };

    for i in 0..m {
        for j in 0..m {
            let dij = d(i, j);
            if i == j {
                if dij.squared > 1e-12 * points[i].n() as f64 {
                    report.identity_anomalies.push((i, j));
                }
                continue;
            }
            if j > i {
                let asym = (dij.root - d(j, i).root).abs();
                report.max_asymmetry = report.max_asymmetry.max(asym);
                if asym > TOL_TRI {
                    report.symmetry_violations.push((i, j));
                }
                let diff = points[i].sub(&points[j])?.frobenius_norm();
                let scale = points[i].frobenius_norm().max(points[j].frobenius_norm());
                if diff > 1e-6 * scale && dij.squared <= 0.0 {
                    report.identity_anomalies.push((i, j));
                }
            }
        }
    }

    for i in 0..m {
        for k in (i + 1)..m {
            for j in 0..m {
                if j == i || j == k {
                    continue;
                }
                report.triangles_checked += 1;
                let margin = d(i, k).root - d(i, j).root - d(j, k).root;
                report.worst_triangle_margin = report.worst_triangle_margin.max(margin);
                if margin > TOL_TRI {
                    report.triangle_violations.push(TriangleViolation { i, j, k, margin });
                }
            }
        }
    }

    match mode {
        MetricMode::TraceLog => {
            let mut sampler = Sampler::seeded(seed);
            let n = points.first().map_or(1, HermitianMatrix::n);
            let upper: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
            let congruences: Vec<_> = upper.iter().map(|_| sampler.invertible(n, 1e3)).collect();
            let devs: Vec<(f64, f64)> = upper
                .par_iter()
                .zip(congruences.par_iter())
                .map(|(&(i, j), s)| {
                    let moved = d_tau_sq(&points[i].congruence(s)?, &points[j].congruence(s)?)?;
                    let base = d(i, j).root;
                    Ok(((moved.root - base).abs(), base))
                })
                .collect::<Result<_>>()?;
            report.congruence = Some(stats(&devs, |base| 1e-8 * (1.0 + base)));

            let scaled: Vec<(f64, f64)> = upper
                .par_iter()
                .flat_map_iter(|&(i, j)| [1e-3, 1.0, 1e3].into_iter().map(move |c| (i, j, c)))
                .map(|(i, j, c)| {
                    let v = d_tau_sq(&points[i].scale(c), &points[j].scale(c))?;
                    Ok(((v.root - d(i, j).root).abs(), d(i, j).root))
                })
                .collect::<Result<_>>()?;
            report.scaling = Some(stats(&scaled, |_| 1e-12));
        }
        MetricMode::QjsdRoot => {
            let upper: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
            let scaled: Vec<(f64, f64)> = upper
                .par_iter()
                .flat_map_iter(|&(i, j)| [1e-3, 1e3].into_iter().map(move |c| (i, j, c)))
                .map(|(i, j, c)| {
                    let v = qjsd(&points[i].scale(c), &points[j].scale(c))?;
                    let expect = c * d(i, j).squared;
                    Ok(((v.squared - expect).abs() / expect.max(1e-300), expect))
                })
                .collect::<Result<_>>()?;
            report.scaling = Some(stats(&scaled, |_| 1e-10));
        }
        MetricMode::JensenRoot(_) => {}
    }
    Ok(report)
}

fn stats(devs: &[(f64, f64)], tol: impl Fn(f64) -> f64) -> InvarianceStats {
    InvarianceStats {
        checks: devs.len(),
        failures: devs.iter().filter(|&&(dev, base)| dev > tol(base)).count(),
        max_deviation: devs.iter().fold(0.0, |m, &(dev, _)| m.max(dev)),
    }
}
