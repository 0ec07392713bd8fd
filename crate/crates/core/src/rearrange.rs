//! Decreasing rearrangements of matrix spectra.
//!
//! For an `n×n` PSD matrix under `τ = (1/n)·Tr` the generalized s-number
//! function `μ_X(t)` is the step function equal to the `k`-th largest
//! eigenvalue on `((k−1)/n, k/n]`. Integrals over `(0,1)` are therefore finite
//! sums `(1/n)·Σ_k`, and the checks here are exact up to roundoff.

use serde::{Deserialize, Serialize};

use crate::divergence::{d_tau_sq, eta};
use crate::linalg::HermitianMatrix;
use crate::scalar::delta_s_sq;
use crate::{Error, Result};

/// Slack for every inequality check in this module.
pub const TOL_BOUND: f64 = 1e-10;

/// `μ_X` as its panel values, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub n: usize,
    pub values: Vec<f64>,
}

impl SingularProfile {
    /// `μ_X(t)` with right-continuous step semantics: panel `k` covers
    /// `((k−1)/n, k/n]`. Returns `None` outside `(0, 1]`.
    pub fn at(&self, t: f64) -> Option<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return None;
        }
        let k = ((t * self.n as f64).ceil() as usize).clamp(1, self.n);
        Some(self.values[k - 1])
    }

    /// `∫₀¹ f(μ(t)) dt = (1/n) Σ f(μ_k)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().map(|&v| f(v)).sum::<f64>() / self.n as f64
    }
}

/// Descending eigenvalues of a PSD matrix.
pub fn profile(a: &HermitianMatrix) -> Result<SingularProfile> {
    let spec = a.spectral_psd()?;
    Ok(SingularProfile { n: a.n(), values: spec.eigenvalues })
}

fn profile_pd(a: &HermitianMatrix) -> Result<SingularProfile> {
    let spec = a.spectral_pd()?;
    Ok(SingularProfile { n: a.n(), values: spec.eigenvalues })
}

/// Both sides of a trace identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: f64,
    pub rhs: f64,
}

impl Identity {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Result of checking a one-sided inequality.
///
/// `margin` is the signed amount by which the inequality fails: positive
/// values are violations, and `violated` is set beyond [`TOL_BOUND`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

impl BoundReport {
    /// Report for `lhs ≤ rhs`.
    fn upper(lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        Self { lhs, rhs, margin, violated: margin > TOL_BOUND }
    }

    /// Report for `lhs ≥ rhs`.
    fn lower(lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self { lhs, rhs, margin, violated: margin > TOL_BOUND }
    }
}

/// `τ f(A)` via functional calculus against `(1/n)Σ f(λ_k)` via the profile.
pub fn trace_formula_check(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<Identity> {
    let lhs = a.apply_function(&f)?.trace_tau();
    let prof = profile(a)?;
    let values: Vec<f64> = prof.values.iter().map(|&v| f(v)).collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::DomainError(format!("f(μ) = {bad}")));
    }
    Ok(Identity { lhs, rhs: values.iter().sum::<f64>() / a.n() as f64 })
}

/// Convex increasing functions on `[0, ∞)` accepted by [`fk_sum_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConvexIncreasing {
    Square,
    ExpMinusOne,
    /// `max(x − c, 0)`.
    Hinge(f64),
}

impl ConvexIncreasing {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Square => x * x,
            Self::ExpMinusOne => x.exp_m1(),
            Self::Hinge(c) => (x - c).max(0.0),
        }
    }
}

fn check_pair(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch(x.n(), y.n()));
    }
    Ok(())
}

/// Fack–Kosaki: `∫₀^u f(μ_{X+Y}) ≤ ∫₀^u f(μ_X + μ_Y)` with `u = u_panels/n`.
pub fn fk_sum_bound_check(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    f: ConvexIncreasing,
    u_panels: usize,
) -> Result<BoundReport> {
    check_pair(x, y)?;
    let n = x.n();
    if u_panels == 0 || u_panels > n {
        return Err(Error::DomainError(format!("u_panels must lie in 1..={n}, got {u_panels}")));
    }
    let px = profile(x)?;
    let py = profile(y)?;
    let psum = profile(&x.add(y)?)?;
    let lhs: f64 = psum.values[..u_panels].iter().map(|&v| f.eval(v)).sum::<f64>() / n as f64;
    let rhs: f64 =
        px.values[..u_panels].iter().zip(&py.values[..u_panels]).map(|(&a, &b)| f.eval(a + b)).sum::<f64>() / n as f64;
    Ok(BoundReport::upper(lhs, rhs))
}

/// `τ log(X+Y) ≥ (1/n) Σ log(λ_k(X) + λ_k(Y))` for PD `X`, `Y`.
pub fn log_sum_lower_check(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<BoundReport> {
    check_pair(x, y)?;
    let px = profile_pd(x)?;
    let py = profile_pd(y)?;
    let lhs = profile_pd(&x.add(y)?)?.integrate(f64::ln);
    let rhs = px.values.iter().zip(&py.values).map(|(&a, &b)| (a + b).ln()).sum::<f64>() / x.n() as f64;
    Ok(BoundReport::lower(lhs, rhs))
}

/// `d_τ(I, X)² = (1/n) Σ δ_s(1, λ_k)²`.
pub fn d1_mu_identity_check(x: &HermitianMatrix) -> Result<Identity> {
    let p = profile_pd(x)?;
    let lhs = d_tau_sq(&HermitianMatrix::identity(x.n()), x)?.squared;
    let rhs = p.values.iter().map(|&v| delta_s_sq(1.0, v)).sum::<Result<f64>>()? / x.n() as f64;
    Ok(Identity { lhs, rhs })
}

/// `d_τ(S,T)² ≥ (1/n) Σ δ_s(λ_k(S), λ_k(T))²`.
pub fn dst_lower_check(s: &HermitianMatrix, t: &HermitianMatrix) -> Result<BoundReport> {
    check_pair(s, t)?;
    let ps = profile_pd(s)?;
    let pt = profile_pd(t)?;
    let lhs = d_tau_sq(s, t)?.squared;
    let rhs = ps.values.iter().zip(&pt.values).map(|(&a, &b)| delta_s_sq(a, b)).sum::<Result<f64>>()? / s.n() as f64;
    Ok(BoundReport::lower(lhs, rhs))
}

/// `‖δ_s(1, μ_T)‖ ≤ ‖δ_s(1, μ_S)‖ + ‖δ_s(μ_S, μ_T)‖` in `L²(0,1)`.
pub fn minkowski_assembly_check(s: &HermitianMatrix, t: &HermitianMatrix) -> Result<BoundReport> {
    check_pair(s, t)?;
    let ps = profile_pd(s)?;
    let pt = profile_pd(t)?;
    let l2 = |vals: Result<Vec<f64>>| -> Result<f64> { Ok((vals?.iter().sum::<f64>() / s.n() as f64).sqrt()) };
    let lhs = l2(pt.values.iter().map(|&b| delta_s_sq(1.0, b)).collect())?;
    let first = l2(ps.values.iter().map(|&a| delta_s_sq(1.0, a)).collect())?;
    let second = l2(ps.values.iter().zip(&pt.values).map(|(&a, &b)| delta_s_sq(a, b)).collect())?;
    Ok(BoundReport::upper(lhs, first + second))
}

/// The panelized trace formula for `η`, used by the property suites.
pub fn trace_formula_eta(a: &HermitianMatrix) -> Result<Identity> {
    trace_formula_check(a, eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(rows: &[[f64; 2]; 2]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(profile(&HermitianMatrix::identity(3)).unwrap().values, vec![1.0; 3]);
        assert_eq!(profile(&HermitianMatrix::diag(&[3.0, 1.0, 2.0])).unwrap().values, vec![3.0, 2.0, 1.0]);
        let p = profile(&herm(&[[8.0, 8.0], [8.0, 9.0]])).unwrap();
        let r = 257f64.sqrt();
        assert!((p.values[0] - (17.0 + r) / 2.0).abs() < 1e-13);
        assert!((p.values[1] - (17.0 - r) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn step_function_semantics() {
        let p = profile(&HermitianMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.at(0.1), Some(3.0));
        assert_eq!(p.at(1.0 / 3.0), Some(3.0));
        assert_eq!(p.at(0.34), Some(2.0));
        assert_eq!(p.at(1.0), Some(1.0));
        assert_eq!(p.at(0.0), None);
    }

    #[test]
    fn trace_formula_examples() {
        let id = trace_formula_check(&HermitianMatrix::identity(2), f64::ln).unwrap();
        assert_eq!((id.lhs, id.rhs), (0.0, 0.0));
        let id = trace_formula_check(&herm(&[[9.0, 2.0], [2.0, 1.0]]), |x| x).unwrap();
        assert!((id.lhs - 5.0).abs() < 1e-14 && (id.rhs - 5.0).abs() < 1e-14);
        let id = trace_formula_check(&herm(&[[8.0, 5.0], [5.0, 8.0]]), f64::ln).unwrap();
        let expect = 0.5 * 39f64.ln();
        assert!(id.gap() < 1e-13 && (id.rhs - expect).abs() < 1e-14);
    }

    #[test]
    fn fk_equality_for_aligned_commuting_pair() {
        let x = HermitianMatrix::diag(&[3.0, 2.0, 1.0]);
        let y = HermitianMatrix::diag(&[5.0, 0.5, 0.1]);
        for u in 1..=3 {
            let r = fk_sum_bound_check(&x, &y, ConvexIncreasing::Square, u).unwrap();
            assert!(r.margin.abs() < 1e-12);
        }
    }

    #[test]
    fn fk_projection_example() {
        let x = HermitianMatrix::diag(&[1.0, 0.0]);
        let y = herm(&[[0.5, 0.5], [0.5, 0.5]]);
        let r = fk_sum_bound_check(&x, &y, ConvexIncreasing::Square, 2).unwrap();
        // λ(X+Y) = 1 ± 1/√2 ⇒ lhs = ½(2 + 1) = 1.5 ; rhs = ½·4 = 2
        assert!((r.lhs - 1.5).abs() < 1e-14 && (r.rhs - 2.0).abs() < 1e-14);
        assert!(!r.violated);
    }

    #[test]
    fn fk_rejects_bad_panel_count() {
        let x = HermitianMatrix::identity(2);
        assert!(fk_sum_bound_check(&x, &x, ConvexIncreasing::Square, 0).is_err());
        assert!(fk_sum_bound_check(&x, &x, ConvexIncreasing::Square, 3).is_err());
    }

    #[test]
    fn log_sum_equality_cases() {
        let i = HermitianMatrix::identity(2);
        let r = log_sum_lower_check(&i, &i).unwrap();
        assert!((r.lhs - 2f64.ln()).abs() < 1e-15 && r.margin.abs() < 1e-15);
        let r = log_sum_lower_check(&HermitianMatrix::diag(&[4.0, 1.0]), &HermitianMatrix::diag(&[3.0, 2.0])).unwrap();
        assert!(r.margin.abs() < 1e-14);
    }

    #[test]
    fn d1_mu_identity_examples() {
        let r = d1_mu_identity_check(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = d1_mu_identity_check(&HermitianMatrix::diag(&[4.0, 9.0])).unwrap();
        let expect = 0.5 * (delta_s_sq(1.0, 4.0).unwrap() + delta_s_sq(1.0, 9.0).unwrap());
        assert!((r.lhs - expect).abs() < 1e-14 && (r.rhs - expect).abs() < 1e-15);
    }

    #[test]
    fn dst_lower_equality_cases() {
        let s = herm(&[[2.0, 1.0], [1.0, 7.0]]);
        let r = dst_lower_check(&s, &s).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = dst_lower_check(&HermitianMatrix::diag(&[5.0, 2.0]), &HermitianMatrix::diag(&[3.0, 0.5])).unwrap();
        assert!(r.margin.abs() < 1e-14);
    }

    #[test]
    fn pd_checks_reject_singular_inputs() {
        let z = HermitianMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(log_sum_lower_check(&z, &z), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(d1_mu_identity_check(&z), Err(Error::NotPositiveDefinite { .. })));
    }
}
