//! Conditional negative definiteness of finite kernels.
//!
//! A symmetric zero-diagonal kernel `K` on `m` points is CND when
//! `Σ c_i c_j K_ij ≤ 0` for every `c` with `Σ c_i = 0`. This is decided
//! exactly on the hyperplane `𝟙^⊥`: with `Q` an orthonormal basis of it,
//! `K` is CND iff `λ_max(QᵀKQ) ≤ 0`, and the top eigenvector (mapped back by
//! `Q`) is a witness when it is not. By Schoenberg, CND kernels are exactly
//! those for which every `exp(−βK)` is positive semidefinite, and exactly the
//! squared distances of point sets in a Hilbert space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::divergence::{d_tau_sq, qjsd};
use crate::linalg::{HermitianMatrix, Matrix};
use crate::{Error, Result};

/// Finite point set with its kernel matrix and optional test coefficients.
#[derive(Debug, Clone)]
pub struct KernelConfig {
    pub points: Vec<HermitianMatrix>,
    k: Vec<Vec<f64>>,
    pub coeffs: Option<Vec<f64>>,
}

impl KernelConfig {
    /// Validates symmetry, the zero diagonal and `Σ c_i = 0`.
    pub fn new(points: Vec<HermitianMatrix>, k: Vec<Vec<f64>>, coeffs: Option<Vec<f64>>) -> Result<Self> {
        let m = k.len();
        if !points.is_empty() && points.len() != m {
            return Err(Error::InvalidKernel(format!("{} points but {m}x{m} kernel", points.len())));
        }
        for (i, row) in k.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidKernel(format!("row {i} has length {}", row.len())));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidKernel(format!("non-finite entry {x} in row {i}")));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidKernel(format!("diagonal entry K[{i}][{i}] = {}", row[i])));
            }
        }
        let scale = k.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
        for i in 0..m {
            for j in (i + 1)..m {
                if (k[i][j] - k[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidKernel(format!("K[{i}][{j}] != K[{j}][{i}]")));
                }
            }
        }
        if let Some(c) = &coeffs {
            if c.len() != m {
                return Err(Error::InvalidKernel(format!("{} coefficients for {m} points", c.len())));
            }
            check_coeff_sum(c)?;
        }
        Ok(Self { points, k, coeffs })
    }

    pub fn from_kernel(k: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(vec![], k, None)
    }

    pub fn with_coeffs(mut self, c: Vec<f64>) -> Result<Self> {
        if c.len() != self.m() {
            return Err(Error::InvalidKernel(format!("{} coefficients for {} points", c.len(), self.m())));
        }
        check_coeff_sum(&c)?;
        self.coeffs = Some(c);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.k.len()
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.k
    }

    /// `1e-10 · m · ‖K‖_∞`.
    pub fn tol_cnd(&self) -> f64 {
        let norm = self.k.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        1e-10 * self.m() as f64 * norm
    }

    /// Parses `{"K": [[...]], "coeffs": [...]}`; other fields are ignored.
    pub fn from_json(v: &Value) -> Result<Self> {
        let rows =
            v.get("K").and_then(Value::as_array).ok_or_else(|| Error::Parse("kernel needs a \"K\" array".into()))?;
        let k = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("kernel rows must be arrays".into()))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Parse(format!("bad kernel entry {x}"))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = v.get("m").and_then(Value::as_u64) {
            if m as usize != k.len() {
                return Err(Error::Parse(format!("\"m\" = {m} but K has {} rows", k.len())));
            }
        }
        let coeffs = match v.get("coeffs") {
            Some(Value::Array(c)) => Some(
                c.iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Parse(format!("bad coefficient {x}"))))
                    .collect::<Result<Vec<f64>>>()?,
            ),
            _ => None,
        };
        Self::new(vec![], k, coeffs)
    }

    /// Kernel/verdict JSON: `{"m", "K", "coeffs", "verdict", "quad_form"}`.
    pub fn to_json(&self, verdict: Option<&CndVerdict>) -> Value {
        let coeffs = verdict.and_then(|v| v.witness.clone()).or_else(|| self.coeffs.clone());
        json!({
            "m": self.m(),
            "K": self.k,
            "coeffs": coeffs,
            "verdict": verdict.map(|v| v.status.label()),
            "quad_form": verdict.map(|v| v.quad_form_value),
        })
    }
}

fn check_coeff_sum(c: &[f64]) -> Result<()> {
    let sum: f64 = c.iter().sum();
    let scale = c.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    if sum.abs() > 1e-12 * scale {
        return Err(Error::CoeffSumNonzero(format!("{sum:e}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CndStatus {
    Cnd,
    NotCnd,
    /// The top centred eigenvalue sits in `(tol_cnd, 100·tol_cnd]`, too close
    /// to zero to call from floating-point evidence.
    Indeterminate,
}

impl CndStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CndStatus::Cnd => "cnd",
            CndStatus::NotCnd => "not_cnd",
            CndStatus::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CndMethod {
    Eigen,
    GivenWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CndVerdict {
    pub status: CndStatus,
    pub is_cnd: bool,
    pub witness: Option<Vec<f64>>,
    pub quad_form_value: f64,
    /// `λ_max` of the kernel restricted to `𝟙^⊥` (0 when `m ≤ 1`).
    pub max_centered_eigenvalue: f64,
    pub method: CndMethod,
    pub tol_cnd: f64,
}

/// `Σ c_i c_j K_ij` for `Σ c_i = 0`.
pub fn quad_form(cfg: &KernelConfig, c: &[f64]) -> Result<f64> {
    if c.len() != cfg.m() {
        return Err(Error::InvalidKernel(format!("{} coefficients for {} points", c.len(), cfg.m())));
    }
    check_coeff_sum(c)?;
    Ok(raw_quad_form(&cfg.k, c))
}

fn raw_quad_form(k: &[Vec<f64>], c: &[f64]) -> f64 {
    k.iter().zip(c).map(|(row, &ci)| ci * row.iter().zip(c).map(|(&kij, &cj)| kij * cj).sum::<f64>()).sum()
}

/// Orthonormal (Helmert) basis of `𝟙^⊥ ⊂ ℝ^m`, as `m−1` column vectors.
fn helmert_basis(m: usize) -> Vec<Vec<f64>> {
    (1..m)
        .map(|k| {
            let norm = ((k * (k + 1)) as f64).sqrt();
            (0..m)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / norm,
                    std::cmp::Ordering::Equal => -(k as f64) / norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

fn real_symmetric(n: usize, f: impl Fn(usize, usize) -> f64) -> HermitianMatrix {
    HermitianMatrix::new(Matrix::from_fn(n, |i, j| num_complex::Complex64::new(f(i, j), 0.0))).expect("n >= 1")
}

/// Decides whether `cfg` is conditionally negative definite.
///
/// Coefficients stored in `cfg` are tried first; a positive quadratic form
/// there settles the question without an eigen-decomposition.
pub fn cnd_test(cfg: &KernelConfig) -> Result<CndVerdict> {
    let tol = cfg.tol_cnd();
    if let Some(c) = &cfg.coeffs {
        let q = quad_form(cfg, c)?;
        if q > tol {
            return Ok(CndVerdict {
                status: CndStatus::NotCnd,
                is_cnd: false,
                witness: Some(c.clone()),
                quad_form_value: q,
                max_centered_eigenvalue: f64::NAN,
                method: CndMethod::GivenWitness,
                tol_cnd: tol,
            });
        }
    }
    let m = cfg.m();
    if m <= 1 {
        return Ok(CndVerdict {
            status: CndStatus::Cnd,
            is_cnd: true,
            witness: None,
            quad_form_value: 0.0,
            max_centered_eigenvalue: 0.0,
            method: CndMethod::Eigen,
            tol_cnd: tol,
        });
    }
    let q = helmert_basis(m);
    // QᵀKQ
    let kq: Vec<Vec<f64>> =
        q.iter().map(|col| (0..m).map(|i| cfg.k[i].iter().zip(col).map(|(a, b)| a * b).sum()).collect()).collect();
    let restricted = real_symmetric(m - 1, |a, b| q[a].iter().zip(&kq[b]).map(|(x, y)| x * y).sum());
    let spec = restricted.spectral()?;
    let top = spec.max_eigenvalue();
    let status = if top <= tol {
        CndStatus::Cnd
    } else if top <= 100.0 * tol {
        CndStatus::Indeterminate
    } else {
        CndStatus::NotCnd
    };
    let witness = (status != CndStatus::Cnd).then(|| {
        (0..m).map(|i| (0..m - 1).map(|a| q[a][i] * spec.eigenvectors[(a, 0)].re).sum()).collect::<Vec<f64>>()
    });
    let quad_form_value = witness.as_ref().map_or(0.0, |w| raw_quad_form(&cfg.k, w));
    Ok(CndVerdict {
        status,
        is_cnd: status == CndStatus::Cnd,
        witness,
        quad_form_value,
        max_centered_eigenvalue: top,
        method: CndMethod::Eigen,
        tol_cnd: tol,
    })
}

/// `β` grid used when none is supplied: 20 log-spaced points in `[1e-4, 10]`.
pub fn default_betas() -> Vec<f64> {
    let (lo, hi) = (1e-4f64.ln(), 10f64.ln());
    (0..20).map(|i| (lo + (hi - lo) * i as f64 / 19.0).exp()).collect()
}

/// Minimum eigenvalue of the entrywise exponential `exp(−βK)` for each `β`.
pub fn schoenberg_test(cfg: &KernelConfig, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0)) {
        return Err(Error::DomainError(format!("β must be positive, got {b}")));
    }
    let m = cfg.m();
    betas
        .iter()
        .map(|&beta| {
            let g = real_symmetric(m, |i, j| (-beta * cfg.k[i][j]).exp());
            Ok((beta, g.spectral()?.min_eigenvalue()))
        })
        .collect()
}

/// Gram matrix `G_ij = ½(K_i0 + K_j0 − K_ij)` of the Hilbert embedding based
/// at `basepoint`. Fails with [`Error::NotCnd`] unless the kernel is CND.
pub fn embed_gram(cfg: &KernelConfig, basepoint: usize) -> Result<Vec<Vec<f64>>> {
    let m = cfg.m();
    if basepoint >= m {
        return Err(Error::InvalidKernel(format!("basepoint {basepoint} out of range for m = {m}")));
    }
    if !cnd_test(cfg)?.is_cnd {
        return Err(Error::NotCnd);
    }
    let k = &cfg.k;
    let g: Vec<Vec<f64>> =
        (0..m).map(|i| (0..m).map(|j| 0.5 * (k[i][basepoint] + k[j][basepoint] - k[i][j])).collect()).collect();
    let min_eig = real_symmetric(m, |i, j| g[i][j]).spectral()?.min_eigenvalue();
    if min_eig < -cfg.tol_cnd() {
        return Err(Error::NotCnd);
    }
    Ok(g)
}

/// `‖Φ(i) − Φ(j)‖² = G_ii + G_jj − 2G_ij`.
pub fn gram_distance_sq(g: &[Vec<f64>], i: usize, j: usize) -> f64 {
    g[i][i] + g[j][j] - 2.0 * g[i][j]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceMode {
    /// Squared trace-log distance `d_τ²`.
    SDiv,
    Qjsd,
}

/// Kernel of squared divergences over `points`.
pub fn build_divergence_kernel(points: &[HermitianMatrix], mode: DivergenceMode) -> Result<KernelConfig> {
    let m = points.len();
    let upper: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let values: Vec<f64> = upper
        .par_iter()
        .map(|&(i, j)| {
            let v = match mode {
                DivergenceMode::SDiv => d_tau_sq(&points[i], &points[j])?,
                DivergenceMode::Qjsd => qjsd(&points[i], &points[j])?,
            };
            Ok(v.squared)
        })
        .collect::<Result<_>>()?;
    let mut k = vec![vec![0.0; m]; m];
    for (&(i, j), &v) in upper.iter().zip(&values) {
        k[i][j] = v;
        k[j][i] = v;
    }
    KernelConfig::new(points.to_vec(), k, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockEmbedding {
    /// `X ⊕ I`.
    PadIdentity,
    /// `X/T ⊕ diag(1 − Tr X/T, 0, …, 0)`, a unit-trace state.
    PadZeroTrace(f64),
}

/// Embeds `X` into `n_target × n_target` matrices block-diagonally.
pub fn block_embed(x: &HermitianMatrix, n_target: usize, mode: BlockEmbedding) -> Result<HermitianMatrix> {
    let n = x.n();
    match mode {
        BlockEmbedding::PadIdentity => {
            if n_target < n {
                return Err(Error::DimensionError(format!("cannot embed {n}x{n} into {n_target}x{n_target}")));
            }
            if n_target == n {
                return Ok(x.clone());
            }
            Ok(x.direct_sum(&HermitianMatrix::identity(n_target - n)))
        }
        BlockEmbedding::PadZeroTrace(budget) => {
            if n_target <= n {
                return Err(Error::DimensionError(format!(
                    "zero-trace padding of {n}x{n} needs n_target > {n}, got {n_target}"
                )));
            }
            let trace = x.trace_tau() * n as f64;
            if !(budget > trace) {
                return Err(Error::TraceBudgetError { trace, budget });
            }
            let mut tail = vec![0.0; n_target - n];
            tail[0] = 1.0 - trace / budget;
            Ok(x.scale(1.0 / budget).direct_sum(&HermitianMatrix::diag(&tail)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness;

    fn euclidean(points: &[Vec<f64>]) -> KernelConfig {
        let k = points
            .iter()
            .map(|p| points.iter().map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()).collect())
            .collect();
        KernelConfig::from_kernel(k).unwrap()
    }

    #[test]
    fn helmert_is_orthonormal_and_centred() {
        let q = helmert_basis(6);
        for (a, qa) in q.iter().enumerate() {
            assert!(qa.iter().sum::<f64>().abs() < 1e-15);
            for (b, qb) in q.iter().enumerate() {
                let dot: f64 = qa.iter().zip(qb).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn euclidean_kernel_is_cnd() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 1.0], vec![-1.0, 4.0]];
        let v = cnd_test(&euclidean(&pts)).unwrap();
        assert_eq!(v.status, CndStatus::Cnd);
        assert!(v.witness.is_none());
    }

    #[test]
    fn two_points_always_cnd() {
        let cfg = KernelConfig::from_kernel(vec![vec![0.0, 3.5], vec![3.5, 0.0]]).unwrap();
        assert!(cnd_test(&cfg).unwrap().is_cnd);
    }

    #[test]
    fn non_cnd_kernel_gets_witness() {
        // K = −(squared distances) is CND only if it vanishes
        let cfg = KernelConfig::from_kernel(vec![vec![0.0, -1.0, -4.0], vec![-1.0, 0.0, -1.0], vec![-4.0, -1.0, 0.0]])
            .unwrap();
        let v = cnd_test(&cfg).unwrap();
        assert_eq!(v.status, CndStatus::NotCnd);
        let w = v.witness.unwrap();
        assert!(w.iter().sum::<f64>().abs() < 1e-14);
        assert!(v.quad_form_value > 0.0);
        assert!((v.quad_form_value - v.max_centered_eigenvalue).abs() < 1e-12);
    }

    #[test]
    fn qjsd_witness_kernel() {
        let cfg = build_divergence_kernel(&witness::matrices(), DivergenceMode::Qjsd).unwrap();
        let q = quad_form(&cfg, &witness::coeffs()).unwrap();
        assert!(q > 9.811351706 && q < 9.811351707, "{q}");
        let v = cnd_test(&cfg).unwrap();
        assert_eq!(v.status, CndStatus::NotCnd);
        let v = cnd_test(&cfg.clone().with_coeffs(witness::coeffs()).unwrap()).unwrap();
        assert_eq!(v.method, CndMethod::GivenWitness);
    }

    #[test]
    fn density_witness_kernel() {
        let cfg = build_divergence_kernel(&witness::density_matrices(), DivergenceMode::Qjsd).unwrap();
        let q = quad_form(&cfg, &witness::coeffs()).unwrap();
        assert!(q > 0.16012057450 && q < 0.16012057451, "{q}");
    }

    #[test]
    fn quad_form_requires_zero_sum() {
        let cfg = KernelConfig::from_kernel(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(quad_form(&cfg, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(quad_form(&cfg, &[1.0, 0.0]), Err(Error::CoeffSumNonzero(_))));
    }

    #[test]
    fn invalid_kernels_rejected() {
        let err = KernelConfig::from_kernel(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidKernel(_)));
        let err = KernelConfig::from_kernel(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidKernel(_)));
    }

    #[test]
    fn schoenberg_examples() {
        let cfg = euclidean(&[vec![0.0], vec![1.0], vec![2.5], vec![-3.0]]);
        for (_, e) in schoenberg_test(&cfg, &default_betas()).unwrap() {
            assert!(e >= -cfg.tol_cnd());
        }
        let single = KernelConfig::from_kernel(vec![vec![0.0]]).unwrap();
        for (_, e) in schoenberg_test(&single, &[1e-3, 1.0, 5.0]).unwrap() {
            assert_eq!(e, 1.0);
        }
    }

    #[test]
    fn embedding_of_collinear_points() {
        let cfg = euclidean(&[vec![0.0], vec![1.0], vec![3.0]]);
        let g = embed_gram(&cfg, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((gram_distance_sq(&g, i, j) - cfg.kernel()[i][j]).abs() < 1e-12);
            }
        }
        let ev = real_symmetric(3, |i, j| g[i][j]).eigenvalues().unwrap();
        assert!(ev[1].abs() < 1e-12 && ev[2].abs() < 1e-12);
    }

    #[test]
    fn zero_kernel_embeds_to_zero() {
        let cfg = KernelConfig::from_kernel(vec![vec![0.0; 3]; 3]).unwrap();
        let g = embed_gram(&cfg, 1).unwrap();
        assert!(g.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn embed_rejects_non_cnd() {
        let cfg = build_divergence_kernel(&witness::matrices(), DivergenceMode::Qjsd).unwrap();
        assert_eq!(embed_gram(&cfg, 0).unwrap_err(), Error::NotCnd);
    }

    #[test]
    fn block_embedding_shapes() {
        let x = witness::matrices()[0].clone();
        assert_eq!(block_embed(&x, 2, BlockEmbedding::PadIdentity).unwrap(), x);
        let rho = block_embed(&x, 3, BlockEmbedding::PadZeroTrace(40.0)).unwrap();
        assert!((rho.trace_tau() * 3.0 - 1.0).abs() < 1e-15);
        assert!((rho.get(2, 2).re - 37.0 / 40.0).abs() < 1e-15);
        assert!(matches!(block_embed(&x, 1, BlockEmbedding::PadIdentity), Err(Error::DimensionError(_))));
        assert!(matches!(block_embed(&x, 3, BlockEmbedding::PadZeroTrace(2.0)), Err(Error::TraceBudgetError { .. })));
    }

    #[test]
    fn single_point_kernel() {
        let cfg = build_divergence_kernel(&witness::matrices()[..1], DivergenceMode::SDiv).unwrap();
        assert_eq!(cfg.kernel(), &[vec![0.0]]);
    }
}
