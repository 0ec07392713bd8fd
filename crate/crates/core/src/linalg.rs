//! Dense Hermitian linear algebra.
//!
//! Matrices are small (desk scale, `n ≤ 64`) and stored densely in row-major
//! order. Eigen-decompositions use the cyclic Jacobi method for complex
//! Hermitian matrices, which is slow for large `n` but accurate to a few ulps
//! of `‖M‖` and needs nothing beyond complex arithmetic.
//!
//! Eigenvalues are always returned in descending order. For a matrix with the
//! normalized trace `τ = (1/n)·Tr`, the `k`-th eigenvalue is the value of the
//! decreasing rearrangement `μ_t` on the panel `t ∈ ((k−1)/n, k/n]`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::{Error, Result};

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Largest dimension the crate is tuned for.
pub const MAX_DIM: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A general dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from real rows. Fails unless the rows form a square.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionError("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(n, bad.len()));
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dims(self.n, other.n)?;
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        check_dims(self.n, other.n)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        check_dims(self.n, other.n)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6e}", z.re)
                    } else {
                        format!("{:.6e}{:+.6e}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Dense complex Hermitian matrix.
///
/// Construction symmetrizes the input (`M ← (M + M*)/2`), so the stored
/// entries are exactly Hermitian.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.n == 0 {
            return Err(Error::DimensionError("n must be at least 1".into()));
        }
        let n = m.n;
        let sym = Matrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(Self(sym))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self(Matrix::from_fn(n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO }))
    }

    /// The 1×1 matrix `[x]`.
    pub fn scalar(x: f64) -> Self {
        Self::diag(&[x])
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Normalized trace `τ(M) = (1/n)·Re Tr M`.
    pub fn trace_tau(&self) -> f64 {
        self.0.trace().re / self.n() as f64
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(Self(self.0.sub(&other.0)?))
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        Self(self.0.scale(c))
    }

    /// `M + t·I`.
    pub fn shift(&self, t: f64) -> HermitianMatrix {
        let mut m = self.0.clone();
        for i in 0..m.n {
            m[(i, i)] += t;
        }
        Self(m)
    }

    /// `(A + B)/2`.
    pub fn midpoint(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_dims(self.n(), other.n())?;
        Ok(Self(self.0.zip_with(&other.0, |a, b| (a + b) * 0.5)))
    }

    /// `S* M S` for an arbitrary square `S`.
    pub fn congruence(&self, s: &Matrix) -> Result<HermitianMatrix> {
        let inner = self.0.matmul(s)?;
        Self::new(s.adjoint().matmul(&inner)?)
    }

    /// Block-diagonal direct sum `M ⊕ other`.
    pub fn direct_sum(&self, other: &HermitianMatrix) -> HermitianMatrix {
        let (n, m) = (self.n(), other.n());
        Self(Matrix::from_fn(n + m, |i, j| match (i < n, j < n) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - n, j - n),
            _ => ZERO,
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn inf_norm(&self) -> f64 {
        self.0.inf_norm()
    }

    /// Squared normalized Hilbert–Schmidt norm `‖M‖²_{2,τ} = τ(M*M)`.
    pub fn norm_2_tau_sq(&self) -> f64 {
        let f = self.frobenius_norm();
        f * f / self.n() as f64
    }

    /// Positivity tolerance `1e-10 · n · ‖M‖_∞`.
    pub fn tol_psd(&self) -> f64 {
        1e-10 * self.n() as f64 * self.inf_norm()
    }

    pub fn is_real(&self) -> bool {
        self.0.data.iter().all(|z| z.im == 0.0)
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        jacobi_eigen(&self.0)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectral()?.eigenvalues)
    }

    pub fn positivity(&self) -> Result<PositivityClass> {
        let spec = self.spectral()?;
        Ok(PositivityClass::classify(spec.min_eigenvalue(), self.tol_psd()))
    }

    /// Eigen-decomposition after checking `M` is positive definite.
    pub fn spectral_pd(&self) -> Result<SpectralDecomposition> {
        let spec = self.spectral()?;
        let min = spec.min_eigenvalue();
        match PositivityClass::classify(min, self.tol_psd()) {
            PositivityClass::PositiveDefinite(_) => Ok(spec),
            _ => Err(Error::NotPositiveDefinite { min_eig: min }),
        }
    }

    /// Eigen-decomposition after checking `M` is positive semidefinite, with
    /// eigenvalues in `(−tol_psd, 0)` clamped to zero.
    pub fn spectral_psd(&self) -> Result<SpectralDecomposition> {
        let mut spec = self.spectral()?;
        let min = spec.min_eigenvalue();
        if let PositivityClass::Indefinite(_) = PositivityClass::classify(min, self.tol_psd()) {
            return Err(Error::NotPositiveSemidefinite { min_eig: min });
        }
        for l in &mut spec.eigenvalues {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        Ok(spec)
    }

    /// Spectral functional calculus `U f(Λ) U*`.
    ///
    /// Eigenvalues in `(−tol_psd, 0)` are clamped to zero first. The domain of
    /// `f` is probed by the result: a non-finite `f(λ)` is a domain error.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let mut spec = self.spectral()?;
        spec.clamp_small_negatives(self.tol_psd());
        spec.map(f)
    }

    /// `det M` as the product of eigenvalues.
    pub fn det(&self) -> Result<f64> {
        Ok(self.spectral()?.eigenvalues.iter().product())
    }

    /// Matrix geometric mean `A#B = A^{1/2}(A^{-1/2} B A^{-1/2})^{1/2}A^{1/2}`.
    pub fn geometric_mean(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_dims(self.n(), other.n())?;
        let sa = self.spectral_pd()?;
        other.spectral_pd()?;
        let half = sa.map(f64::sqrt)?;
        let neg_half = sa.map(|x| 1.0 / x.sqrt())?;
        let inner = other.congruence(neg_half.as_matrix())?;
        let inner_root = inner.apply_function(f64::sqrt)?;
        inner_root.congruence(half.as_matrix())
    }

    /// Parses the matrix JSON format `{"n": int, "re": [[...]], "im": [[...]]}`.
    ///
    /// Entries may be plain numbers or exact rationals `{"num": int, "den": int}`
    /// (converted to the nearest double here).
    pub fn from_json(value: &Value) -> Result<Self> {
        let n = value
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("matrix needs integer field \"n\"".into()))? as usize;
        if n == 0 {
            return Err(Error::Parse("matrix dimension must be positive".into()));
        }
        let re = parse_rows(value.get("re").ok_or_else(|| Error::Parse("missing \"re\"".into()))?, n)?;
        let im = match value.get("im") {
            Some(v) if !v.is_null() => parse_rows(v, n)?,
            _ => vec![vec![0.0; n]; n],
        };
        Self::new(Matrix::from_fn(n, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn to_json(&self) -> Value {
        let n = self.n();
        let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).re).collect()).collect();
        if self.is_real() {
            json!({ "n": n, "re": re })
        } else {
            let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).im).collect()).collect();
            json!({ "n": n, "re": re, "im": im })
        }
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian")?;
        self.0.fmt(f)
    }
}

fn parse_rows(v: &Value, n: usize) -> Result<Vec<Vec<f64>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix rows must be an array".into()))?;
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .map(|row| {
            let row = row.as_array().ok_or_else(|| Error::Parse("row must be an array".into()))?;
            if row.len() != n {
                return Err(Error::Parse(format!("expected {n} columns, found {}", row.len())));
            }
            row.iter().map(entry_to_f64).collect()
        })
        .collect()
}

/// A JSON matrix entry as a double: either a number or `{"num", "den"}`.
pub fn entry_to_f64(v: &Value) -> Result<f64> {
    if let Some(x) = v.as_f64() {
        return Ok(x);
    }
    let num = v.get("num").and_then(Value::as_i64);
    let den = v.get("den").and_then(Value::as_i64);
    match (num, den) {
        (Some(_), Some(0)) => Err(Error::Parse("zero denominator".into())),
        (Some(p), Some(q)) => Ok(p as f64 / q as f64),
        _ => Err(Error::Parse(format!("bad matrix entry {v}"))),
    }
}

/// Classification of a Hermitian matrix by its smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositivityClass {
    PositiveDefinite(f64),
    PositiveSemidefinite(f64),
    Indefinite(f64),
}

impl PositivityClass {
    pub fn classify(min_eig: f64, tol_psd: f64) -> Self {
        if min_eig > tol_psd {
            Self::PositiveDefinite(min_eig)
        } else if min_eig >= -tol_psd {
            Self::PositiveSemidefinite(min_eig)
        } else {
            Self::Indefinite(min_eig)
        }
    }

    pub fn min_eig(&self) -> f64 {
        match *self {
            Self::PositiveDefinite(x) | Self::PositiveSemidefinite(x) | Self::Indefinite(x) => x,
        }
    }

    pub fn is_psd(&self) -> bool {
        !matches!(self, Self::Indefinite(_))
    }
}

/// `M = U Λ U*` with eigenvalues sorted descending and `U` unitary.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Reconstruction tolerance `1e-10 · n · max|λ|`.
    pub fn tol_recon(&self) -> f64 {
        let max_abs = self.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        1e-10 * self.n() as f64 * max_abs
    }

    pub fn clamp_small_negatives(&mut self, tol_psd: f64) {
        for l in &mut self.eigenvalues {
            if *l < 0.0 && *l > -tol_psd {
                *l = 0.0;
            }
        }
    }

    /// `U f(Λ) U*`; fails when some `f(λ)` is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| {
                let v = f(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::DomainError(format!("f({l:e}) = {v}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let n = self.n();
        let u = &self.eigenvectors;
        let m = Matrix::from_fn(n, |i, j| {
            let mut acc = ZERO;
            for (k, &v) in values.iter().enumerate() {
                acc += u[(i, k)] * u[(j, k)].conj() * v;
            }
            acc
        });
        HermitianMatrix::new(m)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x).expect("identity map is total on finite eigenvalues")
    }

    /// `τ f(M) = (1/n) Σ f(λ_k)`, skipping the eigenvectors.
    pub fn trace_tau_of(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for &l in &self.eigenvalues {
            let v = f(l);
            if !v.is_finite() {
                return Err(Error::DomainError(format!("f({l:e}) = {v}")));
            }
            acc += v;
        }
        Ok(acc / self.n() as f64)
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
fn jacobi_eigen(input: &Matrix) -> Result<SpectralDecomposition> {
    let n = input.n;
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = 4.0 * f64::EPSILON * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if !(off <= threshold || off == 0.0) {
            return Err(Error::EigFailure { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// With `a_pq = r·e^{iφ}` the rotation is `G = D·R`, where `D` removes the
/// phase on coordinate `q` and `R` is the real rotation for the resulting
/// real symmetric 2×2 pivot block.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.n;
    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
