//! Seeded random instances for the property suites.
//!
//! Everything is driven by a ChaCha8 stream, so a seed fully determines the
//! generated matrices on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{HermitianMatrix, Matrix};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn seeded(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// `exp(U[ln lo, ln hi])`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// Hermitian matrix with entries bounded by `bound` in modulus.
    pub fn hermitian(&mut self, n: usize, bound: f64) -> HermitianMatrix {
        let b = bound / std::f64::consts::SQRT_2;
        let m = Matrix::from_fn(n, |_, _| Complex64::new(self.rng.gen_range(-b..b), self.rng.gen_range(-b..b)));
        HermitianMatrix::new(m).expect("n >= 1")
    }

    /// Haar-ish unitary from the eigenvectors of a random Hermitian matrix.
    pub fn unitary(&mut self, n: usize) -> Matrix {
        self.hermitian(n, 1.0).spectral().expect("Jacobi converges").eigenvectors
    }

    /// `U diag(λ) U*` for a random unitary `U`.
    pub fn with_spectrum(&mut self, eigenvalues: &[f64]) -> HermitianMatrix {
        let u = self.unitary(eigenvalues.len());
        HermitianMatrix::diag(eigenvalues).congruence(&u.adjoint()).expect("square")
    }

    /// Positive definite matrix with spectrum log-uniform in `[lo, hi]`.
    pub fn positive_definite(&mut self, n: usize, lo: f64, hi: f64) -> HermitianMatrix {
        let ev: Vec<f64> = (0..n).map(|_| self.log_uniform(lo, hi)).collect();
        self.with_spectrum(&ev)
    }

    /// Default PD sampler used by the suites: spectrum in `[1e-2, 1e2]`.
    pub fn pd(&mut self, n: usize) -> HermitianMatrix {
        self.positive_definite(n, 1e-2, 1e2)
    }

    /// PSD matrix whose last `zeros` eigenvalues vanish exactly before rotation.
    pub fn psd_with_kernel(&mut self, n: usize, zeros: usize) -> HermitianMatrix {
        let ev: Vec<f64> = (0..n).map(|k| if k + zeros >= n { 0.0 } else { self.log_uniform(1e-2, 1e2) }).collect();
        self.with_spectrum(&ev)
    }

    /// PSD matrix that is rank deficient about half the time.
    pub fn psd(&mut self, n: usize) -> HermitianMatrix {
        let zeros = if self.rng.gen_bool(0.5) { self.index(n) } else { 0 };
        self.psd_with_kernel(n, zeros)
    }

    /// Unit-trace PSD matrix.
    pub fn density(&mut self, n: usize) -> HermitianMatrix {
        let m = self.psd(n);
        let tr = m.trace_tau() * n as f64;
        m.scale(1.0 / tr)
    }

    /// Invertible matrix with condition number at most `max_cond`.
    pub fn invertible(&mut self, n: usize, max_cond: f64) -> Matrix {
        let half = max_cond.sqrt();
        let u = self.unitary(n);
        let w = self.unitary(n);
        let sigma: Vec<f64> = (0..n).map(|_| self.log_uniform(1.0 / half, half)).collect();
        let d =
            Matrix::from_fn(n, |i, j| if i == j { Complex64::new(sigma[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        u.matmul(&d).and_then(|ud| ud.matmul(&w)).expect("square")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = Sampler::seeded(3).pd(4);
        let b = Sampler::seeded(3).pd(4);
        assert_eq!(a, b);
    }

    #[test]
    fn pd_sampler_spectrum_in_range() {
        let mut s = Sampler::seeded(11);
        for _ in 0..20 {
            let ev = s.pd(5).eigenvalues().unwrap();
            assert!(ev.iter().all(|&l| l > 1e-2 * 0.999 && l < 1e2 * 1.001));
        }
    }

    #[test]
    fn density_has_unit_trace() {
        let mut s = Sampler::seeded(5);
        let d = s.density(3);
        assert!((d.trace_tau() * 3.0 - 1.0).abs() < 1e-14);
    }
}
