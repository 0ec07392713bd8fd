//! A fixed five-point configuration on which the QJSD kernel fails to be
//! conditionally negative definite.
//!
//! The points are 2×2 real symmetric integer matrices `[[a, b], [b, d]]`,
//! and the coefficients are integers summing to zero. Embedding each point as
//! the density matrix `X/T ⊕ (1 − Tr X/T)` with `T = 40` carries the violation
//! over to unit-trace 3×3 states.

use crate::linalg::HermitianMatrix;

/// `(a, b, d)` for each point.
pub const MATRICES: [(i64, i64, i64); 5] = [(2, 1, 1), (9, 2, 1), (2, 1, 7), (8, 5, 8), (8, 8, 9)];

/// Expected determinants `ad − b²`.
pub const DETERMINANTS: [i64; 5] = [1, 5, 13, 39, 8];

pub const COEFFS: [i64; 5] = [-10, 10, 10, -20, 10];

/// Trace budget for the density-matrix embedding.
pub const DENSITY_BUDGET: i64 = 40;

pub fn matrices() -> Vec<HermitianMatrix> {
    MATRICES
        .iter()
        .map(|&(a, b, d)| {
            HermitianMatrix::from_real_rows(&[vec![a as f64, b as f64], vec![b as f64, d as f64]]).expect("2x2 rows")
        })
        .collect()
}

pub fn coeffs() -> Vec<f64> {
    COEFFS.iter().map(|&c| c as f64).collect()
}

/// `X/T ⊕ (1 − Tr X/T)` for every point, as 3×3 density matrices.
pub fn density_matrices() -> Vec<HermitianMatrix> {
    let t = DENSITY_BUDGET as f64;
    matrices()
        .into_iter()
        .map(|x| {
            let tail = 1.0 - x.trace_tau() * 2.0 / t;
            x.scale(1.0 / t).direct_sum(&HermitianMatrix::scalar(tail))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_sum_to_zero() {
        assert_eq!(COEFFS.iter().sum::<i64>(), 0);
    }

    #[test]
    fn integer_determinants() {
        let dets: Vec<i64> = MATRICES.iter().map(|&(a, b, d)| a * d - b * b).collect();
        assert_eq!(dets, DETERMINANTS);
    }

    #[test]
    fn budget_exceeds_traces() {
        assert!(MATRICES.iter().all(|&(a, _, d)| a + d < DENSITY_BUDGET));
        for rho in density_matrices() {
            assert!((rho.trace_tau() * 3.0 - 1.0).abs() < 1e-15);
        }
    }
}
