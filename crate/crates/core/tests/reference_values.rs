//! Divergence values frozen from 40-digit evaluations of the spectral
//! formulas (eigenvalues computed in extended precision).

use num_complex::Complex64;
use qdiv::divergence::{d_tau_shifted_sq, d_tau_sq, jensen_f, qjsd, qjsd_by_integral, shifted_tail_constant};
use qdiv::{witness, HermitianMatrix, JensenGenerator, Matrix};

fn rows(r: &[&[f64]]) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn complex_pair() -> (HermitianMatrix, HermitianMatrix) {
    let c = |re, im| Complex64::new(re, im);
    let a = Matrix::from_fn(2, |i, j| [[c(2.0, 0.0), c(1.0, 1.0)], [c(1.0, -1.0), c(3.0, 0.0)]][i][j]);
    let b = Matrix::from_fn(2, |i, j| [[c(1.0, 0.0), c(0.0, 0.5)], [c(0.0, -0.5), c(1.0, 0.0)]][i][j]);
    (HermitianMatrix::new(a).unwrap(), HermitianMatrix::new(b).unwrap())
}

fn three_by_three() -> (HermitianMatrix, HermitianMatrix) {
    (
        rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]),
        rows(&[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 3.0]]),
    )
}

fn assert_rel(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got:.17e}, want {want:.17e}");
}

#[test]
fn trace_log_distance_on_example_matrices() {
    let x = witness::matrices();
    assert_rel(d_tau_sq(&x[0], &x[1]).unwrap().squared, 0.18696802006229796496, 1e-13);
    assert_rel(d_tau_sq(&x[3], &x[4]).unwrap().squared, 0.18846651660250198704, 1e-13);
}

#[test]
fn qjsd_on_example_matrices() {
    let x = witness::matrices();
    assert_rel(qjsd(&x[0], &x[1]).unwrap().squared, 0.63172622344723861820, 1e-13);
    assert_rel(qjsd(&x[3], &x[4]).unwrap().squared, 0.30826367360991322119, 1e-13);
}

#[test]
fn complex_hermitian_pair() {
    let (a, b) = complex_pair();
    assert_rel(d_tau_sq(&a, &b).unwrap().squared, 0.11672659745778879817, 1e-13);
    assert_rel(qjsd(&a, &b).unwrap().squared, 0.20885305119927522371, 1e-13);
}

#[test]
fn non_commuting_three_by_three() {
    let (p, q) = three_by_three();
    assert_rel(d_tau_sq(&p, &q).unwrap().squared, 0.078911639537036964046, 1e-13);
    assert_rel(qjsd(&p, &q).unwrap().squared, 0.19093968602104921545, 1e-13);
}

#[test]
fn shifted_distance_values() {
    let x = witness::matrices();
    assert_rel(d_tau_shifted_sq(&x[0], &x[1], 1.0).unwrap().squared, 0.091946218618365499252, 1e-13);
    assert_rel(d_tau_shifted_sq(&x[0], &x[1], 10.0).unwrap().squared, 0.013173658677528662218, 1e-13);
}

#[test]
fn scalar_reduction() {
    // ln 5 − ½ln 2 − ½ln 8 = ln(5/4)
    let v = d_tau_sq(&HermitianMatrix::scalar(2.0), &HermitianMatrix::scalar(8.0)).unwrap();
    assert_rel(v.squared, 0.22314355131420975577, 1e-15);
}

#[test]
fn integral_matches_closed_form_on_references() {
    let x = witness::matrices();
    let j = qjsd_by_integral(&x[0], &x[1], 1e-8).unwrap();
    assert_rel(j, 0.63172622344723861820, 1e-8);
    let (a, b) = complex_pair();
    assert_rel(qjsd_by_integral(&a, &b, 1e-8).unwrap(), 0.20885305119927522371, 1e-8);
}

#[test]
fn tail_constant_is_an_eighth_of_the_squared_distance() {
    let (p, q) = three_by_three();
    let expect = p.sub(&q).unwrap().norm_2_tau_sq() / 8.0;
    assert_rel(shifted_tail_constant(&p, &q).unwrap(), expect, 1e-12);
}

#[test]
fn square_generator_gives_a_quarter_squared_distance() {
    let a = HermitianMatrix::diag(&[1.0, 0.0]);
    let b = HermitianMatrix::diag(&[0.0, 1.0]);
    let j = jensen_f(&a, &b, &JensenGenerator::square()).unwrap();
    assert_rel(j.squared, 0.25, 1e-15);
}

#[test]
fn identical_inputs_are_at_distance_zero() {
    let (a, _) = complex_pair();
    assert_eq!(d_tau_sq(&a, &a).unwrap().squared, 0.0);
    assert_eq!(qjsd(&a, &a).unwrap().squared, 0.0);
}
