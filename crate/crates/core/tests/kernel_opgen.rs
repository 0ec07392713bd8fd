use serde_json::json;

use qdiv::divergence::{qjsd, MetricMode};
use qdiv::kernel::{self, CndStatus, DivergenceMode, KernelConfig};
use qdiv::opgen::{self, GeneratorSpec};
use qdiv::random::Sampler;
use qdiv::rearrange;
use qdiv::verify::{self, Suite, Tolerances};
use qdiv::{witness, Error, HermitianMatrix};

#[test]
fn pure_quadratic_decomposes_to_an_eighth_squared_distance() {
    let mut s = Sampler::seeded(1);
    let (a, b) = (s.pd(3), s.psd(3));
    let g = opgen::lookup("half_square").unwrap();
    let d = opgen::decomposition_check(&a, &b, &g).unwrap();
    let expect = a.sub(&b).unwrap().norm_2_tau_sq() / 8.0;
    assert!((d.direct - expect).abs() < 1e-12 * (1.0 + expect));
    assert!((d.decomposed - expect).abs() < 1e-12 * (1.0 + expect));
}

#[test]
fn single_atom_on_positive_definite_pair() {
    let mut s = Sampler::seeded(2);
    let g = GeneratorSpec::new("atom", 0.0, vec![(1.0, 1.0)], "test").unwrap();
    for _ in 0..20 {
        let (a, b) = (s.pd(3), s.pd(3));
        assert!(opgen::decomposition_check(&a, &b, &g).unwrap().holds());
    }
}

#[test]
fn mixed_generator_on_semidefinite_pair() {
    let mut s = Sampler::seeded(3);
    let g = GeneratorSpec::new("mixed", 0.5, vec![(0.5, 2.0), (3.0, 1.0)], "test").unwrap();
    for _ in 0..20 {
        let (a, b) = (s.psd_with_kernel(4, 1), s.psd_with_kernel(4, 2));
        let d = opgen::decomposition_check(&a, &b, &g).unwrap();
        assert!(d.holds(), "direct {} decomposed {}", d.direct, d.decomposed);
    }
}

#[test]
fn entropy_gap_matches_qjsd_but_has_no_discrete_decomposition() {
    let x = witness::matrices();
    let g = opgen::lookup("eta").unwrap();
    let direct = opgen::jensen_gap_direct(&x[0], &x[1], &g).unwrap();
    assert!((direct - qjsd(&x[0], &x[1]).unwrap().squared).abs() < 1e-13);
    assert!(matches!(opgen::decomposition_check(&x[0], &x[1], &g), Err(Error::InvalidGenerator(_))));
}

#[test]
fn affine_generators_are_rejected() {
    assert!(matches!(GeneratorSpec::new("affine", 0.0, vec![], "test"), Err(Error::InvalidGenerator(_))));
    assert!(GeneratorSpec::from_json(&json!({"b": 0.0, "atoms": [[1.0]]})).is_err());
    assert!(GeneratorSpec::from_json(&json!({"b": -1.0})).is_err());
}

#[test]
fn generator_json_round_trip() {
    for g in opgen::registry() {
        let back = GeneratorSpec::from_json(&g.to_json()).unwrap();
        assert_eq!((back.name.as_str(), back.b, &back.atoms), (g.name.as_str(), g.b, &g.atoms));
    }
}

#[test]
fn generator_metrics_have_no_violations() {
    let mut s = Sampler::seeded(4);
    let same = vec![s.pd(3); 4];
    let g = opgen::lookup("k1").unwrap();
    assert!(opgen::metric_from_generator(&same, &g).unwrap().is_clean());
    let points: Vec<HermitianMatrix> = (0..12).map(|_| s.psd(3)).collect();
    assert!(opgen::metric_from_generator(&points, &g).unwrap().is_clean());
    let states: Vec<HermitianMatrix> = (0..12).map(|_| s.density(3)).collect();
    let report = opgen::metric_from_generator(&states, &GeneratorSpec::entropy()).unwrap();
    assert!(report.is_clean(), "{report:?}");
}

#[test]
fn metric_suite_on_example_points() {
    let report = qdiv::divergence::metric_suite(&witness::matrices(), &MetricMode::TraceLog, 9).unwrap();
    assert!(report.is_clean());
    // unordered endpoint pairs times a distinct middle point
    assert_eq!(report.triangles_checked, 10 * 3);
}

#[test]
fn example_kernel_is_not_cnd_and_witness_is_positive() {
    let cfg = kernel::build_divergence_kernel(&witness::matrices(), DivergenceMode::Qjsd)
        .unwrap()
        .with_coeffs(witness::coeffs())
        .unwrap();
    let v = kernel::cnd_test(&cfg).unwrap();
    assert_eq!(v.status, CndStatus::NotCnd);
    // the quadratic form over the example coefficients is the S₂ value
    assert!((v.quad_form_value - 9.811_351_706_195_174).abs() < 1e-9);
    assert!(matches!(kernel::embed_gram(&cfg, 0), Err(Error::NotCnd)));
}

#[test]
fn trace_log_kernel_on_example_points_fails_eigen_test() {
    let cfg = kernel::build_divergence_kernel(&witness::matrices(), DivergenceMode::SDiv).unwrap();
    let v = kernel::cnd_test(&cfg).unwrap();
    if let Some(w) = &v.witness {
        assert!(w.iter().sum::<f64>().abs() < 1e-12);
        assert!((kernel::quad_form(&cfg, w).unwrap() - v.quad_form_value).abs() < 1e-12);
    }
}

#[test]
fn kernel_validation() {
    let bad_diag = json!({"K": [[0.5, 1.0], [1.0, 0.0]]});
    assert!(matches!(KernelConfig::from_json(&bad_diag), Err(Error::InvalidKernel(_))));
    let asym = json!({"K": [[0.0, 1.0], [2.0, 0.0]]});
    assert!(matches!(KernelConfig::from_json(&asym), Err(Error::InvalidKernel(_))));
    let coeffs = json!({"K": [[0.0, 1.0], [1.0, 0.0]], "coeffs": [1.0, 1.0]});
    assert!(matches!(KernelConfig::from_json(&coeffs), Err(Error::CoeffSumNonzero(_))));
    assert!(matches!(KernelConfig::from_json(&json!({"K": "no"})), Err(Error::Parse(_))));
}

#[test]
fn euclidean_kernel_round_trips_through_gram() {
    let pts: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]];
    let k: Vec<Vec<f64>> =
        pts.iter().map(|p| pts.iter().map(|q| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).collect()).collect();
    let cfg = KernelConfig::from_kernel(k.clone()).unwrap();
    assert!(kernel::cnd_test(&cfg).unwrap().is_cnd);
    let g = kernel::embed_gram(&cfg, 2).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!((kernel::gram_distance_sq(&g, i, j) - k[i][j]).abs() < 1e-12);
        }
    }
    // Schoenberg: exp(−βK) stays PSD
    for (_, e) in kernel::schoenberg_test(&cfg, &kernel::default_betas()).unwrap() {
        assert!(e > -1e-12);
    }
}

#[test]
fn trace_formula_and_profile() {
    let a = HermitianMatrix::diag(&[3.0, 1.0, 2.0]);
    let p = rearrange::profile(&a).unwrap();
    assert_eq!(p.values, vec![3.0, 2.0, 1.0]);
    assert_eq!(p.at(0.2), Some(3.0));
    assert_eq!(p.at(1.0 / 3.0), Some(3.0));
    assert_eq!(p.at(0.5), Some(2.0));
    assert_eq!(p.at(0.0), None);
    let id = rearrange::trace_formula_check(&a, |x| x * x).unwrap();
    assert!(id.gap() < 1e-13 && (id.rhs - 14.0 / 3.0).abs() < 1e-13);
}

#[test]
fn replays_survive_a_json_round_trip() {
    let tol = Tolerances { triangle: -1.0, ..Tolerances::default() };
    let report = verify::run_suite(Suite::Metric, 5, 4, &tol).unwrap();
    assert!(!report.passed);
    for r in &report.replays {
        let text = serde_json::to_string(r).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(verify::replay(&v, &tol).unwrap().failed);
        assert!(!verify::replay(&v, &Tolerances::default()).unwrap().failed);
    }
}

#[test]
fn every_suite_is_reproducible() {
    let tol = Tolerances::default();
    for suite in Suite::ALL {
        let a = serde_json::to_vec(&verify::run_suite(suite, 99, 3, &tol).unwrap().to_json()).unwrap();
        let b = serde_json::to_vec(&verify::run_suite(suite, 99, 3, &tol).unwrap().to_json()).unwrap();
        assert_eq!(a, b, "{}", suite.name());
    }
}
