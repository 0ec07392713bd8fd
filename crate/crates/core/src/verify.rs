//! Seeded randomized property suites.
//!
//! A suite first draws all of its instances from one seeded stream, then
//! evaluates them in parallel and folds the outcomes in draw order. Reports
//! therefore depend only on `(suite, seed, trials, tolerances)`.
//!
//! Every instance is self-describing (check name, matrices, parameters), so a
//! failing one can be written out and re-run with [`replay`] without the RNG.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::divergence::{self, MetricMode};
use crate::kernel::{self, BlockEmbedding, CndStatus, DivergenceMode, KernelConfig};
use crate::linalg::HermitianMatrix;
use crate::opgen::{self, GeneratorSpec};
use crate::random::Sampler;
use crate::rearrange::{self, ConvexIncreasing};
use crate::scalar;
use crate::witness;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Metric,
    Rearrange,
    Integral,
    Schoenberg,
    Decomposition,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Metric, Suite::Rearrange, Suite::Integral, Suite::Schoenberg, Suite::Decomposition];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Rearrange => "rearrange",
            Suite::Integral => "integral",
            Suite::Schoenberg => "schoenberg",
            Suite::Decomposition => "decomposition",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn default_trials(&self) -> usize {
        match self {
            Suite::Metric => 200,
            Suite::Rearrange => 500,
            Suite::Integral => 20,
            Suite::Schoenberg => 50,
            Suite::Decomposition => 100,
        }
    }
}

/// Thresholds used by the suites; every field is surfaced as a CLI flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Triangle-inequality slack.
    pub triangle: f64,
    /// Slack for one-sided rearrangement bounds.
    pub bound: f64,
    /// Absolute slack for trace identities, scaled by `1 + |value|`.
    pub identity: f64,
    /// Relative error allowed between the QJSD integral and its closed form.
    pub integral_rel: f64,
    /// Target relative accuracy passed to the quadrature.
    pub quad_rel: f64,
    /// Relative error allowed in the finite-difference derivative check.
    pub derivative_rel: f64,
    /// Relative error allowed between scalar quadrature and closed form.
    pub scalar_rel: f64,
    /// Slack for the Jensen-gap decomposition, scaled by `1 + |direct|`.
    pub decomposition: f64,
    /// Slack for the block-embedding scaling laws, scaled by `1 + |J|`.
    pub embedding: f64,
    /// Slack for Gram-embedding round trips, scaled by `1 + max K`.
    pub gram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            triangle: divergence::TOL_TRI,
            bound: rearrange::TOL_BOUND,
            identity: 1e-10,
            integral_rel: 1e-5,
            quad_rel: 1e-7,
            derivative_rel: 1e-4,
            scalar_rel: 1e-8,
            decomposition: opgen::TOL_DECOMP,
            embedding: 1e-12,
            gram: 1e-10,
        }
    }
}

/// One evaluable check: what to run and on what.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub check: String,
    pub matrices: Vec<HermitianMatrix>,
    pub params: Value,
}

impl Instance {
    fn new(check: &str, matrices: Vec<HermitianMatrix>, params: Value) -> Self {
        Self { check: check.into(), matrices, params }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "matrices": self.matrices.iter().map(HermitianMatrix::to_json).collect::<Vec<_>>(),
            "params": self.params,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let check = v
            .get("check")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("replay instance needs a \"check\" string".into()))?;
        let matrices = match v.get("matrices") {
            None => vec![],
            Some(m) => m
                .as_array()
                .ok_or_else(|| Error::Parse("\"matrices\" must be an array".into()))?
                .iter()
                .map(HermitianMatrix::from_json)
                .collect::<Result<_>>()?,
        };
        Ok(Self::new(check, matrices, v.get("params").cloned().unwrap_or(Value::Null)))
    }
}

/// Result of evaluating one instance.
///
/// `excess` is the check's violation measure (a signed margin for
/// inequalities, an error for identities); the instance fails when it exceeds
/// `tolerance` or when a qualitative condition (such as a CND verdict) is not
/// met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub excess: f64,
    pub tolerance: f64,
    pub failed: bool,
}

impl Outcome {
    fn measured(excess: f64, tolerance: f64) -> Self {
        Self { excess, tolerance, failed: !(excess <= tolerance) }
    }

    fn with_condition(excess: f64, tolerance: f64, ok: bool) -> Self {
        Self { excess, tolerance, failed: !ok || !(excess <= tolerance) }
    }
}

/// Per-check aggregate in a [`VerifyReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub count: usize,
    pub failures: usize,
    /// Largest violation measure seen (see [`Outcome`]).
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
    pub passed: bool,
    pub violations: usize,
    pub checks: Vec<CheckSummary>,
    /// The worst failing instance of each failing check.
    pub replays: Vec<Value>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn n_of(v: &Value, key: &str) -> Result<f64> {
    v.get(key).and_then(Value::as_f64).ok_or_else(|| Error::Parse(format!("missing numeric param {key:?}")))
}

fn u_of(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("missing integer param {key:?}")))
}

fn s_of<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| Error::Parse(format!("missing string param {key:?}")))
}

fn mats(inst: &Instance, count: usize) -> Result<&[HermitianMatrix]> {
    if inst.matrices.len() != count {
        return Err(Error::Parse(format!("{} needs {count} matrices, got {}", inst.check, inst.matrices.len())));
    }
    Ok(&inst.matrices)
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn metric_mode(name: &str) -> Result<MetricMode> {
    match name {
        "trace_log" => Ok(MetricMode::TraceLog),
        "qjsd" => Ok(MetricMode::QjsdRoot),
        other => opgen::lookup(other)
            .map(|g| MetricMode::JensenRoot(g.generator()))
            .ok_or_else(|| Error::Parse(format!("unknown metric mode {other:?}"))),
    }
}

fn convex_fn(p: &Value) -> Result<ConvexIncreasing> {
    match s_of(p, "f")? {
        "square" => Ok(ConvexIncreasing::Square),
        "exp_m1" => Ok(ConvexIncreasing::ExpMinusOne),
        "hinge" => Ok(ConvexIncreasing::Hinge(n_of(p, "c")?)),
        other => Err(Error::Parse(format!("unknown convex function {other:?}"))),
    }
}

fn points_of(p: &Value) -> Result<Vec<Vec<f64>>> {
    p.get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"points\"".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("point must be an array".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Parse("coordinate must be a number".into())))
                .collect()
        })
        .collect()
}

fn euclidean_kernel(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|x| points.iter().map(|y| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()).collect())
        .collect()
}

/// `J_{τ_n}` of the QJSD on `n×n` inputs.
fn qjsd_value(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    Ok(divergence::qjsd(a, b)?.squared)
}

/// Evaluates a single instance.
pub fn evaluate(inst: &Instance, tol: &Tolerances) -> Result<Outcome> {
    let p = &inst.params;
    match inst.check.as_str() {
        "metric_triple" => {
            let pts = mats(inst, 3)?;
            let report = divergence::metric_suite(pts, &metric_mode(s_of(p, "mode")?)?, u_of(p, "seed")? as u64)?;
            Ok(Outcome::with_condition(report.worst_triangle_margin, tol.triangle, report.is_clean()))
        }
        "scalar_triangle" => {
            let (x, y, z) = (n_of(p, "x")?, n_of(p, "y")?, n_of(p, "z")?);
            let margin = scalar::delta_s(x, z)? - scalar::delta_s(x, y)? - scalar::delta_s(y, z)?;
            Ok(Outcome::measured(margin, scalar::TOL_TRI))
        }
        "fk_sum" => {
            let m = mats(inst, 2)?;
            let r = rearrange::fk_sum_bound_check(&m[0], &m[1], convex_fn(p)?, u_of(p, "u_panels")?)?;
            Ok(Outcome::measured(r.margin, tol.bound))
        }
        "log_sum_lower" => {
            let m = mats(inst, 2)?;
            Ok(Outcome::measured(rearrange::log_sum_lower_check(&m[0], &m[1])?.margin, tol.bound))
        }
        "dst_lower" => {
            let m = mats(inst, 2)?;
            Ok(Outcome::measured(rearrange::dst_lower_check(&m[0], &m[1])?.margin, tol.bound))
        }
        "minkowski_assembly" => {
            let m = mats(inst, 2)?;
            Ok(Outcome::measured(rearrange::minkowski_assembly_check(&m[0], &m[1])?.margin, tol.bound))
        }
        "d1_mu_identity" => {
            let id = rearrange::d1_mu_identity_check(&mats(inst, 1)?[0])?;
            Ok(Outcome::measured(id.gap() / (1.0 + id.lhs.abs()), tol.identity))
        }
        "trace_formula_eta" => {
            let id = rearrange::trace_formula_eta(&mats(inst, 1)?[0])?;
            Ok(Outcome::measured(id.gap() / (1.0 + id.lhs.abs()), tol.identity))
        }
        "qjsd_integral" => {
            let m = mats(inst, 2)?;
            let exact = qjsd_value(&m[0], &m[1])?;
            let integral = divergence::qjsd_by_integral(&m[0], &m[1], tol.quad_rel)?;
            Ok(Outcome::measured(rel_err(integral, exact), tol.integral_rel))
        }
        "shift_derivative" => {
            // F(t) = J_η(A+tI, B+tI) has F'(t) = −d_τ(A+tI, B+tI)².
            let m = mats(inst, 2)?;
            let t = n_of(p, "t")?;
            let h = 1e-3 * t;
            let f = |s: f64| qjsd_value(&m[0].shift(s), &m[1].shift(s));
            let fd = (f(t + h)? - f(t - h)?) / (2.0 * h);
            let exact = -divergence::d_tau_shifted_sq(&m[0], &m[1], t)?.squared;
            Ok(Outcome::measured(rel_err(fd, exact), tol.derivative_rel))
        }
        "scalar_quadrature" => {
            let (x, y) = (n_of(p, "x")?, n_of(p, "y")?);
            let exact = scalar::delta_s_sq(x, y)?;
            let q = scalar::delta_s_sq_quadrature(x, y, 0.1 * tol.scalar_rel)?;
            Ok(Outcome::measured(rel_err(q, exact), tol.scalar_rel))
        }
        "euclidean_cnd" => {
            let k = euclidean_kernel(&points_of(p)?);
            let scale = 1.0 + k.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
            let cfg = KernelConfig::from_kernel(k)?;
            let verdict = kernel::cnd_test(&cfg)?;
            if verdict.status != CndStatus::Cnd {
                return Ok(Outcome::with_condition(verdict.max_centered_eigenvalue, verdict.tol_cnd, false));
            }
            let g = kernel::embed_gram(&cfg, 0)?;
            let m = cfg.m();
            let mut err = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    err = err.max((kernel::gram_distance_sq(&g, i, j) - cfg.kernel()[i][j]).abs() / scale);
                }
            }
            let sweep = kernel::schoenberg_test(&cfg, &kernel::default_betas())?;
            let psd = sweep.iter().all(|&(_, e)| e >= -1e-10 * m as f64);
            Ok(Outcome::with_condition(err, tol.gram, psd))
        }
        "witness_not_cnd" => {
            let pts = witness::matrices();
            let cfg = kernel::build_divergence_kernel(&pts, DivergenceMode::Qjsd)?;
            let verdict = kernel::cnd_test(&cfg)?;
            let q = kernel::quad_form(&cfg, &witness::coeffs())?;
            let tol_cnd = cfg.tol_cnd();
            let sweep = kernel::schoenberg_test(&cfg, &kernel::default_betas())?;
            let negative = sweep.iter().any(|&(_, e)| e < -tol_cnd);
            // excess: −(quadratic form), which must be negative
            Ok(Outcome::with_condition(-q, 0.0, verdict.status == CndStatus::NotCnd && q > 0.0 && negative))
        }
        "block_embedding" => {
            let m = mats(inst, 2)?;
            let n = u_of(p, "n")?;
            let (lhs, rhs) = match s_of(p, "mode")? {
                "pad_identity" => {
                    let ix = kernel::block_embed(&m[0], n, BlockEmbedding::PadIdentity)?;
                    let iy = kernel::block_embed(&m[1], n, BlockEmbedding::PadIdentity)?;
                    let base = m[0].n() as f64;
                    (qjsd_value(&ix, &iy)?, base / n as f64 * qjsd_value(&m[0], &m[1])?)
                }
                "pad_zero_trace" => {
                    let budget = n_of(p, "budget")?;
                    let mode = BlockEmbedding::PadZeroTrace(budget);
                    let small = m[0].n() + 1;
                    let rx = kernel::block_embed(&m[0], small, mode)?;
                    let ry = kernel::block_embed(&m[1], small, mode)?;
                    let ix = kernel::block_embed(&m[0], n, mode)?;
                    let iy = kernel::block_embed(&m[1], n, mode)?;
                    (qjsd_value(&ix, &iy)?, small as f64 / n as f64 * qjsd_value(&rx, &ry)?)
                }
                other => return Err(Error::Parse(format!("unknown embedding {other:?}"))),
            };
            Ok(Outcome::measured((lhs - rhs).abs() / (1.0 + rhs.abs()), tol.embedding))
        }
        "decomposition" => {
            let m = mats(inst, 2)?;
            let name = s_of(p, "generator")?;
            let g = opgen::lookup(name).ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            let d = opgen::decomposition_check(&m[0], &m[1], &g)?;
            Ok(Outcome::measured(d.deviation() / (1.0 + d.direct.abs()), tol.decomposition))
        }
        "k_t_gap" => {
            let m = mats(inst, 2)?;
            let t = n_of(p, "t")?;
            let g = GeneratorSpec::new("k_t", 0.0, vec![(t, 1.0)], "")?;
            let gap = opgen::jensen_gap_direct(&m[0], &m[1], &g)?;
            let expect = t * divergence::d_tau_shifted_sq(&m[0], &m[1], t)?.squared;
            Ok(Outcome::measured((gap - expect).abs() / (1.0 + expect), tol.identity))
        }
        other => Err(Error::Parse(format!("unknown check {other:?}"))),
    }
}

/// Re-runs a serialized instance with the given tolerances.
pub fn replay(v: &Value, tol: &Tolerances) -> Result<Outcome> {
    evaluate(&Instance::from_json(v)?, tol)
}

const DIMS: [usize; 4] = [2, 3, 4, 8];

fn draw(suite: Suite, trials: usize, s: &mut Sampler) -> Vec<Instance> {
    let mut out = Vec::new();
    for trial in 0..trials {
        match suite {
            Suite::Metric => {
                let n = DIMS[trial % DIMS.len()];
                let pd = vec![s.pd(n), s.pd(n), s.pd(n)];
                let seed = s.index(1 << 30);
                out.push(Instance::new("metric_triple", pd, json!({"mode": "trace_log", "seed": seed})));
                let psd = vec![s.psd(n), s.psd(n), s.psd(n)];
                out.push(Instance::new("metric_triple", psd, json!({"mode": "qjsd", "seed": 0})));
                let psd = vec![s.psd(n), s.psd(n), s.psd(n)];
                out.push(Instance::new("metric_triple", psd, json!({"mode": "mixed", "seed": 0})));
                let (x, y, z) = (s.log_uniform(1e-3, 1e3), s.log_uniform(1e-3, 1e3), s.log_uniform(1e-3, 1e3));
                out.push(Instance::new("scalar_triangle", vec![], json!({"x": x, "y": y, "z": z})));
            }
            Suite::Rearrange => {
                let n = 1 + s.index(8);
                let (x, y) = (s.psd(n), s.psd(n));
                let params = match trial % 3 {
                    0 => json!({"f": "square"}),
                    1 => json!({"f": "exp_m1"}),
                    _ => json!({"f": "hinge", "c": s.log_uniform(1e-2, 1e2)}),
                };
                // exp_m1 overflows on the raw spectrum; rescale into [0, 1]
                let (x, y) = if trial % 3 == 1 { (x.scale(1e-2), y.scale(1e-2)) } else { (x, y) };
                let mut params = params;
                params["u_panels"] = json!(1 + s.index(n));
                out.push(Instance::new("fk_sum", vec![x, y], params));
                out.push(Instance::new("log_sum_lower", vec![s.pd(n), s.pd(n)], Value::Null));
                out.push(Instance::new("dst_lower", vec![s.pd(n), s.pd(n)], Value::Null));
                out.push(Instance::new("minkowski_assembly", vec![s.pd(n), s.pd(n)], Value::Null));
                out.push(Instance::new("d1_mu_identity", vec![s.pd(n)], Value::Null));
                out.push(Instance::new("trace_formula_eta", vec![s.psd(n)], Value::Null));
            }
            Suite::Integral => {
                let n = 1 + s.index(4);
                out.push(Instance::new("qjsd_integral", vec![s.psd(n), s.psd(n)], Value::Null));
                let (a, b) = (s.pd(n), s.psd(n));
                for t in [0.1, 1.0, 10.0] {
                    out.push(Instance::new("shift_derivative", vec![a.clone(), b.clone()], json!({"t": t})));
                }
                for _ in 0..50 {
                    let (x, y) = (s.log_uniform(1e-3, 1e3), s.log_uniform(1e-3, 1e3));
                    out.push(Instance::new("scalar_quadrature", vec![], json!({"x": x, "y": y})));
                }
            }
            Suite::Schoenberg => {
                if trial == 0 {
                    out.push(Instance::new("witness_not_cnd", vec![], Value::Null));
                }
                let m = 2 + s.index(9);
                let dim = 1 + s.index(4);
                let points: Vec<Vec<f64>> = (0..m).map(|_| (0..dim).map(|_| s.uniform(-1.0, 1.0)).collect()).collect();
                out.push(Instance::new("euclidean_cnd", vec![], json!({"points": points})));
                let n = DIMS[1 + trial % 3];
                let (x, y) = (s.pd(2), s.pd(2));
                out.push(Instance::new("block_embedding", vec![x, y], json!({"mode": "pad_identity", "n": n})));
                let (x, y) = (s.positive_definite(2, 0.1, 10.0), s.positive_definite(2, 0.1, 10.0));
                let budget = 40.0;
                out.push(Instance::new(
                    "block_embedding",
                    vec![x, y],
                    json!({"mode": "pad_zero_trace", "n": n, "budget": budget}),
                ));
            }
            Suite::Decomposition => {
                let n = 1 + s.index(8);
                let a = s.pd(n);
                let b = if trial % 2 == 0 {
                    let zeros = 1 + s.index(n.max(2) - 1);
                    s.psd_with_kernel(n, zeros)
                } else {
                    s.pd(n)
                };
                for g in opgen::registry() {
                    out.push(Instance::new("decomposition", vec![a.clone(), b.clone()], json!({"generator": g.name})));
                }
                let t = s.log_uniform(1e-2, 1e2);
                out.push(Instance::new("k_t_gap", vec![a.clone(), b.clone()], json!({"t": t})));
                out.push(Instance::new("metric_triple", vec![a, b, s.psd(n)], json!({"mode": "log_grid", "seed": 0})));
            }
        }
    }
    out
}

/// Runs `suite` with `trials` random trials drawn from `seed`.
pub fn run_suite(suite: Suite, seed: u64, trials: usize, tol: &Tolerances) -> Result<VerifyReport> {
    let mut sampler = Sampler::seeded(seed);
    let instances = draw(suite, trials, &mut sampler);
    let outcomes: Vec<Outcome> = instances.par_iter().map(|inst| evaluate(inst, tol)).collect::<Result<_>>()?;

    let mut checks: Vec<CheckSummary> = Vec::new();
    let mut worst_failure: Vec<Option<(f64, usize)>> = Vec::new();
    for (idx, (inst, out)) in instances.iter().zip(&outcomes).enumerate() {
        let pos = match checks.iter().position(|c| c.name == inst.check) {
            Some(p) => p,
            None => {
                checks.push(CheckSummary {
                    name: inst.check.clone(),
                    count: 0,
                    failures: 0,
                    worst: f64::NEG_INFINITY,
                    tolerance: out.tolerance,
                });
                worst_failure.push(None);
                checks.len() - 1
            }
        };
        let c = &mut checks[pos];
        c.count += 1;
        if out.excess > c.worst || out.excess.is_nan() {
            c.worst = out.excess;
        }
        if out.failed {
            c.failures += 1;
            let key = if out.excess.is_nan() { f64::INFINITY } else { out.excess };
            if worst_failure[pos].is_none_or(|(w, _)| key > w) {
                worst_failure[pos] = Some((key, idx));
            }
        }
    }
    let violations: usize = checks.iter().map(|c| c.failures).sum();
    let replays = worst_failure.iter().flatten().map(|&(_, idx)| instances[idx].to_json()).collect();
    Ok(VerifyReport {
        suite: suite.name().into(),
        seed,
        trials,
        tolerances: *tol,
        passed: violations == 0,
        violations,
        checks,
        replays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_with_few_trials() {
        let tol = Tolerances::default();
        for suite in Suite::ALL {
            let trials = if suite == Suite::Integral { 2 } else { 8 };
            let r = run_suite(suite, 42, trials, &tol).unwrap();
            assert!(r.passed, "{}: {:#?}", suite.name(), r.checks);
            assert!(r.replays.is_empty());
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let tol = Tolerances::default();
        let a = serde_json::to_string(&run_suite(Suite::Rearrange, 7, 20, &tol).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Rearrange, 7, 20, &tol).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_tolerance_produces_replays() {
        let tol = Tolerances { bound: -1.0, ..Tolerances::default() };
        let r = run_suite(Suite::Rearrange, 1, 3, &tol).unwrap();
        assert!(!r.passed);
        assert!(!r.replays.is_empty());
        for rep in &r.replays {
            assert!(replay(rep, &tol).unwrap().failed);
            assert!(!replay(rep, &Tolerances::default()).unwrap().failed);
        }
    }

    #[test]
    fn unknown_checks_are_parse_errors() {
        let v = json!({"check": "nope"});
        assert!(matches!(replay(&v, &Tolerances::default()), Err(Error::Parse(_))));
    }
}
