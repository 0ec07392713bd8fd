//! Operator convex generators with explicit Nevanlinna data.
//!
//! A generator with data `(b, ν)`, `ν = Σ w·δ_t`, is reconstructed as
//!
//! ```text
//! f(x) = (b/2)·x² + Σ w·k_t(x),   k_t(x) = (x − 1) − t·log((x+t)/(1+t))
//! ```
//!
//! (affine terms dropped, since they cancel in every Jensen gap), and its trace
//! Jensen gap splits as
//!
//! ```text
//! J_f(A, B) = (b/8)·‖A−B‖²_{2,τ} + Σ w·t·d_τ(A+tI, B+tI)².
//! ```
//!
//! [`decomposition_check`] evaluates both sides independently: the left by
//! spectral calculus on `f`, the right from shifted trace-log distances.

use serde_json::{json, Value};

use crate::divergence::{self, GeneratorKind, JensenGenerator, MetricMode, SuiteReport};
use crate::linalg::HermitianMatrix;
use crate::{Error, Result};

/// Relative slack for the decomposition identity.
pub const TOL_DECOMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub name: String,
    pub b: f64,
    /// `(t, weight)` atoms of `ν`.
    pub atoms: Vec<(f64, f64)>,
    pub provenance: String,
    /// Set only for `η`, whose measure `dt/t` is not discrete.
    entropy: bool,
}

/// `k_t(x) = (x − 1) − t·log((x+t)/(1+t))`; convex and increasing, `k_t(1) = 0`, finite at 0.
pub fn k_t(t: f64, x: f64) -> f64 {
    // log((x+t)/(1+t)) = log1p((x−1)/(1+t))
    (x - 1.0) - t * ((x - 1.0) / (1.0 + t)).ln_1p()
}

impl GeneratorSpec {
    pub fn new(name: &str, b: f64, atoms: Vec<(f64, f64)>, provenance: &str) -> Result<Self> {
        let spec = Self { name: name.into(), b, atoms, provenance: provenance.into(), entropy: false };
        spec.generator().validate()?;
        Ok(spec)
    }

    /// `η(x) = x log x`, routed through the spectral QJSD.
    pub fn entropy() -> Self {
        Self {
            name: "eta".into(),
            b: 0.0,
            atoms: vec![],
            provenance: "x log x; continuous measure dt/t".into(),
            entropy: true,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !self.entropy
    }

    /// The reconstructed scalar generator.
    pub fn f(&self, x: f64) -> f64 {
        if self.entropy {
            return divergence::eta(x);
        }
        0.5 * self.b * x * x + self.atoms.iter().map(|&(t, w)| w * k_t(t, x)).sum::<f64>()
    }

    pub fn generator(&self) -> JensenGenerator {
        if self.entropy {
            JensenGenerator::entropy()
        } else {
            JensenGenerator::custom(self.b, self.atoms.clone())
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "b": self.b,
            "atoms": self.atoms.iter().map(|&(t, w)| json!([t, w])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom");
        let b =
            v.get("b").map_or(Some(0.0), Value::as_f64).ok_or_else(|| Error::Parse("\"b\" must be a number".into()))?;
        let atoms = match v.get("atoms") {
            None => vec![],
            Some(a) => a
                .as_array()
                .ok_or_else(|| Error::Parse("\"atoms\" must be an array".into()))?
                .iter()
                .map(|pair| match pair.as_array().map(Vec::as_slice) {
                    Some([t, w]) => match (t.as_f64(), w.as_f64()) {
                        (Some(t), Some(w)) => Ok((t, w)),
                        _ => Err(Error::Parse(format!("bad atom {pair}"))),
                    },
                    _ => Err(Error::Parse(format!("atom {pair} is not a [t, w] pair"))),
                })
                .collect::<Result<_>>()?,
        };
        Self::new(name, b, atoms, "user supplied")
    }
}

/// The built-in generators, all with discrete `ν`.
pub fn registry() -> Vec<GeneratorSpec> {
    let entries: [(&str, f64, Vec<(f64, f64)>, &str); 7] = [
        ("square", 2.0, vec![], "x²"),
        ("half_square", 1.0, vec![], "x²/2"),
        ("k1", 0.0, vec![(1.0, 1.0)], "single atom at t = 1"),
        ("neglog_shift_0.1", 0.0, vec![(0.1, 10.0)], "−log(x + 0.1) up to affine terms"),
        ("neglog_shift_10", 0.0, vec![(10.0, 0.1)], "−log(x + 10) up to affine terms"),
        ("mixed", 0.5, vec![(0.5, 2.0), (3.0, 1.0)], "quadratic part plus two atoms"),
        (
            "log_grid",
            0.0,
            vec![(1e-2, 1.0), (1e-1, 1.0), (1.0, 1.0), (1e1, 1.0), (1e2, 1.0)],
            "five log-spaced unit atoms, a coarse stand-in for dt/t",
        ),
    ];
    entries
        .into_iter()
        .map(|(name, b, atoms, note)| GeneratorSpec::new(name, b, atoms, note).expect("registry entries are valid"))
        .collect()
}

pub fn lookup(name: &str) -> Option<GeneratorSpec> {
    if name == "eta" {
        return Some(GeneratorSpec::entropy());
    }
    registry().into_iter().find(|g| g.name == name)
}

/// `½τf(A) + ½τf(B) − τf((A+B)/2)` by spectral calculus on the reconstructed `f`.
pub fn jensen_gap_direct(a: &HermitianMatrix, b: &HermitianMatrix, spec: &GeneratorSpec) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let f = |x: f64| spec.f(x);
    let ta = a.spectral_psd()?.trace_tau_of(f)?;
    let tb = b.spectral_psd()?.trace_tau_of(f)?;
    let tm = a.midpoint(b)?.spectral_psd()?.trace_tau_of(f)?;
    Ok(0.5 * ta + 0.5 * tb - tm)
}

/// Outcome of [`decomposition_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub direct: f64,
    pub decomposed: f64,
}

impl Decomposition {
    pub fn deviation(&self) -> f64 {
        (self.direct - self.decomposed).abs()
    }

    pub fn holds(&self) -> bool {
        self.deviation() <= TOL_DECOMP * (1.0 + self.direct.abs())
    }
}

/// Evaluates the Jensen gap directly and through its `(b, ν)` decomposition.
pub fn decomposition_check(a: &HermitianMatrix, b: &HermitianMatrix, spec: &GeneratorSpec) -> Result<Decomposition> {
    if !spec.is_discrete() {
        return Err(Error::InvalidGenerator(format!(
            "{} has a continuous measure; use the integral representation instead",
            spec.name
        )));
    }
    let direct = jensen_gap_direct(a, b, spec)?;
    let mut decomposed = spec.b / 8.0 * a.sub(b)?.norm_2_tau_sq();
    for &(t, w) in &spec.atoms {
        decomposed += w * t * divergence::d_tau_shifted_sq(a, b, t)?.squared;
    }
    Ok(Decomposition { direct, decomposed })
}

/// Metric-axiom report for `√J_f` over a point set.
pub fn metric_from_generator(points: &[HermitianMatrix], spec: &GeneratorSpec) -> Result<SuiteReport> {
    let mode = match spec.generator() {
        g if g.kind == GeneratorKind::Eta => MetricMode::QjsdRoot,
        g => MetricMode::JensenRoot(g),
    };
    divergence::metric_suite(points, &mode, 0)
}
