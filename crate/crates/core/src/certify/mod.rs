//! Rigorous enclosures of trace-η quadratic forms over exact rational inputs.
//!
//! The quantities certified are
//!
//! ```text
//! S = Σ_{i,j} c_i c_j J(ρ_i, ρ_j),   J(X, Y) = (1/2n)·(Tr η(X) + Tr η(Y) − 2 Tr η((X+Y)/2))
//! ```
//!
//! for points `ρ = X ⊕ tail` made of a real symmetric 2×2 block and an
//! optional scalar tail. Eigenvalues of the blocks come from the closed form
//! `(tr ± √disc)/2` with `tr` and `disc` computed exactly, so only the square
//! root, logarithm and final summation are rounded, each outward.
//!
//! A strictly positive lower endpoint proves `S > 0`, i.e. that the kernel
//! `J` is not conditionally negative definite on the given points.

mod hexfloat;
pub mod interval;
mod rational;

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::witness;
use crate::{Error, Result};

pub use hexfloat::{format_hexfloat, parse_hexfloat};
pub use interval::{iadd, idiv, ieta, ilog, imul, isqrt, isub, ln_platform, ln_series, Interval};
pub use rational::{interval_from_rational, parse_rational, rational_from_json, rational_to_json, Rational};

/// Real symmetric `[[a, b], [b, d]]` with exact entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix2 {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

impl SymMatrix2 {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        Self { a, b, d }
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Self {
        Self::new(rational::int(a), rational::int(b), rational::int(d))
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.d
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.b
    }

    /// `(a − d)² + 4b² = tr² − 4 det`.
    pub fn discriminant(&self) -> Rational {
        let diff = &self.a - &self.d;
        &diff * &diff + rational::int(4) * &self.b * &self.b
    }

    /// Exact positive definiteness: `a > 0` and `ad − b² > 0`.
    pub fn is_positive_definite(&self) -> bool {
        rational::is_positive(&self.a) && rational::is_positive(&self.det())
    }

    pub fn midpoint(&self, other: &SymMatrix2) -> SymMatrix2 {
        let half = rational::ratio(1, 2).expect("nonzero");
        SymMatrix2 { a: (&self.a + &other.a) * &half, b: (&self.b + &other.b) * &half, d: (&self.d + &other.d) * &half }
    }

    pub fn scale(&self, s: &Rational) -> SymMatrix2 {
        SymMatrix2 { a: &self.a * s, b: &self.b * s, d: &self.d * s }
    }

    fn to_json(&self) -> Value {
        json!({
            "a": rational_to_json(&self.a),
            "b": rational_to_json(&self.b),
            "d": rational_to_json(&self.d),
        })
    }
}

/// Enclosures of `(λ₊, λ₋)`.
///
/// `λ₋` is the intersection of `(tr − √disc)/2` with `det/λ₊`; the latter
/// avoids cancellation when the eigenvalues differ by orders of magnitude.
pub fn eigvals_2x2_interval(x: &SymMatrix2) -> Result<(Interval, Interval)> {
    let tr = interval_from_rational(&x.trace())?;
    let det = interval_from_rational(&x.det())?;
    let s = isqrt(&interval_from_rational(&x.discriminant())?)?;
    let half = Interval::point(0.5)?;
    let plus = imul(&iadd(&tr, &s)?, &half)?;
    let mut minus = imul(&isub(&tr, &s)?, &half)?;
    if !plus.contains_zero() {
        minus = minus.intersect(&idiv(&det, &plus)?)?;
    }
    Ok((plus, minus))
}

/// `Tr η(X) = η(λ₊) + η(λ₋)` for a certified positive definite `X`.
pub fn tr_eta_2x2_interval(x: &SymMatrix2) -> Result<Interval> {
    let (plus, minus) = eigvals_2x2_interval(x)?;
    if !(minus.lo() > 0.0) {
        return Err(Error::DomainError(format!("cannot certify positive definiteness: λ₋ ∈ {minus:?}")));
    }
    iadd(&ieta(&plus)?, &ieta(&minus)?)
}

/// A point `X ⊕ tail`, with the tail absent for plain 2×2 instances.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPoint {
    pub block: SymMatrix2,
    pub tail: Option<Rational>,
}

impl BlockPoint {
    pub fn plain(block: SymMatrix2) -> Self {
        Self { block, tail: None }
    }

    pub fn dim(&self) -> usize {
        2 + usize::from(self.tail.is_some())
    }

    pub fn midpoint(&self, other: &BlockPoint) -> Result<BlockPoint> {
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (Some(s), Some(t)) => Some((s + t) * rational::ratio(1, 2)?),
            _ => return Err(Error::DimensionMismatch(self.dim(), other.dim())),
        };
        Ok(BlockPoint { block: self.block.midpoint(&other.block), tail })
    }

    /// `Tr η(X) + η(tail)`.
    pub fn tr_eta(&self) -> Result<Interval> {
        let block = tr_eta_2x2_interval(&self.block)?;
        match &self.tail {
            None => Ok(block),
            Some(t) => {
                if t.numer() < &num_bigint::BigInt::from(0) {
                    return Err(Error::DomainError(format!("negative scalar tail {t}")));
                }
                iadd(&block, &ieta(&interval_from_rational(t)?)?)
            }
        }
    }

    /// Exact trace `a + d + tail`.
    pub fn trace(&self) -> Rational {
        let t = self.block.trace();
        match &self.tail {
            Some(s) => t + s,
            None => t,
        }
    }

    fn to_json(&self) -> Value {
        let mut v = self.block.to_json();
        if let Some(t) = &self.tail {
            v["tail"] = rational_to_json(t);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    S2,
    S3,
    Custom,
}

impl Quantity {
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::S2 => "S2",
            Quantity::S3 => "S3",
            Quantity::Custom => "Custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ProvedPositive,
    ProvedNegative,
    Inconclusive,
}

impl Verdict {
    pub fn of(enclosure: &Interval) -> Verdict {
        if enclosure.lo() > 0.0 {
            Verdict::ProvedPositive
        } else if enclosure.hi() < 0.0 {
            Verdict::ProvedNegative
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ProvedPositive => "ProvedPositive",
            Verdict::ProvedNegative => "ProvedNegative",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_proved(&self) -> bool {
        *self != Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub quantity: Quantity,
    pub enclosure: Interval,
    pub verdict: Verdict,
    /// Exact inputs, as embedded in the JSON form.
    pub inputs: Value,
    /// Hex SHA-256 of the compact JSON serialization of `inputs`.
    pub inputs_digest: String,
}

impl Certificate {
    fn new(quantity: Quantity, enclosure: Interval, inputs: Value) -> Self {
        let inputs_digest = digest(&inputs);
        Self { quantity, enclosure, verdict: Verdict::of(&enclosure), inputs, inputs_digest }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quantity": self.quantity.label(),
            "lo": format_hexfloat(self.enclosure.lo()),
            "hi": format_hexfloat(self.enclosure.hi()),
            "verdict": self.verdict.label(),
            "inputs": self.inputs,
            "digest": self.inputs_digest,
        })
    }

    /// Parses a certificate and checks that its digest and verdict are
    /// consistent with its contents. The enclosure itself is not recomputed;
    /// use [`recheck`] for that.
    pub fn from_json(v: &Value) -> Result<Certificate> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("certificate missing {k:?}")));
        let text = |k: &str| -> Result<&str> {
            field(k)?.as_str().ok_or_else(|| Error::Parse(format!("{k:?} must be a string")))
        };
        let quantity = match text("quantity")? {
            "S2" => Quantity::S2,
            "S3" => Quantity::S3,
            "Custom" => Quantity::Custom,
            q => return Err(Error::Parse(format!("unknown quantity {q:?}"))),
        };
        let enclosure = Interval::new(parse_hexfloat(text("lo")?)?, parse_hexfloat(text("hi")?)?)?;
        let cert = Certificate::new(quantity, enclosure, field("inputs")?.clone());
        if cert.inputs_digest != text("digest")? {
            return Err(Error::Parse("digest does not match inputs".into()));
        }
        if cert.verdict.label() != text("verdict")? {
            return Err(Error::Parse("verdict does not match enclosure".into()));
        }
        Ok(cert)
    }
}

fn digest(inputs: &Value) -> String {
    // serde_json maps are key-sorted, so this serialization is canonical
    let bytes = serde_json::to_vec(inputs).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Exact inputs of a quadratic-form certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadFormInstance {
    pub points: Vec<BlockPoint>,
    pub coeffs: Vec<i64>,
    pub tau_denominator: u32,
}

impl QuadFormInstance {
    /// Parses `{"tau_denominator", "coeffs", "points": [{"a", "b", "d", "tail"?}]}`.
    ///
    /// Entries may be integers, `"p/q"` strings or `{"num", "den"}` objects.
    /// A point may instead be given as a 2×2 matrix in the
    /// `{"n": 2, "re": [[..]]}` format.
    pub fn from_json(v: &Value) -> Result<Self> {
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"coeffs\" array".into()))?
            .iter()
            .map(|c| c.as_i64().ok_or_else(|| Error::Parse(format!("coefficient {c} is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        let points = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"points\" array".into()))?
            .iter()
            .map(point_from_json)
            .collect::<Result<Vec<_>>>()?;
        let tau_denominator = match v.get("tau_denominator") {
            None => points.first().map_or(2, |p| p.dim() as u32),
            Some(t) => t
                .as_u64()
                .and_then(|t| u32::try_from(t).ok())
                .ok_or_else(|| Error::Parse(format!("bad tau_denominator {t}")))?,
        };
        Ok(Self { points, coeffs, tau_denominator })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tau_denominator": self.tau_denominator,
            "coeffs": self.coeffs,
            "points": self.points.iter().map(BlockPoint::to_json).collect::<Vec<_>>(),
        })
    }
}

fn point_from_json(v: &Value) -> Result<BlockPoint> {
    let block = if let Some(re) = v.get("re") {
        if v.get("n").and_then(Value::as_u64) != Some(2) {
            return Err(Error::Parse("matrix points must have n = 2".into()));
        }
        if v.get("im").is_some_and(|im| {
            im.as_array().is_some_and(|rows| {
                rows.iter().flat_map(|r| r.as_array().into_iter().flatten()).any(|e| e != &json!(0))
            })
        }) {
            return Err(Error::Parse("certified points must be real".into()));
        }
        let entry = |i: usize, j: usize| -> Result<Rational> {
            rational_from_json(re.get(i).and_then(|r| r.get(j)).ok_or_else(|| Error::Parse("short row".into()))?)
        };
        let (b, c) = (entry(0, 1)?, entry(1, 0)?);
        if b != c {
            return Err(Error::Parse("matrix point is not symmetric".into()));
        }
        SymMatrix2::new(entry(0, 0)?, b, entry(1, 1)?)
    } else {
        let get = |k: &str| -> Result<Rational> {
            rational_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("point missing {k:?}")))?)
        };
        SymMatrix2::new(get("a")?, get("b")?, get("d")?)
    };
    let tail = match v.get("tail") {
        None | Some(Value::Null) => None,
        Some(t) => Some(rational_from_json(t)?),
    };
    Ok(BlockPoint { block, tail })
}

/// Certifies the sign of `Σ c_i c_j J_{τ_n}(X_i, X_j)` for 2×2 points.
pub fn certify_quad_form(points: &[SymMatrix2], c: &[i64], tau_denominator: u32) -> Result<Certificate> {
    let instance = QuadFormInstance {
        points: points.iter().cloned().map(BlockPoint::plain).collect(),
        coeffs: c.to_vec(),
        tau_denominator,
    };
    certify_instance(&instance, Quantity::Custom)
}

/// Certifies an instance whose points may carry scalar tails.
///
/// `τ_n = (1/n)·Tr` with `n = tau_denominator`, which must be at least the
/// point dimension; a larger `n` corresponds to padding every point with
/// zeros, which leaves `Tr η` unchanged.
pub fn certify_instance(instance: &QuadFormInstance, quantity: Quantity) -> Result<Certificate> {
    let QuadFormInstance { points, coeffs, tau_denominator } = instance;
    if points.len() != coeffs.len() {
        return Err(Error::DimensionMismatch(points.len(), coeffs.len()));
    }
    if points.is_empty() {
        return Err(Error::DimensionError("no points".into()));
    }
    let sum: i128 = coeffs.iter().map(|&c| c as i128).sum();
    if sum != 0 {
        return Err(Error::CoeffSumNonzero(sum.to_string()));
    }
    let dim = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch(dim, p.dim()));
    }
    if (*tau_denominator as usize) < dim {
        return Err(Error::DimensionError(format!(
            "tau_denominator {tau_denominator} is below the point dimension {dim}"
        )));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.block.is_positive_definite() {
            return Err(Error::DomainError(format!("point {i} is not positive definite")));
        }
    }

    let m = points.len();
    let singles: Vec<Interval> = points.par_iter().map(BlockPoint::tr_eta).collect::<Result<_>>()?;
    // Upper triangle of midpoints, in row-major order.
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let mids: Vec<Interval> = pairs
        .par_iter()
        .map(|&(i, j)| if i == j { Ok(singles[i]) } else { points[i].midpoint(&points[j])?.tr_eta() })
        .collect::<Result<_>>()?;
    let mid = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        mids[i * m + j - i * (i + 1) / 2]
    };
    debug_assert_eq!(mids.len(), m * (m + 1) / 2);

    let scale = idiv(&Interval::from_i64(1), &Interval::from_i64(2 * i64::from(*tau_denominator)))?;
    let two = Interval::from_i64(2);

    let mut total = Interval::point(0.0)?;
    for i in 0..m {
        for j in 0..m {
            let gap = isub(&iadd(&singles[i], &singles[j])?, &imul(&two, &mid(i, j))?)?;
            let j_ij = imul(&scale, &gap)?;
            let w = Interval::from_i64(coeffs[i] * coeffs[j]);
            total = iadd(&total, &imul(&w, &j_ij)?)?;
        }
    }
    Ok(Certificate::new(quantity, total, instance.to_json()))
}

/// The five integer points with `τ₂`.
pub fn s2_instance() -> QuadFormInstance {
    QuadFormInstance {
        points: witness::MATRICES.iter().map(|&(a, b, d)| BlockPoint::plain(SymMatrix2::from_ints(a, b, d))).collect(),
        coeffs: witness::COEFFS.to_vec(),
        tau_denominator: 2,
    }
}

/// The density matrices `X_i/T ⊕ (1 − Tr X_i/T)` with `τ₃`.
pub fn s3_instance() -> QuadFormInstance {
    let t = witness::DENSITY_BUDGET;
    let inv_t = rational::ratio(1, t).expect("nonzero budget");
    let points = witness::MATRICES
        .iter()
        .map(|&(a, b, d)| {
            let block = SymMatrix2::from_ints(a, b, d).scale(&inv_t);
            let tail = rational::int(1) - rational::ratio(a + d, t).expect("nonzero budget");
            BlockPoint { block, tail: Some(tail) }
        })
        .collect();
    QuadFormInstance { points, coeffs: witness::COEFFS.to_vec(), tau_denominator: 3 }
}

pub fn certify_s2() -> Result<Certificate> {
    certify_instance(&s2_instance(), Quantity::S2)
}

pub fn certify_s3() -> Result<Certificate> {
    certify_instance(&s3_instance(), Quantity::S3)
}

/// Recomputes the enclosure of a parsed certificate from its embedded inputs
/// and checks it is bitwise identical.
pub fn recheck(cert: &Certificate) -> Result<bool> {
    let instance = QuadFormInstance::from_json(&cert.inputs)?;
    let fresh = certify_instance(&instance, cert.quantity)?;
    Ok(fresh.enclosure.lo().to_bits() == cert.enclosure.lo().to_bits()
        && fresh.enclosure.hi().to_bits() == cert.enclosure.hi().to_bits())
}
