//! Outward-rounded double intervals.
//!
//! Each elementary operation is computed in round-to-nearest and then
//! widened by one step of `next_up`/`next_down` on the side where the exact
//! result may lie. The side is found with error-free transformations
//! (TwoSum, FMA residuals), so results that are exact stay point intervals.
//! No floating-point environment state is touched.

use std::fmt;

use crate::{Error, Result};

/// Below this magnitude FMA residuals may underflow; both sides are widened.
const RESIDUAL_FLOOR: f64 = 1e-280;

/// `1/e` rounded to nearest; the true value lies within one ulp.
const INV_E: f64 = 0.367_879_441_171_442_33;

/// A closed interval `[lo, hi]` with finite double endpoints.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::CertifyOverflow)
    }
}

/// Rounded-down and rounded-up bounds for `x + y`.
fn add_bounds(x: f64, y: f64) -> Result<(f64, f64)> {
    let s = finite(x + y)?;
    let bb = s - x;
    let err = (x - (s - bb)) + (y - bb);
    Ok(bracket(s, err))
}

fn bracket(approx: f64, residual: f64) -> (f64, f64) {
    if residual > 0.0 {
        (approx, approx.next_up())
    } else if residual < 0.0 {
        (approx.next_down(), approx)
    } else {
        (approx, approx)
    }
}

fn mul_bounds(x: f64, y: f64) -> Result<(f64, f64)> {
    let p = finite(x * y)?;
    if x == 0.0 || y == 0.0 {
        return Ok((0.0, 0.0));
    }
    if p.abs() < RESIDUAL_FLOOR {
        return Ok((p.next_down(), p.next_up()));
    }
    Ok(bracket(p, x.mul_add(y, -p)))
}

fn div_bounds(x: f64, y: f64) -> Result<(f64, f64)> {
    let q = finite(x / y)?;
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    if q.abs() < RESIDUAL_FLOOR || x.abs() < RESIDUAL_FLOOR {
        return Ok((q.next_down(), q.next_up()));
    }
    // x − q·y, exact; x/y − q has the sign of this residual divided by y
    let r = (-q).mul_add(y, x);
    Ok(bracket(q, if y > 0.0 { r } else { -r }))
}

fn sqrt_bounds(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    if x == 0.0 {
        return (0.0, 0.0);
    }
    if x < RESIDUAL_FLOOR {
        return (s.next_down().max(0.0), s.next_up());
    }
    bracket(s, (-s).mul_add(s, x))
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::DomainError(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo: finite(lo)?, hi: finite(hi)? })
    }

    /// Degenerate interval `[x, x]`; `x` must be finite.
    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    /// Exact integer, which must be representable (`|n| ≤ 2⁵³`).
    pub fn from_i64(n: i64) -> Self {
        assert!(n.unsigned_abs() <= 1 << 53, "integer {n} is not exactly representable");
        Self { lo: n as f64, hi: n as f64 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        if !self.intersects(other) {
            return Err(Error::DomainError(format!("disjoint enclosures {self:?} and {other:?}")));
        }
        Ok(Interval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) })
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn add(&self, other: &Interval) -> Result<Interval> {
        iadd(self, other)
    }

    pub fn sub(&self, other: &Interval) -> Result<Interval> {
        isub(self, other)
    }

    pub fn mul(&self, other: &Interval) -> Result<Interval> {
        imul(self, other)
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        idiv(self, other)
    }

    pub fn sqrt(&self) -> Result<Interval> {
        isqrt(self)
    }

    pub fn ln(&self) -> Result<Interval> {
        ilog(self)
    }
}

pub fn iadd(x: &Interval, y: &Interval) -> Result<Interval> {
    let (lo, _) = add_bounds(x.lo, y.lo)?;
    let (_, hi) = add_bounds(x.hi, y.hi)?;
    Interval::new(lo, hi)
}

pub fn isub(x: &Interval, y: &Interval) -> Result<Interval> {
    iadd(x, &y.neg())
}

pub fn imul(x: &Interval, y: &Interval) -> Result<Interval> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in [x.lo, x.hi] {
        for b in [y.lo, y.hi] {
            let (l, h) = mul_bounds(a, b)?;
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    Interval::new(lo, hi)
}

pub fn idiv(x: &Interval, y: &Interval) -> Result<Interval> {
    if y.contains_zero() {
        return Err(Error::DivisionByIntervalContainingZero);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in [x.lo, x.hi] {
        for b in [y.lo, y.hi] {
            let (l, h) = div_bounds(a, b)?;
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    Interval::new(lo, hi)
}

pub fn isqrt(x: &Interval) -> Result<Interval> {
    if !(x.lo >= 0.0) {
        return Err(Error::DomainError(format!("sqrt of {x:?}")));
    }
    Interval::new(sqrt_bounds(x.lo).0, sqrt_bounds(x.hi).1)
}

pub fn ilog(x: &Interval) -> Result<Interval> {
    if !(x.lo > 0.0) {
        return Err(Error::DomainError(format!("log of {x:?}")));
    }
    Interval::new(ln_enclosure(x.lo)?.lo, ln_enclosure(x.hi)?.hi)
}

/// Enclosure of `ln v` for a positive double `v`.
#[cfg(not(feature = "verified-log"))]
pub fn ln_enclosure(v: f64) -> Result<Interval> {
    ln_platform(v)
}

#[cfg(feature = "verified-log")]
pub fn ln_enclosure(v: f64) -> Result<Interval> {
    ln_series(v)
}

/// Platform `ln`, assumed faithful, padded by two ulps on each side.
pub fn ln_platform(v: f64) -> Result<Interval> {
    if !(v > 0.0) {
        return Err(Error::DomainError(format!("log of {v}")));
    }
    if v == 1.0 {
        return Ok(Interval { lo: 0.0, hi: 0.0 });
    }
    let l = finite(v.ln())?;
    Interval::new(l.next_down().next_down(), l.next_up().next_up())
}

/// Self-contained enclosure of `ln v`.
///
/// Writes `v = m·2^k` with `m ∈ [1/√2, √2)` and sums
/// `ln m = 2·atanh(z)`, `z = (m−1)/(m+1)`, in interval arithmetic, adding
/// the geometric bound on the truncated series tail. `ln 2` is enclosed by
/// its double rounding and the next double above.
pub fn ln_series(v: f64) -> Result<Interval> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::DomainError(format!("log of {v}")));
    }
    if v == 1.0 {
        return Ok(Interval { lo: 0.0, hi: 0.0 });
    }
    let (mut m, mut k) = split_exponent(v);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        k += 1;
    }
    let one = Interval::from_i64(1);
    let mi = Interval::point(m)?;
    let z = idiv(&isub(&mi, &one)?, &iadd(&mi, &one)?)?;
    let z2 = imul(&z, &z)?;
    let zmag = z.lo.abs().max(z.hi.abs());
    let zmag2 = zmag * zmag;

    // atanh(z)/z = Σ_{j≥0} z^{2j}/(2j+1). Truncating after j = J leaves
    // z^{2J+2}·R with 0 ≤ R ≤ 1/((2J+3)(1 − z²)); R seeds the Horner loop.
    let mut terms = 1;
    while zmag.powi(2 * terms + 2) > 1e-20 && terms < 200 {
        terms += 1;
    }
    // the relative fudge covers rounding in the bound itself
    let remainder = (1.0 + 1e-10) / ((2 * terms + 3) as f64 * (1.0 - zmag2));
    // Horner form keeps rounding of the small terms from accumulating.
    let mut acc = Interval::new(0.0, remainder)?;
    for j in (1..=terms).rev() {
        let coeff = idiv(&Interval::from_i64(1), &Interval::from_i64(2 * j as i64 + 1))?;
        acc = iadd(&coeff, &imul(&z2, &acc)?)?;
    }
    let sum = imul(&z, &iadd(&Interval::from_i64(1), &imul(&z2, &acc)?)?)?;
    let log_m = imul(&Interval::from_i64(2), &sum)?;
    let ln2 = Interval { lo: std::f64::consts::LN_2, hi: std::f64::consts::LN_2.next_up() };
    iadd(&log_m, &imul(&Interval::from_i64(k), &ln2)?)
}

/// `v = m·2^k` with `m ∈ [1, 2)`.
fn split_exponent(v: f64) -> (f64, i64) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        // subnormal: scale into the normal range first
        let (m, k) = split_exponent(v * 2f64.powi(64));
        return (m, k - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, exp - 1023)
}

/// `η(x) = x·log x` (with `η(0) = 0`) on an interval.
///
/// `η` decreases on `[0, 1/e]` and increases afterwards, so the enclosure is
/// built from endpoint values on each monotone branch, with the minimum
/// `η(1/e) = −1/e` used when the interval straddles `1/e`.
pub fn ieta(x: &Interval) -> Result<Interval> {
    if !(x.lo >= 0.0) {
        return Err(Error::DomainError(format!("η of {x:?}")));
    }
    let at = |v: f64| -> Result<Interval> {
        if v == 0.0 {
            return Ok(Interval { lo: 0.0, hi: 0.0 });
        }
        let p = Interval::point(v)?;
        imul(&p, &ilog(&p)?)
    };
    let inv_e_lo = INV_E.next_down();
    let inv_e_hi = INV_E.next_up();
    if x.lo >= inv_e_hi {
        Interval::new(at(x.lo)?.lo, at(x.hi)?.hi)
    } else if x.hi <= inv_e_lo {
        Interval::new(at(x.hi)?.lo, at(x.lo)?.hi)
    } else {
        Interval::new(-inv_e_hi, at(x.lo)?.hi.max(at(x.hi)?.hi))
    }
}
