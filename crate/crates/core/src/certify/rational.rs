//! Exact rational inputs and their conversion to tight double intervals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::interval::Interval;
use crate::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Result<Rational> {
    if den == 0 {
        return Err(Error::Parse(format!("zero denominator in {num}/{den}")));
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Tightest double interval containing `q`; a point when `q` is a double.
pub fn interval_from_rational(q: &Rational) -> Result<Interval> {
    let approx = q.to_f64().ok_or(Error::CertifyOverflow)?;
    if !approx.is_finite() {
        return Err(Error::CertifyOverflow);
    }
    let exact = |x: f64| BigRational::from_float(x).expect("finite double");
    let mut x = approx;
    // `to_f64` is close to q; walk until bracketed, which takes at most a step or two.
    loop {
        let xv = exact(x);
        if &xv == q {
            return Interval::point(x);
        }
        if &xv < q {
            let up = x.next_up();
            if !up.is_finite() {
                return Err(Error::CertifyOverflow);
            }
            if &exact(up) >= q {
                return if &exact(up) == q { Interval::point(up) } else { Interval::new(x, up) };
            }
            x = up;
        } else {
            let down = x.next_down();
            if !down.is_finite() {
                return Err(Error::CertifyOverflow);
            }
            if &exact(down) <= q {
                return if &exact(down) == q { Interval::point(down) } else { Interval::new(down, x) };
            }
            x = down;
        }
    }
}

/// Parses an exact rational from an integer, a `"p/q"` (or `"p"`) string, or
/// a `{"num": .., "den": ..}` object whose fields are integers or strings.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| {
                Error::Parse(format!("{n} is not an integer; use {{\"num\", \"den\"}} for fractions"))
            })?;
            Ok(int(i))
        }
        Value::String(s) => parse_rational(s),
        Value::Object(map) => {
            let num = big_from_json(map.get("num").ok_or_else(|| Error::Parse("missing \"num\"".into()))?)?;
            let den = match map.get("den") {
                Some(d) => big_from_json(d)?,
                None => BigInt::from(1),
            };
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(num, den))
        }
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

fn big_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("{n} is not an integer"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `{"num", "den"}` with JSON integers when they fit in `i64`, strings otherwise.
pub fn rational_to_json(q: &Rational) -> Value {
    let part = |b: &BigInt| match b.to_i64() {
        Some(i) => json!(i),
        None => json!(b.to_string()),
    };
    json!({ "num": part(q.numer()), "den": part(q.denom()) })
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}
