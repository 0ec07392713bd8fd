//! C99-style hexadecimal float literals (`%a`), for bit-exact endpoints.

use crate::{Error, Result};

/// Formats a finite double as e.g. `0x1.3a0d6c1p+3`; subnormals use `0x0.…p-1022`.
pub fn format_hexfloat(x: f64) -> String {
    assert!(x.is_finite(), "hexfloat of non-finite {x}");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    let esign = if e < 0 { '-' } else { '+' };
    format!("{sign}0x{lead}{frac}p{esign}{}", e.abs())
}

/// Parses the output of [`format_hexfloat`]; values must be exactly representable.
pub fn parse_hexfloat(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("bad hexfloat {s:?}"));
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X")).ok_or_else(bad)?;
    let (mant, exp) = rest.split_once(['p', 'P']).ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() || frac_part.len() > 13 {
        return Err(bad());
    }
    let lead = u64::from_str_radix(int_part, 16).map_err(|_| bad())?;
    let frac = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).map_err(|_| bad())? << (4 * (13 - frac_part.len()))
    };
    if lead > 1 {
        return Err(bad());
    }
    // value = (lead·2^52 + frac) · 2^(exp − 52); scale in two exact steps
    let m = ((lead << 52) | frac) as f64;
    let e = exp - 52;
    let v = if e < -1000 { m * 2f64.powi(-1000) * 2f64.powi((e + 1000) as i32) } else { m * 2f64.powi(e as i32) };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(if neg { -v } else { v })
}
