//! Reference arithmetic for tests.
//!
//! Values are carried as balls `c ± r` with exact rational centre and
//! radius. Field operations are exact; `sqrt` and `ln` are evaluated in
//! fixed point with [`PREC`] fractional bits and their truncation error is
//! folded into the radius, so every ball provably contains the true value.
//! Nothing here shares code with the library under test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fractional bits of the fixed-point transcendental kernels.
pub const PREC: u32 = 256;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite double")
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

fn unit() -> BigRational {
    BigRational::new(BigInt::one(), pow2(PREC))
}

/// `floor(q·2^PREC)`.
fn to_fixed(q: &BigRational) -> BigInt {
    (q * BigRational::from_integer(pow2(PREC))).floor().to_integer()
}

fn from_fixed(x: BigInt) -> BigRational {
    BigRational::new(x, pow2(PREC))
}

/// Fixed-point product, rounded toward −∞.
fn fmul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> PREC
}

/// `2·atanh(z)` for fixed-point `|z| ≤ 1/2`, returned with a bound on its
/// error in units of `2^-PREC`.
fn two_atanh(z: &BigInt) -> (BigInt, u64) {
    let z2 = fmul(z, z);
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut err = 1u64;
    let mut j = 1i64;
    loop {
        power = fmul(&power, &z2);
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * j + 1);
        // one unit from the product (amplified by earlier ones) and one from the division
        err += 2 + j as u64;
        j += 1;
    }
    // remaining tail after `power` underflowed is below one unit per term;
    // geometric decay (|z|² ≤ 1/4) bounds it by 2 units
    (sum * 2, 2 * (err + 2))
}

/// `ln 2 = 2·atanh(1/3)` in fixed point, with its error in units.
fn ln2_fixed() -> (BigInt, u64) {
    two_atanh(&(pow2(PREC) / BigInt::from(3)))
}

/// `ln q` for rational `q > 0` as a ball.
fn ln_rational(q: &BigRational) -> Ball {
    assert!(q.is_positive(), "ln of non-positive {q}");
    // q = m·2^k with m ∈ [1, 2)
    let bits = |b: &BigInt| b.bits() as i64;
    let mut k = bits(q.numer()) - bits(q.denom());
    let scale = |k: i64| {
        if k >= 0 {
            BigRational::from_integer(pow2(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-k) as u32))
        }
    };
    let mut m = q / scale(k);
    while m >= BigRational::from_integer(BigInt::from(2)) {
        m /= BigRational::from_integer(BigInt::from(2));
        k += 1;
    }
    while m < BigRational::one() {
        m *= BigRational::from_integer(BigInt::from(2));
        k -= 1;
    }
    // z = (m−1)/(m+1) ∈ [0, 1/3)
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    let (lm, e1) = two_atanh(&to_fixed(&z));
    let (l2, e2) = ln2_fixed();
    let value = lm + &l2 * BigInt::from(k);
    // + 2 units: floor of z, amplified by the derivative 2/(1−z²) ≤ 9/4
    let err = e1 + e2 * k.unsigned_abs() + 3;
    Ball { c: from_fixed(value), r: unit() * BigRational::from_integer(BigInt::from(err)) }
}

/// `c ± r` with `r ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub c: BigRational,
    pub r: BigRational,
}

impl Ball {
    pub fn exact(q: BigRational) -> Self {
        Ball { c: q, r: BigRational::zero() }
    }

    pub fn from_f64(x: f64) -> Self {
        Ball::exact(exact(x))
    }

    pub fn lo(&self) -> BigRational {
        &self.c - &self.r
    }

    pub fn hi(&self) -> BigRational {
        &self.c + &self.r
    }

    /// Rounds the centre to the fixed-point grid, growing the radius to
    /// match; keeps denominators bounded along long chains.
    pub fn tidy(self) -> Self {
        if self.c.denom().bits() <= PREC as u64 + 8 {
            return self;
        }
        let c = from_fixed(to_fixed(&self.c));
        let r = &self.r + unit();
        let r = from_fixed(to_fixed(&r) + 1);
        Ball { c, r }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        Ball { c: &self.c + &o.c, r: &self.r + &o.r }.tidy()
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        Ball { c: &self.c - &o.c, r: &self.r + &o.r }.tidy()
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let r = self.c.abs() * &o.r + o.c.abs() * &self.r + &self.r * &o.r;
        Ball { c: &self.c * &o.c, r }.tidy()
    }

    /// `None` when the divisor ball contains zero.
    pub fn div(&self, o: &Ball) -> Option<Ball> {
        let m = o.c.abs();
        if m <= o.r {
            return None;
        }
        let r = (self.c.abs() * &o.r + &m * &self.r) / (&m * (&m - &o.r));
        Some(Ball { c: &self.c / &o.c, r }.tidy())
    }

    /// `None` unless the ball lies in `[0, ∞)`.
    pub fn sqrt(&self) -> Option<Ball> {
        if self.lo().is_negative() {
            return None;
        }
        // s ≤ √c < s + 2^-PREC
        let s = from_fixed(to_fixed(&(&self.c * BigRational::from_integer(pow2(PREC)))).sqrt());
        let r = if self.r.is_zero() && &s * &s == self.c {
            BigRational::zero()
        } else if s.is_positive() {
            &self.r / &s + unit()
        } else {
            // √(c + r) bounds everything in the ball
            let hi = to_fixed(&(self.hi() * BigRational::from_integer(pow2(PREC)))).sqrt() + 1;
            from_fixed(hi) + unit()
        };
        Some(Ball { c: s, r }.tidy())
    }

    /// `None` unless the ball lies in `(0, ∞)`.
    pub fn ln(&self) -> Option<Ball> {
        let lo = self.lo();
        if !lo.is_positive() {
            return None;
        }
        if self.r.is_zero() && self.c.is_one() {
            return Some(Ball::exact(BigRational::zero()));
        }
        let base = ln_rational(&self.c);
        // |ln a − ln c| ≤ r / (c − r)
        let r = &base.r + &self.r / lo;
        Some(Ball { c: base.c, r }.tidy())
    }

    /// `x·ln x`, with `η(0) = 0` for the exact zero ball.
    pub fn eta(&self) -> Option<Ball> {
        if self.c.is_zero() && self.r.is_zero() {
            return Some(self.clone());
        }
        Some(self.mul(&self.ln()?))
    }

    /// Whether `[lo, hi]` meets the ball. Since the ball contains the true
    /// value, a `false` here proves the interval does not.
    pub fn meets(&self, lo: f64, hi: f64) -> bool {
        exact(lo) <= self.hi() && self.lo() <= exact(hi)
    }

    /// Whether the whole ball lies inside `[lo, hi]`.
    pub fn inside(&self, lo: f64, hi: f64) -> bool {
        exact(lo) <= self.lo() && self.hi() <= exact(hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.c.to_f64().unwrap_or(f64::NAN)
    }

    pub fn radius_f64(&self) -> f64 {
        self.r.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2_40: &str = "0.6931471805599453094172321214581765680755";

    fn close(b: &Ball, decimal: &str, digits: u32) {
        let (int, frac) = decimal.split_once('.').unwrap();
        let num: BigInt = format!("{int}{frac}").parse().unwrap();
        let q = BigRational::new(num, BigInt::from(10).pow(frac.len() as u32));
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(digits));
        assert!((&b.c - &q).abs() <= &b.r + &tol, "{} vs {decimal}", b.to_f64());
        assert!(b.r < tol);
    }

    #[test]
    fn ln_two() {
        close(&Ball::exact(rat(2, 1)).ln().unwrap(), LN2_40, 38);
    }

    #[test]
    fn ln_of_small_and_large() {
        // ln(1/40) = −ln 40
        close(&Ball::exact(rat(40, 1)).ln().unwrap(), "3.6888794541139363028524556976007", 30);
        let inv = Ball::exact(rat(1, 40)).ln().unwrap();
        assert!((inv.c + BigRational::from_float(3.688_879_454_113_936).unwrap()).abs() < rat(1, 1_000_000_000_000));
        close(&Ball::exact(rat(1, 1)).ln().unwrap(), "0.0", 60);
    }

    #[test]
    fn sqrt_29() {
        close(&Ball::exact(rat(29, 1)).sqrt().unwrap(), "5.3851648071345040312507104915403", 30);
        close(&Ball::exact(rat(4, 1)).sqrt().unwrap(), "2.0", 60);
        assert_eq!(Ball::exact(rat(9, 4)).sqrt().unwrap(), Ball::exact(rat(3, 2)));
        assert_eq!(Ball::exact(rat(1, 1)).ln().unwrap(), Ball::exact(rat(0, 1)));
    }

    #[test]
    fn eta_of_three_fifths() {
        // 0.6·ln 0.6
        close(&Ball::exact(rat(3, 5)).eta().unwrap(), "-0.30649537425959", 14);
    }

    #[test]
    fn division_needs_separation_from_zero() {
        let z = Ball { c: rat(0, 1), r: rat(1, 10) };
        assert!(Ball::exact(rat(1, 1)).div(&z).is_none());
        let q = Ball::exact(rat(1, 1)).div(&Ball::exact(rat(3, 1))).unwrap();
        assert_eq!(q.c, rat(1, 3));
    }

    #[test]
    fn ball_radius_tracks_input_width() {
        let b = Ball { c: rat(2, 1), r: rat(1, 1000) };
        let l = b.ln().unwrap();
        assert!(l.r >= rat(1, 2000) && l.r < rat(1, 1000));
    }
}
