//! Arbitrary-precision reals with a decimal-digit precision contract.
//!
//! A [`Real`] carries the number of decimal digits it was created for. The
//! binary precision is derived from it with 32 guard bits, and every
//! operation rounds to nearest with ties to even (MPFR `RNDN`). Mixed
//! precision operations run at the larger of the two precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};
use thiserror::Error;

/// Smallest accepted decimal precision.
pub const MIN_DIGITS: u32 = 10;

/// Guard bits appended to the converted decimal precision.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("malformed decimal literal {0:?}")]
    Parse(String),
    #[error("precision of {0} digits is below the minimum of {MIN_DIGITS}")]
    PrecisionTooLow(u32),
    #[error("{op} is undefined for argument {arg}")]
    Domain { op: &'static str, arg: String },
}

/// Binary precision used for `digits` decimal digits.
pub fn precision_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

/// High-precision real number.
#[derive(Clone)]
pub struct Real {
    value: Float,
    digits: u32,
}

impl Real {
    fn wrap(value: Float, digits: u32) -> Real {
        Real { value, digits }
    }

    fn check_digits(digits: u32) -> Result<(), RealError> {
        if digits < MIN_DIGITS {
            Err(RealError::PrecisionTooLow(digits))
        } else {
            Ok(())
        }
    }

    /// Parses a signed decimal (optionally with an `e` exponent) rounded to
    /// the precision of `digits` decimal digits.
    pub fn from_decimal(s: &str, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        let trimmed = s.trim();
        if !is_decimal_literal(trimmed) {
            return Err(RealError::Parse(s.to_string()));
        }
        let parsed = Float::parse(trimmed).map_err(|_| RealError::Parse(s.to_string()))?;
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), parsed),
            digits,
        ))
    }

    pub fn from_integer(n: &Integer, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), n),
            digits,
        ))
    }

    pub fn from_i64(n: i64, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), n),
            digits,
        ))
    }

    /// Nearest value to an `f64`; for tests and command-line parsing of short
    /// literals. Prefer [`Real::from_decimal`] when the decimal value matters.
    pub fn from_f64(v: f64, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), v),
            digits,
        ))
    }

    pub fn zero(digits: u32) -> Result<Real, RealError> {
        Self::from_i64(0, digits)
    }

    pub fn one(digits: u32) -> Result<Real, RealError> {
        Self::from_i64(1, digits)
    }

    /// Ratio `num / 10^scale`, rounded once.
    pub fn from_scaled(num: &Integer, scale: u32, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        let den = Integer::from(10).pow(scale);
        let q = rug::Rational::from((num.clone(), den));
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), &q),
            digits,
        ))
    }

    /// Wraps a float computed elsewhere; the float keeps its own precision.
    pub fn from_float(value: Float, digits: u32) -> Real {
        Real::wrap(value, digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn precision_bits(&self) -> u32 {
        self.value.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Re-rounds to a different decimal precision.
    pub fn with_digits(&self, digits: u32) -> Result<Real, RealError> {
        Self::check_digits(digits)?;
        Ok(Real::wrap(
            Float::with_val(precision_bits(digits), &self.value),
            digits,
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn abs(&self) -> Real {
        Real::wrap(self.value.clone().abs(), self.digits)
    }

    /// Product with an exact integer, rounded once.
    pub fn mul_integer(&self, n: &Integer) -> Real {
        Real::wrap(
            Float::with_val(self.value.prec(), &self.value * n),
            self.digits,
        )
    }

    pub fn sqrt(&self) -> Result<Real, RealError> {
        if self.value.is_sign_negative() && !self.value.is_zero() {
            return Err(self.domain("sqrt"));
        }
        Ok(Real::wrap(self.value.clone().sqrt(), self.digits))
    }

    pub fn cos(&self) -> Real {
        Real::wrap(self.value.clone().cos(), self.digits)
    }

    /// Inverse cosine on `[-1, 1]`.
    pub fn arccos(&self) -> Result<Real, RealError> {
        if self.value > 1 || self.value < -1 {
            return Err(self.domain("arccos"));
        }
        Ok(Real::wrap(self.value.clone().acos(), self.digits))
    }

    pub fn cosh(&self) -> Real {
        Real::wrap(self.value.clone().cosh(), self.digits)
    }

    /// Inverse hyperbolic cosine on `[1, inf)`.
    pub fn arccosh(&self) -> Result<Real, RealError> {
        if self.value < 1 || !self.value.is_finite() {
            return Err(self.domain("arccosh"));
        }
        Ok(Real::wrap(self.value.clone().acosh(), self.digits))
    }

    /// `log10(|self|)` as a double; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(64, self.value.abs_ref()).log10().to_f64()
    }

    /// Nearest integer (ties to even) and the absolute distance to it.
    pub fn round_to_integer(&self) -> Option<(Integer, Real)> {
        let n = self.value.to_integer()?;
        let dist = Float::with_val(self.value.prec(), &self.value - &n).abs();
        Some((n, Real::wrap(dist, self.digits)))
    }

    fn domain(&self, op: &'static str) -> RealError {
        RealError::Domain {
            op,
            arg: render_sci(self, 20),
        }
    }
}

fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty() {
        return false;
    }
    if !all_digits(int_part) || !all_digits(frac_part) {
        return false;
    }
    match exponent {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && all_digits(e)
        }
    }
}

fn common_prec(a: &Real, b: &Real) -> (u32, u32) {
    (a.value.prec().max(b.value.prec()), a.digits.max(b.digits))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                let (prec, digits) = common_prec(self, rhs);
                Real::wrap(Float::with_val(prec, &self.value $op &rhs.value), digits)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(-self.value.clone(), self.digits)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(-self.value, self.digits)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl PartialEq<i32> for Real {
    fn eq(&self, other: &i32) -> bool {
        self.value == *other
    }
}

impl PartialOrd<i32> for Real {
    fn partial_cmp(&self, other: &i32) -> Option<Ordering> {
        self.value.partial_cmp(other)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}, D={})", render_sci(self, 30), self.digits)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_sci(self, self.digits as usize))
    }
}

/// Number of leading decimal digits on which `a` and `b` agree, measured as
/// `floor(-log10 |a - b|)` and clamped to `[0, D]` where `D` is the larger
/// of the two declared precisions.
pub fn agreement_digits(a: &Real, b: &Real) -> u32 {
    let (prec, digits) = common_prec(a, b);
    let diff = Float::with_val(prec, &a.value - &b.value);
    if diff.is_zero() {
        return digits;
    }
    if !diff.is_finite() {
        return 0;
    }
    let neg_log = -Float::with_val(64, diff.abs_ref()).log10();
    let floored = neg_log.floor().to_f64();
    if floored <= 0.0 {
        0
    } else if floored >= f64::from(digits) {
        digits
    } else {
        floored as u32
    }
}

/// Renders the exact binary value of `a` rounded half-even to `k` digits after
/// the decimal point, as `"+d.ddd"` / `"-d.ddd"`. A value that rounds to zero
/// is rendered with `+`.
pub fn render_fixed(a: &Real, k: u32) -> String {
    let scale = Integer::from(10).pow(k);
    // exact product: mantissa bits plus the bits of 10^k
    let prec = a.value.prec() + scale.significant_bits() + 2;
    let scaled = Float::with_val(prec, &a.value * &scale);
    let rounded = scaled
        .to_integer_round(Round::Nearest)
        .map(|(i, _)| i)
        .unwrap_or_default();
    let sign = if rounded < 0 { '-' } else { '+' };
    let digits = rounded.abs().to_string();
    let k = k as usize;
    let padded = if digits.len() <= k {
        format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - k);
    if k == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Scientific rendering with `sig` significant digits, e.g. `"-1.2500e-3"`.
/// Used for values without the `|a| < 10` bound of [`render_fixed`].
pub fn render_sci(a: &Real, sig: usize) -> String {
    if a.value.is_zero() {
        return "0".to_string();
    }
    a.value
        .to_string_radix_round(10, Some(sig.max(1)), Round::Nearest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn r(s: &str, d: u32) -> Real {
        Real::from_decimal(s, d).unwrap()
    }

    #[test]
    fn parse_exact_and_signed() {
        assert_eq!(r("0.5", 100), Real::from_f64(0.5, 100).unwrap());
        assert_eq!(r("-1", 50), Real::from_i64(-1, 50).unwrap());
        assert_eq!(r("+2.5e-1", 20).to_f64(), 0.25);
    }

    #[test]
    fn parse_tenth_is_within_bound() {
        let got = r("0.1", 30);
        // exact 1/10 evaluated at 200 digits
        let exact = Real::from_scaled(&Integer::from(1), 1, 200).unwrap();
        let diff = (&got - &exact).abs();
        assert!(diff < Real::from_decimal("1e-30", 200).unwrap());
    }

    #[test]
    fn parse_rejects_garbage_and_low_precision() {
        for bad in [
            "", "abc", "1.2.3", "--1", "1e", "inf", "nan", ".", "0x10", "1 2",
        ] {
            assert!(
                matches!(Real::from_decimal(bad, 20), Err(RealError::Parse(_))),
                "accepted {bad:?}"
            );
        }
        assert_eq!(
            Real::from_decimal("1", 9).unwrap_err(),
            RealError::PrecisionTooLow(9)
        );
    }

    #[test]
    fn precision_bits_include_guard() {
        assert_eq!(precision_bits(10), 34 + 32);
        assert_eq!(precision_bits(700), 2326 + 32);
    }

    #[test]
    fn trig_fixed_points() {
        let one = Real::one(40).unwrap();
        assert!(one.arccos().unwrap().is_zero());
        assert_eq!(Real::zero(40).unwrap().cos(), one);
        assert!(one.arccosh().unwrap().is_zero());
    }

    #[test]
    fn trig_domains() {
        assert!(matches!(
            r("1.0000001", 20).arccos(),
            Err(RealError::Domain { op: "arccos", .. })
        ));
        assert!(r("-1", 20).arccos().is_ok());
        assert!(matches!(
            r("0.999", 20).arccosh(),
            Err(RealError::Domain { op: "arccosh", .. })
        ));
        assert!(r("-0.5", 20).sqrt().is_err());
    }

    #[test]
    fn agreement_examples() {
        assert_eq!(agreement_digits(&r("0.123456", 50), &r("0.123499", 50)), 4);
        let x = r("0.3", 100);
        assert_eq!(agreement_digits(&x, &x), 100);
        assert_eq!(agreement_digits(&r("1.0", 50), &r("-1.0", 50)), 0);
    }

    #[test]
    fn agreement_uses_larger_precision() {
        let a = r("0.25", 20);
        let b = r("0.25", 60);
        assert_eq!(agreement_digits(&a, &b), 60);
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_fixed(&r("-0.5", 20), 4), "-0.5000");
        assert_eq!(render_fixed(&r("1.0", 20), 2), "+1.00");
        assert_eq!(render_fixed(&r("-0.0001", 20), 3), "+0.000");
        assert_eq!(render_fixed(&r("3.14159", 20), 0), "+3");
    }

    // Exact rational oracle: scale by 10^k, round half to even by hand.
    fn oracle_render(a: &Real, k: u32) -> String {
        let q: Rational = a.as_float().to_rational().unwrap();
        let scaled = q * Integer::from(10).pow(k);
        let (floor, rem) = {
            let f = scaled.clone().floor();
            let n = f.numer().clone();
            (n.clone(), scaled - Rational::from(n))
        };
        let half = Rational::from((1, 2));
        let n = match rem.cmp(&half) {
            Ordering::Less => floor,
            Ordering::Greater => floor + 1,
            Ordering::Equal => {
                if floor.is_even() {
                    floor
                } else {
                    floor + 1
                }
            }
        };
        let sign = if n < 0 { "-" } else { "+" };
        let s = n.abs().to_string();
        let s = format!("{:0>width$}", s, width = k as usize + 1);
        let (i, f) = s.split_at(s.len() - k as usize);
        format!("{sign}{i}.{f}")
    }

    #[test]
    fn render_half_even_matches_rational_oracle() {
        // 0.0004999... just below the half, and values exactly on the half
        let cases = [
            ("0.00049999999999999999", 3),
            ("0.0005", 3),
            ("0.0015", 3),
            ("0.125", 2),
            ("0.375", 2),
            ("-0.625", 2),
            ("0.7071067811865475244008443621", 25),
        ];
        for (s, k) in cases {
            let a = r(s, 30);
            assert_eq!(render_fixed(&a, k), oracle_render(&a, k), "{s} at {k}");
        }
        // binary halves are exact: ties go to even
        assert_eq!(render_fixed(&r("0.125", 20), 2), "+0.12");
        assert_eq!(render_fixed(&r("0.375", 20), 2), "+0.38");
    }

    #[test]
    fn render_sci_and_display() {
        assert_eq!(render_sci(&r("-0.00125", 20), 3), "-1.25e-3");
        assert_eq!(render_sci(&Real::zero(20).unwrap(), 3), "0");
        let big = r("123456789.5", 30);
        let back = Real::from_decimal(&big.to_string(), 30).unwrap();
        assert_eq!(agreement_digits(&big, &back), 30);
    }

    #[test]
    fn mixed_precision_takes_max() {
        let a = r("0.1", 20);
        let b = r("0.2", 80);
        let c = &a + &b;
        assert_eq!(c.digits(), 80);
        assert_eq!(c.precision_bits(), precision_bits(80));
    }

    #[test]
    fn rounds_to_integer() {
        let (n, d) = r("41.97", 20).round_to_integer().unwrap();
        assert_eq!(n, 42);
        assert!((d.to_f64() - 0.03).abs() < 1e-12);
    }
}
