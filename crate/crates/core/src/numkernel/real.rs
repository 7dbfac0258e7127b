use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round, Special};
use rug::ops::Pow;
use rug::{Float, Rational};

/// Smallest precision (bits) accepted by the kernel.
pub const MIN_PRECISION: u32 = 16;

/// Extra bits carried through intermediate computations.
pub const GUARD_BITS: u32 = 16;

/// Arbitrary-precision real number.
///
/// Binary operations produce a result carrying the larger of the two operand
/// precisions, so values never silently lose bits when mixed.
#[derive(Clone, Debug)]
pub struct Real(Float);

impl Real {
    pub fn zero(prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), Special::Zero))
    }

    pub fn one(prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), 1))
    }

    pub fn from_i64(v: i64, prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), v))
    }

    pub fn from_f64(v: f64, prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), v))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), q))
    }

    pub fn from_float(f: Float) -> Real {
        Real(f)
    }

    /// Parses a decimal literal such as `1.5e-3`.
    pub fn parse(s: &str, prec: u32) -> Option<Real> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(Real(Float::with_val(clamp(prec), parsed)))
    }

    pub fn pi(prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), Constant::Pi))
    }

    pub fn ln2(prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), Constant::Log2))
    }

    /// `2^k` at the given precision.
    pub fn pow2(k: i32, prec: u32) -> Real {
        let one = Float::with_val(clamp(prec), 1);
        Real(one << k)
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Rounds (or widens) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Real {
        Real(Float::with_val(clamp(prec), &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Less)
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    /// Binary exponent `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero or non-finite.
    pub fn exponent(&self) -> Option<i32> {
        if self.0.is_normal() {
            self.0.get_exp()
        } else {
            None
        }
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn recip(&self) -> Real {
        Real(self.0.clone().recip())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.clone().exp())
    }

    /// `exp(x) - 1` without cancellation near zero.
    pub fn exp_m1(&self) -> Real {
        Real(self.0.clone().exp_m1())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    /// `ln(1 + x)` without cancellation near zero.
    pub fn ln_1p(&self) -> Real {
        Real(self.0.clone().ln_1p())
    }

    pub fn sin(&self) -> Real {
        Real(self.0.clone().sin())
    }

    pub fn cos(&self) -> Real {
        Real(self.0.clone().cos())
    }

    pub fn powi(&self, k: i32) -> Real {
        Real(self.0.clone().pow(k))
    }

    pub fn powf(&self, e: &Real) -> Real {
        let p = self.prec().max(e.prec());
        let mut base = Float::with_val(p, &self.0);
        rug::ops::PowAssign::pow_assign(&mut base, &e.0);
        Real(base)
    }

    /// Multiplies by `2^k` exactly.
    pub fn ldexp(&self, k: i32) -> Real {
        Real(self.0.clone() << k)
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Floor as an integer, if it fits.
    pub fn floor_i64(&self) -> Option<i64> {
        let f = self.0.clone().floor();
        f.to_integer().and_then(|i| i.to_i64())
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        let s = self.0.to_string_radix_round(10, Some(digits.max(1)), Round::Nearest);
        normalize_sci(&s)
    }

    /// Decimal digits that represent the full precision.
    pub fn to_full_string(&self) -> String {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        self.to_sci(digits)
    }
}

fn clamp(prec: u32) -> u32 {
    prec.max(MIN_PRECISION)
}

fn normalize_sci(s: &str) -> String {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (sign, digits) = match mant.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mant),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    let mut all: String = format!("{int_part}{frac_part}");
    let lead = all.chars().take_while(|c| *c == '0').count();
    if lead == all.len() {
        return "0".to_string();
    }
    all.drain(..lead);
    let exp10 = exp + int_part.len() as i64 - 1 - lead as i64;
    let trimmed = all.trim_end_matches('0');
    let (first, rest) = trimmed.split_at(1);
    if rest.is_empty() {
        format!("{sign}{first}e{exp10}")
    } else {
        format!("{sign}{first}.{rest}e{exp10}")
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "{}", self.to_sci(d)),
            None => write!(f, "{}", self.to_sci(20)),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<i32> for Real {
    fn eq(&self, other: &i32) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i32> for Real {
    fn partial_cmp(&self, other: &i32) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec().max(rhs.prec());
                Real(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                &self $op rhs
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                &self $op &rhs
            }
        }
        impl $tr<i32> for &Real {
            type Output = Real;
            fn $method(self, rhs: i32) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<i32> for Real {
            type Output = Real;
            fn $method(self, rhs: i32) -> Real {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_precision_takes_max() {
        let a = Real::from_i64(1, 64);
        let b = Real::from_i64(3, 200);
        assert_eq!((&a / &b).prec(), 200);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(Real::from_f64(0.125, 64).to_sci(5), "1.25e-1");
        assert_eq!(Real::from_i64(-1500, 64).to_sci(5), "-1.5e3");
        assert_eq!(Real::zero(64).to_sci(5), "0");
    }

    #[test]
    fn pow2_is_exact() {
        assert_eq!(Real::pow2(-3, 32), 0.125);
    }
}
