use rug::ops::Pow;
use std::cmp::Ordering;
use std::fmt;

use rug::Rational;
use serde::{Serialize, Serializer};

use crate::numkernel::Real;

/// One end of an interval. An `Infinite` lower end is `-inf`, an upper end `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Open(Rational),
    Closed(Rational),
    Infinite,
}

impl Bound {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Open(q) | Bound::Closed(q) => Some(q),
            Bound::Infinite => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Bound::Closed(_))
    }
}

/// Real interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Interval {
        Interval { lo, hi }
    }

    /// `(lo, hi)`; `None` means an infinite end.
    pub fn open(lo: Option<Rational>, hi: Option<Rational>) -> Interval {
        Interval {
            lo: lo.map_or(Bound::Infinite, Bound::Open),
            hi: hi.map_or(Bound::Infinite, Bound::Open),
        }
    }

    pub fn real_line() -> Interval {
        Interval::open(None, None)
    }

    pub fn positive() -> Interval {
        Interval::open(Some(Rational::new()), None)
    }

    /// `(lo, inf)`.
    pub fn above(lo: Rational) -> Interval {
        Interval::open(Some(lo), None)
    }

    pub fn lo_value(&self) -> Option<&Rational> {
        self.lo.value()
    }

    pub fn hi_value(&self) -> Option<&Rational> {
        self.hi.value()
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Bound::Closed(a), Bound::Closed(b)) => a > b,
            (lo, hi) => match (lo.value(), hi.value()) {
                (Some(a), Some(b)) => a >= b,
                _ => false,
            },
        }
    }

    /// Length, or `None` if unbounded.
    pub fn length(&self) -> Option<Rational> {
        match (self.lo_value(), self.hi_value()) {
            (Some(a), Some(b)) => Some(Rational::from(b - a)),
            _ => None,
        }
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lo {
            Bound::Open(a) => x > a,
            Bound::Closed(a) => x >= a,
            Bound::Infinite => true,
        };
        let hi_ok = match &self.hi {
            Bound::Open(b) => x < b,
            Bound::Closed(b) => x <= b,
            Bound::Infinite => true,
        };
        lo_ok && hi_ok
    }

    pub fn contains_real(&self, x: &Real) -> bool {
        if !x.is_finite() {
            return false;
        }
        let cmp = |q: &Rational| x.as_float().partial_cmp(q);
        let lo_ok = match &self.lo {
            Bound::Open(a) => cmp(a) == Some(Ordering::Greater),
            Bound::Closed(a) => matches!(cmp(a), Some(Ordering::Greater | Ordering::Equal)),
            Bound::Infinite => true,
        };
        let hi_ok = match &self.hi {
            Bound::Open(b) => cmp(b) == Some(Ordering::Less),
            Bound::Closed(b) => matches!(cmp(b), Some(Ordering::Less | Ordering::Equal)),
            Bound::Infinite => true,
        };
        lo_ok && hi_ok
    }

    /// True when every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match (&self.lo, &other.lo) {
            (_, Bound::Infinite) => true,
            (Bound::Infinite, _) => false,
            (Bound::Open(a), Bound::Open(b)) | (Bound::Closed(a), Bound::Closed(b)) | (Bound::Open(a), Bound::Closed(b)) => a >= b,
            (Bound::Closed(a), Bound::Open(b)) => a > b,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (_, Bound::Infinite) => true,
            (Bound::Infinite, _) => false,
            (Bound::Open(a), Bound::Open(b)) | (Bound::Closed(a), Bound::Closed(b)) | (Bound::Open(a), Bound::Closed(b)) => a <= b,
            (Bound::Closed(a), Bound::Open(b)) => a < b,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = tighter(&self.lo, &other.lo, Ordering::Greater);
        let hi = tighter(&self.hi, &other.hi, Ordering::Less);
        Interval { lo, hi }
    }

    /// Lower end as a `Real`; `None` for `-inf`.
    pub fn lo_real(&self, prec: u32) -> Option<Real> {
        self.lo_value().map(|q| Real::from_rational(q, prec))
    }

    pub fn hi_real(&self, prec: u32) -> Option<Real> {
        self.hi_value().map(|q| Real::from_rational(q, prec))
    }
}

fn tighter(a: &Bound, b: &Bound, keep: Ordering) -> Bound {
    match (a.value(), b.value()) {
        (None, _) => b.clone(),
        (_, None) => a.clone(),
        (Some(x), Some(y)) => match x.cmp(y) {
            Ordering::Equal => {
                if a.is_closed() && b.is_closed() {
                    a.clone()
                } else {
                    Bound::Open(x.clone())
                }
            }
            o if o == keep => a.clone(),
            _ => b.clone(),
        },
    }
}

/// Human-readable rational: integer, short terminating decimal, or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        return q.numer().to_string();
    }
    if let Some(s) = terminating_decimal(q) {
        return s;
    }
    format!("{}/{}", q.numer(), q.denom())
}

fn terminating_decimal(q: &Rational) -> Option<String> {
    let mut d = q.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_divisible_u(2) {
        d /= 2;
        twos += 1;
    }
    while d.is_divisible_u(5) {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let places = twos.max(fives);
    if places > 24 {
        return None;
    }
    let scale = rug::Integer::from(10).pow(places);
    let scaled = Rational::from(q * &scale);
    let n = scaled.numer().clone();
    let neg = n < 0;
    let digits = n.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int_part, frac) = digits.split_at(digits.len() - places as usize);
    let frac = frac.trim_end_matches('0');
    Some(format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac))
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lb, lv) = match &self.lo {
            Bound::Open(q) => ("(", format_rational(q)),
            Bound::Closed(q) => ("[", format_rational(q)),
            Bound::Infinite => ("(", "-inf".to_string()),
        };
        let (hb, hv) = match &self.hi {
            Bound::Open(q) => (")", format_rational(q)),
            Bound::Closed(q) => ("]", format_rational(q)),
            Bound::Infinite => (")", "inf".to_string()),
        };
        write!(f, "{lb}{lv}, {hv}{hb}")
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn display_forms() {
        assert_eq!(Interval::positive().to_string(), "(0, inf)");
        assert_eq!(Interval::new(Bound::Closed(q(-1, 4)), Bound::Open(q(1, 3))).to_string(), "[-0.25, 1/3)");
        assert_eq!(format_rational(&q(-3, 2)), "-1.5");
        assert_eq!(format_rational(&q(1, 64)), "0.015625");
    }

    #[test]
    fn subset_and_intersection() {
        let a = Interval::open(Some(q(1, 1)), Some(q(2, 1)));
        let b = Interval::positive();
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        let closed0 = Interval::new(Bound::Closed(q(0, 1)), Bound::Infinite);
        assert!(!closed0.is_subset_of(&b));
        assert!(b.is_subset_of(&closed0));
        assert_eq!(b.intersect(&Interval::open(Some(q(-5, 1)), Some(q(3, 1)))), Interval::open(Some(q(0, 1)), Some(q(3, 1))));
        assert!(Interval::open(Some(q(2, 1)), Some(q(2, 1))).is_empty());
    }

    #[test]
    fn real_membership() {
        let i = Interval::open(Some(q(0, 1)), Some(q(1, 1)));
        assert!(i.contains_real(&Real::from_f64(0.5, 64)));
        assert!(!i.contains_real(&Real::zero(64)));
        assert!(!i.contains_real(&Real::one(64)));
    }
}
