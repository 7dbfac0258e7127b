use rug::{Integer, Rational};

use crate::numkernel::Real;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("division by a jet with zero leading value")]
    ZeroDivision,
    #[error("logarithm of a jet with nonpositive leading value {0}")]
    LogDomain(String),
    #[error("jets of order {0} and {1} cannot be combined")]
    OrderMismatch(usize, usize),
    #[error("order {needed} required, jet has order {have}")]
    InsufficientOrder { needed: usize, have: usize },
}

/// Truncated Taylor expansion at a point: `coeffs[n] = f^(n)(x) / n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    x: Real,
    coeffs: Vec<Real>,
}

pub fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

impl Jet {
    /// Jet from scaled coefficients; panics on an empty coefficient list.
    pub fn new(x: Real, coeffs: Vec<Real>) -> Jet {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { x, coeffs }
    }

    /// Jet from raw derivatives `f, f', f'', ...`.
    pub fn from_derivatives(x: Real, derivs: Vec<Real>) -> Jet {
        let coeffs = derivs
            .into_iter()
            .enumerate()
            .map(|(n, d)| {
                let p = d.prec();
                &d / &Real::from_rational(&Rational::from(factorial(n)), p)
            })
            .collect();
        Jet::new(x, coeffs)
    }

    pub fn constant(x: &Real, value: Real, order: usize) -> Jet {
        let p = x.prec().max(value.prec());
        let mut coeffs = vec![value];
        coeffs.extend((0..order).map(|_| Real::zero(p)));
        Jet { x: x.clone(), coeffs }
    }

    /// The identity function at `x`.
    pub fn variable(x: &Real, order: usize) -> Jet {
        let p = x.prec();
        let mut coeffs = vec![x.clone()];
        if order >= 1 {
            coeffs.push(Real::one(p));
        }
        coeffs.extend((1..order).map(|_| Real::zero(p)));
        Jet { x: x.clone(), coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn base_point(&self) -> &Real {
        &self.x
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Real {
        &self.coeffs[n]
    }

    pub fn value(&self) -> &Real {
        &self.coeffs[0]
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(Real::prec).max().unwrap_or(self.x.prec())
    }

    /// `f^(n)(x) = coeffs[n] * n!`.
    pub fn derivative(&self, n: usize) -> Real {
        let c = &self.coeffs[n];
        c * &Real::from_rational(&Rational::from(factorial(n)), c.prec())
    }

    pub fn derivatives(&self) -> Vec<Real> {
        (0..=self.order()).map(|n| self.derivative(n)).collect()
    }

    /// Same function, fewer terms.
    pub fn truncate(&self, order: usize) -> Jet {
        Jet { x: self.x.clone(), coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    /// Rounds every coefficient to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Jet {
        Jet { x: self.x.with_prec(prec), coeffs: self.coeffs.iter().map(|c| c.with_prec(prec)).collect() }
    }

    fn check(&self, other: &Jet) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&Real) -> Real) -> Jet {
        Jet { x: self.x.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        Ok(Jet { x: self.x.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        Ok(Jet { x: self.x.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn neg(&self) -> Jet {
        self.map(|c| -c)
    }

    pub fn scale(&self, s: &Real) -> Jet {
        self.map(|c| c * s)
    }

    pub fn add_scalar(&self, s: &Real) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] = &j.coeffs[0] + s;
        j
    }

    /// Leibniz product (Cauchy convolution of the scaled coefficients).
    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let n = self.order();
        let p = self.prec().max(other.prec());
        let coeffs = (0..=n)
            .map(|k| {
                let mut s = Real::zero(p);
                for j in 0..=k {
                    s = &s + &(&self.coeffs[j] * &other.coeffs[k - j]);
                }
                s
            })
            .collect();
        Ok(Jet { x: self.x.clone(), coeffs })
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check(other)?;
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(JetError::ZeroDivision);
        }
        let mut q: Vec<Real> = Vec::with_capacity(self.coeffs.len());
        for k in 0..=self.order() {
            let mut s = self.coeffs[k].clone();
            for j in 1..=k {
                s = &s - &(&other.coeffs[j] * &q[k - j]);
            }
            q.push(&s / b0);
        }
        Ok(Jet { x: self.x.clone(), coeffs: q })
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let one = Jet::constant(&self.x, Real::one(self.prec()), self.order());
        one.div(self)
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut e = vec![self.coeffs[0].exp()];
        for k in 1..=n {
            let mut s = Real::zero(self.prec());
            for j in 1..=k {
                s = &s + &(&(&self.coeffs[j] * &e[k - j]) * (j as i32));
            }
            e.push(&s / (k as i32));
        }
        Jet { x: self.x.clone(), coeffs: e }
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a0 = &self.coeffs[0];
        if !a0.is_positive() {
            return Err(JetError::LogDomain(a0.to_sci(6)));
        }
        let n = self.order();
        let mut l = vec![a0.ln()];
        for k in 1..=n {
            let mut s = &self.coeffs[k] * (k as i32);
            for j in 1..k {
                s = &s - &(&(&l[j] * &self.coeffs[k - j]) * (j as i32));
            }
            l.push(&(&s / (k as i32)) / a0);
        }
        Ok(Jet { x: self.x.clone(), coeffs: l })
    }

    /// Integer power by repeated squaring; negative powers go through `recip`.
    pub fn powi(&self, k: i64) -> Result<Jet, JetError> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let mut result = Jet::constant(&self.x, Real::one(self.prec()), self.order());
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Real power, as `exp(c * log(self))`.
    pub fn powf(&self, c: &Real) -> Result<Jet, JetError> {
        Ok(self.ln()?.scale(c).exp())
    }

    /// Power with a rational exponent: integers stay exact in sign, others need a positive base.
    pub fn pow_rational(&self, q: &Rational) -> Result<Jet, JetError> {
        if *q.denom() == 1 {
            if let Some(k) = q.numer().to_i64() {
                if k.unsigned_abs() <= 64 {
                    return self.powi(k);
                }
            }
        }
        self.powf(&Real::from_rational(q, self.prec()))
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let p = self.prec();
        let mut s = vec![self.coeffs[0].sin()];
        let mut c = vec![self.coeffs[0].cos()];
        for k in 1..=n {
            let mut ss = Real::zero(p);
            let mut cc = Real::zero(p);
            for j in 1..=k {
                let ja = &self.coeffs[j] * (j as i32);
                ss = &ss + &(&ja * &c[k - j]);
                cc = &cc - &(&ja * &s[k - j]);
            }
            s.push(&ss / (k as i32));
            c.push(&cc / (k as i32));
        }
        (Jet { x: self.x.clone(), coeffs: s }, Jet { x: self.x.clone(), coeffs: c })
    }

    /// `F(self)` where `outer` holds the scaled Taylor coefficients of `F` at `self.value()`.
    pub fn compose(&self, outer: &[Real]) -> Result<Jet, JetError> {
        let n = self.order();
        if outer.len() <= n {
            return Err(JetError::InsufficientOrder { needed: n, have: outer.len().saturating_sub(1) });
        }
        let p = self.prec();
        // affine inner function: F_k * h1^k
        if n < 2 || self.coeffs[2..].iter().all(Real::is_zero) {
            let h1 = if n >= 1 { self.coeffs[1].clone() } else { Real::zero(p) };
            let mut pw = Real::one(p);
            let mut coeffs = Vec::with_capacity(n + 1);
            for f in outer.iter().take(n + 1) {
                coeffs.push(f * &pw);
                pw = &pw * &h1;
            }
            return Ok(Jet { x: self.x.clone(), coeffs });
        }
        let mut h = self.clone();
        h.coeffs[0] = Real::zero(p);
        let mut acc = Jet::constant(&self.x, outer[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul(&h)?.add_scalar(&outer[k]);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn r(v: f64) -> Real {
        Real::from_f64(v, P)
    }

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exp_squared_is_exp_of_double() {
        let x = r(0.0);
        let e = Jet::variable(&x, 4).neg().exp();
        let sq = e.mul(&e).unwrap();
        let want = [1.0, -2.0, 2.0, -4.0 / 3.0, 2.0 / 3.0];
        for (c, w) in sq.coeffs().iter().zip(want) {
            assert!(close(c, w, 1e-30), "{c} vs {w}");
        }
    }

    #[test]
    fn geometric_and_mercator() {
        let inv = Jet::variable(&r(2.0), 3).recip().unwrap();
        for (c, w) in inv.coeffs().iter().zip([0.5, -0.25, 0.125, -0.0625]) {
            assert!(close(c, w, 1e-30));
        }
        let lg = Jet::variable(&r(0.0), 3).add_scalar(&r(1.0)).ln().unwrap();
        for (c, w) in lg.coeffs().iter().zip([0.0, 1.0, -0.5, 1.0 / 3.0]) {
            assert!(close(c, w, 1e-30));
        }
    }

    #[test]
    fn errors() {
        let z = Jet::variable(&r(0.0), 2);
        assert_eq!(Jet::constant(&r(0.0), r(1.0), 2).div(&z), Err(JetError::ZeroDivision));
        assert!(matches!(z.ln(), Err(JetError::LogDomain(_))));
        assert!(matches!(z.add(&z.truncate(1)), Err(JetError::OrderMismatch(2, 1))));
    }

    #[test]
    fn powers_agree() {
        let j = Jet::variable(&r(1.5), 6).add_scalar(&r(0.25));
        let a = j.powi(3).unwrap();
        let b = j.powf(&r(3.0)).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs().to_f64() < 1e-30);
        }
        let neg = Jet::variable(&r(-2.0), 3).powi(-1).unwrap();
        assert!(close(neg.coeff(0), -0.5, 1e-30));
        assert!(close(neg.coeff(1), -0.25, 1e-30));
    }

    #[test]
    fn sin_cos_and_compose() {
        let x = r(0.7);
        let j = Jet::variable(&x, 8);
        let (s, c) = j.sin_cos();
        // sin composed via its Taylor coefficients around 0.7
        let outer: Vec<Real> = (0..=8)
            .map(|k| {
                let d = match k % 4 {
                    0 => x.sin(),
                    1 => x.cos(),
                    2 => -x.sin(),
                    _ => -x.cos(),
                };
                &d / &Real::from_rational(&Rational::from(factorial(k)), P)
            })
            .collect();
        let viac = j.compose(&outer).unwrap();
        for k in 0..=8 {
            assert!((&viac.coeffs()[k] - &s.coeffs()[k]).abs().to_f64() < 1e-30);
        }
        assert!(close(c.coeff(0), 0.7f64.cos(), 1e-15));
        // non-affine inner: exp(x^2) at 0 has coefficients 1, 0, 1, 0, 1/2
        let sq = Jet::variable(&r(0.0), 4).powi(2).unwrap();
        let ex: Vec<Real> = (0..=4).map(|k| Real::from_rational(&Rational::from((1, factorial(k))), P)).collect();
        let e2 = sq.compose(&ex).unwrap();
        for (c, w) in e2.coeffs().iter().zip([1.0, 0.0, 1.0, 0.0, 0.5]) {
            assert!(close(c, w, 1e-30));
        }
    }
}
