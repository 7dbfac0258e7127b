use std::fmt;

use rug::Rational;

use super::jet::{factorial, Jet, JetError};
use crate::exprlang::{print, Expr, ExprKind};
use crate::numkernel::{log_gamma, polygamma_tower, KernelError, Real, GUARD_BITS};

/// Order used when none is requested.
pub const DEFAULT_ORDER: usize = 12;
/// Largest order accepted by [`eval_derivatives`].
pub const MAX_ORDER: usize = 30;

/// Default working precision for a given order: `max(64, 8N)` bits.
pub fn default_precision(order: usize) -> u32 {
    (8 * order as u32).max(64)
}

/// Failure to evaluate, naming the subexpression where it happened.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub subexpr: String,
    pub cause: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot evaluate `{}`: {}", self.subexpr, self.cause)
    }
}

impl std::error::Error for EvalError {}

fn fail(e: &Expr, cause: impl ToString) -> EvalError {
    EvalError { subexpr: print(e), cause: cause.to_string() }
}

/// `(log Gamma(x), psi(x), psi'(x)/2!, ...)`: `coeffs[n] = psi^(n-1)(x)/n!`.
pub fn tower_loggamma(x: &Real, order: usize) -> Result<Jet, KernelError> {
    let mut coeffs = vec![log_gamma(x)?];
    if order > 0 {
        let psis = polygamma_tower(x, order - 1)?;
        for (k, v) in psis.into_iter().enumerate() {
            let n = k + 1;
            coeffs.push(&v / &Real::from_rational(&Rational::from(factorial(n)), x.prec()));
        }
    }
    Ok(Jet::new(x.clone(), coeffs))
}

/// Scaled Taylor coefficients of `psi^(m)` at `g0` through `order`.
fn polygamma_coeffs(m: usize, g0: &Real, order: usize) -> Result<Vec<Real>, KernelError> {
    let t = polygamma_tower(g0, m + order)?;
    Ok((0..=order)
        .map(|k| &t[m + k] / &Real::from_rational(&Rational::from(factorial(k)), g0.prec()))
        .collect())
}

/// Jet of `e` at `x` through order `n`, computed with guard bits and rounded to the precision of `x`.
pub fn eval_derivatives(e: &Expr, x: &Real, n: usize) -> Result<Jet, EvalError> {
    if n > MAX_ORDER {
        return Err(fail(e, format!("order {n} exceeds the maximum {MAX_ORDER}")));
    }
    let p = x.prec();
    let xw = x.with_prec(p + GUARD_BITS);
    let jet = rec(e, &xw, n)?;
    let coeffs = jet.coeffs().iter().map(|c| c.with_prec(p)).collect();
    Ok(Jet::new(x.clone(), coeffs))
}

/// `e(x)` alone.
pub fn eval_value(e: &Expr, x: &Real) -> Result<Real, EvalError> {
    Ok(eval_derivatives(e, x, 0)?.value().clone())
}

fn jet_err(e: &Expr) -> impl Fn(JetError) -> EvalError + '_ {
    move |err| fail(e, err)
}

fn rec(e: &Expr, x: &Real, n: usize) -> Result<Jet, EvalError> {
    use ExprKind::*;
    let p = x.prec();
    if n > 0 && e.is_closed() {
        let v = rec(e, x, 0)?.value().clone();
        return Ok(Jet::constant(x, v, n));
    }
    let je = jet_err(e);
    Ok(match &e.kind {
        Var => Jet::variable(x, n),
        Const(q) => Jet::constant(x, Real::from_rational(q, p), n),
        Pi => Jet::constant(x, Real::pi(p), n),
        Add(a, b) => rec(a, x, n)?.add(&rec(b, x, n)?).map_err(je)?,
        Sub(a, b) => rec(a, x, n)?.sub(&rec(b, x, n)?).map_err(je)?,
        Mul(a, b) => rec(a, x, n)?.mul(&rec(b, x, n)?).map_err(je)?,
        Div(a, b) => rec(a, x, n)?.div(&rec(b, x, n)?).map_err(je)?,
        Neg(a) => rec(a, x, n)?.neg(),
        Pow(a, q) => rec(a, x, n)?.pow_rational(q).map_err(je)?,
        Exp(a) => rec(a, x, n)?.exp(),
        Log(a) => rec(a, x, n)?.ln().map_err(je)?,
        Sin(a) => rec(a, x, n)?.sin_cos().0,
        Cos(a) => rec(a, x, n)?.sin_cos().1,
        LogGamma(a) => {
            let inner = rec(a, x, n)?;
            let outer = tower_loggamma(inner.value(), n).map_err(|k| fail(e, k))?;
            inner.compose(outer.coeffs()).map_err(je)?
        }
        Digamma(a) => {
            let inner = rec(a, x, n)?;
            let outer = polygamma_coeffs(0, inner.value(), n).map_err(|k| fail(e, k))?;
            inner.compose(&outer).map_err(je)?
        }
        Polygamma(m, a) => {
            let inner = rec(a, x, n)?;
            let outer = polygamma_coeffs(*m as usize, inner.value(), n).map_err(|k| fail(e, k))?;
            inner.compose(&outer).map_err(je)?
        }
        OverX(phi) => over_x(e, phi, x, n)?,
        Family(node) => rec(&node.expansion, x, n)?,
    })
}

/// Jet of `phi(x)/x`. Dividing by `x` cancels about `(n+1) log2(1/|x|)` bits
/// near the origin, so `phi` is evaluated with that many extra bits; at and
/// extremely close to the origin the coefficients are `phi_(k+1)(0)`.
fn over_x(e: &Expr, phi: &Expr, x: &Real, n: usize) -> Result<Jet, EvalError> {
    let p = x.prec();
    let tiny = x.is_zero() || x.exponent().is_some_and(|ex| ex < -(p as i32));
    if tiny {
        let z = Real::zero(p);
        let j = rec(phi, &z, n + 1)?;
        let scale = j.coeff(1).abs().max(Real::one(p));
        if j.value().abs() > &scale * &Real::pow2(16 - p as i32, p) {
            return Err(fail(e, format!("phi(0) = {} is not zero, so phi(x)/x has a pole at 0", j.value().to_sci(6))));
        }
        return Ok(Jet::new(x.clone(), j.coeffs()[1..].to_vec()));
    }
    let loss = match x.exponent() {
        Some(ex) if ex < 1 => (n as u32 + 1) * (1 - ex) as u32,
        _ => 0,
    };
    let xw = x.with_prec(p + loss);
    let j = rec(phi, &xw, n)?;
    let q = j.div(&Jet::variable(&xw, n)).map_err(jet_err(e))?;
    Ok(Jet::new(x.clone(), q.coeffs().iter().map(|c| c.with_prec(p)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use crate::numkernel::{digamma, euler_gamma, polygamma};

    const P: u32 = 128;

    fn r(v: f64) -> Real {
        Real::from_f64(v, P)
    }

    fn jet(s: &str, x: f64, n: usize) -> Jet {
        eval_derivatives(&parse_expr(s).unwrap(), &r(x), n).unwrap()
    }

    fn assert_close(a: &Real, b: &Real, tol: f64) {
        let d = (a - b).abs().to_f64();
        assert!(d <= tol * b.abs().to_f64().max(1.0), "{} vs {}", a.to_sci(20), b.to_sci(20));
    }

    #[test]
    fn linfrac_log_derivatives() {
        let j = jet("log((x+1)/(x+2))", 1.0, 2);
        assert_close(&j.derivative(0), &(&r(2.0) / 3).ln(), 1e-30);
        assert_close(&j.derivative(1), &(&r(1.0) / 6), 1e-30);
        assert_close(&j.derivative(2), &(&r(-0.25) + &(&r(1.0) / 9)), 1e-30);
    }

    #[test]
    fn recip_power_and_identity() {
        let j = jet("(1 + 1/x)^2", 1.0, 1);
        assert_close(&j.derivative(0), &r(4.0), 1e-30);
        assert_close(&j.derivative(1), &r(-4.0), 1e-30);
        let j = jet("x", 3.5, 3);
        let d = j.derivatives();
        assert_eq!(d[0].to_f64(), 3.5);
        assert_eq!(d[1].to_f64(), 1.0);
        assert!(d[2].is_zero() && d[3].is_zero());
    }

    #[test]
    fn loggamma_tower_values() {
        let t = tower_loggamma(&r(1.0), 2).unwrap();
        assert!(t.coeff(0).is_zero());
        assert_close(t.coeff(1), &(-euler_gamma(P)), 1e-30);
        let pi = Real::pi(P);
        assert_close(t.coeff(2), &(&(&pi * &pi) / 12), 1e-30);
        let t = tower_loggamma(&r(2.0), 1).unwrap();
        assert_close(t.coeff(1), &(&Real::one(P) - &euler_gamma(P)), 1e-30);
        assert!(tower_loggamma(&r(0.0), 1).is_err());
    }

    #[test]
    fn loggamma_functional_equation() {
        let x = r(3.0);
        let a = tower_loggamma(&(&x + 1), 6).unwrap();
        let b = tower_loggamma(&x, 6).unwrap();
        let l = Jet::variable(&x, 6).ln().unwrap();
        let diff = a.sub(&b).unwrap();
        for k in 0..=6 {
            assert_close(diff.coeff(k), l.coeff(k), 1e-30);
        }
    }

    #[test]
    fn special_function_nodes() {
        let j = jet("psi(2*x + 1)", 0.75, 2);
        assert_close(&j.derivative(0), &digamma(&r(2.5)).unwrap(), 1e-30);
        assert_close(&j.derivative(1), &(&polygamma(1, &r(2.5)).unwrap() * 2), 1e-30);
        assert_close(&j.derivative(2), &(&polygamma(2, &r(2.5)).unwrap() * 4), 1e-30);
        let j = jet("polygamma(2, x*x)", 1.5, 1);
        assert_close(&j.derivative(1), &(&polygamma(3, &r(2.25)).unwrap() * 3), 1e-28);
    }

    #[test]
    fn over_x_near_and_at_zero() {
        // (e^x - 1)/x = sum x^k/(k+1)!
        let at0 = jet("overx(exp(x) - 1)", 0.0, 4);
        for k in 0..=4 {
            let want = Real::from_rational(&Rational::from((1, factorial(k + 1))), P);
            assert_close(at0.coeff(k), &want, 1e-30);
        }
        let near = jet("overx(exp(x) - 1)", 1e-9, 6);
        assert_close(near.coeff(0), at0.coeff(0), 1e-8);
        let want6 = Real::from_rational(&Rational::from((1, factorial(7))), P);
        assert_close(near.coeff(6), &want6, 1e-8);
        let err = eval_derivatives(&parse_expr("overx(exp(x))").unwrap(), &r(0.0), 2).unwrap_err();
        assert!(err.cause.contains("pole"));
    }

    #[test]
    fn domain_errors_name_subexpression() {
        let err = eval_derivatives(&parse_expr("1 + log(x - 2)").unwrap(), &r(1.0), 1).unwrap_err();
        assert_eq!(err.subexpr, "log(x - 2)");
        let err = eval_derivatives(&parse_expr("loggamma(x)").unwrap(), &r(-1.0), 1).unwrap_err();
        assert_eq!(err.subexpr, "loggamma(x)");
        assert!(eval_derivatives(&parse_expr("x").unwrap(), &r(1.0), MAX_ORDER + 1).is_err());
    }
}
