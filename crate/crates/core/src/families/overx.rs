use rug::{Integer, Rational};

use crate::numkernel::Real;
use crate::taylor::{factorial, Jet, JetError};

fn binom(n: usize, k: usize) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

fn int(v: Integer, p: u32) -> Real {
    Real::from_rational(&Rational::from(v), p)
}

/// `f^(n)(x)` for `f(x) = phi(x)/x` from the jet of `phi` at `x`:
///
/// `f^(n)(x) = x^(-n-1) sum_k C(n,k) (-1)^k k! x^(n-k) phi^(n-k)(x)`,
/// and `phi^(n+1)(0)/(n+1)` at the origin (where `phi(0) = 0` is assumed).
///
/// The sum cancels heavily for small `|x|`; supply a jet with enough extra
/// precision there.
pub fn phi_over_x_jet(phi: &Jet, n: usize) -> Result<Real, JetError> {
    let x = phi.base_point();
    let p = phi.prec();
    if x.is_zero() {
        if phi.order() < n + 1 {
            return Err(JetError::InsufficientOrder { needed: n + 1, have: phi.order() });
        }
        return Ok(&phi.derivative(n + 1) / (n as i32 + 1));
    }
    if phi.order() < n {
        return Err(JetError::InsufficientOrder { needed: n, have: phi.order() });
    }
    let mut sum = Real::zero(p);
    for k in 0..=n {
        let c = int(binom(n, k) * factorial(k), p);
        let t = &(&c * &x.powi((n - k) as i32)) * &phi.derivative(n - k);
        sum = if k % 2 == 0 { &sum + &t } else { &sum - &t };
    }
    Ok(&sum * &x.powi(-(n as i32) - 1))
}

/// `(Phi'(x), x^n phi^(n+1)(x))` where `Phi` is the sum in [`phi_over_x_jet`];
/// the two agree identically. `Phi'` is formed by differentiating each term
/// as a first-order jet.
pub fn phi_over_x_sum_derivative_check(phi: &Jet, n: usize) -> Result<(Real, Real), JetError> {
    if phi.order() < n + 1 {
        return Err(JetError::InsufficientOrder { needed: n + 1, have: phi.order() });
    }
    let x = phi.base_point().clone();
    let p = phi.prec();
    let xv = Jet::variable(&x, 1);
    let mut total = Jet::constant(&x, Real::zero(p), 1);
    for k in 0..=n {
        let j = n - k;
        // phi^(j) as a first-order jet
        let dj = Jet::new(x.clone(), vec![phi.derivative(j), phi.derivative(j + 1)]);
        let mut term = xv.powi(j as i64)?.mul(&dj)?;
        let mut c = int(binom(n, k) * factorial(k), p);
        if k % 2 == 1 {
            c = -c;
        }
        term = term.scale(&c);
        total = total.add(&term)?;
    }
    let lhs = total.derivative(1);
    let rhs = &x.powi(n as i32) * &phi.derivative(n + 1);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use crate::taylor::eval_derivatives;

    const P: u32 = 128;

    fn phi(src: &str, x: f64, n: usize) -> Jet {
        eval_derivatives(&parse_expr(src).unwrap(), &Real::from_f64(x, P), n).unwrap()
    }

    fn close(a: &Real, b: &Real) -> bool {
        (a - b).abs() <= &Real::pow2(-100, P) * &b.abs().max(Real::one(P))
    }

    #[test]
    fn at_origin() {
        assert_eq!(phi_over_x_jet(&phi("x^2", 0.0, 2), 1).unwrap().to_f64(), 1.0);
        assert!(close(&phi_over_x_jet(&phi("exp(x) - 1", 0.0, 2), 1).unwrap(), &Real::from_f64(0.5, P)));
        assert!(phi_over_x_jet(&phi("x^2", 0.0, 1), 1).is_err());
    }

    #[test]
    fn matches_quotient_jet() {
        let f = phi("sin(x)", 1.0, 2);
        let q = eval_derivatives(&parse_expr("sin(x)/x").unwrap(), &Real::one(P), 2).unwrap();
        assert!(close(&phi_over_x_jet(&f, 2).unwrap(), &q.derivative(2)));
    }

    #[test]
    fn derivative_identity() {
        let (l, r) = phi_over_x_sum_derivative_check(&phi("x^2", 2.0, 3), 2).unwrap();
        assert!(l.abs().to_f64() < 1e-30 && r.is_zero());
        let (l, r) = phi_over_x_sum_derivative_check(&phi("exp(x) - 1", 1.0, 4), 2).unwrap();
        assert!(close(&l, &r));
        assert!(close(&r, &Real::one(P).exp()));
        let (l, r) = phi_over_x_sum_derivative_check(&phi("sin(x)", 0.5, 5), 3).unwrap();
        let x = Real::from_f64(0.5, P);
        assert!(close(&l, &r));
        assert!(close(&r, &(&x.powi(3) * &x.sin())));
    }
}
