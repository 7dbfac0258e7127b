use rug::Rational;

use super::instance::{FamilyError, FamilyInstance};
use crate::exprlang::{print, Expr, ExprKind, Interval};
use crate::numkernel::Real;
use crate::taylor::eval_value;
use crate::testers::{sign_test, Mode, SignConfig, Verdict};

/// Power mean `f(x)^(g(x)/x)` with the interval on which it is claimed LCM.
#[derive(Clone, Debug)]
pub struct PowerMean {
    pub expr: Expr,
    pub interval: Interval,
    /// `log f`, the exponent base.
    pub log_base: Expr,
}

const CHECK_PREC: u32 = 128;

fn is_one(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Const(c) if *c == 1)
}

/// `exp(g * (phi/x))`, using the continued quotient when `phi(0) = 0`.
fn power_mean_expr(phi: Expr, g: Expr, phi0_zero: bool) -> Expr {
    let q = if phi0_zero { Expr::over_x(phi) } else { Expr::div(phi, Expr::var()) };
    if is_one(&g) {
        Expr::exp(q)
    } else {
        Expr::exp(Expr::mul(g, q))
    }
}

fn check_sign(e: &Expr, i: &Interval, mode: Mode, what: &str) -> Result<(), FamilyError> {
    let cfg = SignConfig { order: 8, grid_size: 24, precision: CHECK_PREC, ..SignConfig::default() };
    match sign_test(e, i, mode, &cfg) {
        Ok(r) => match r.verdict {
            Verdict::Fail { n, ref x, .. } => Err(FamilyError::Precondition(format!("{what} fails at order {n}, x = {}", x.to_sci(8)))),
            _ => Ok(()),
        },
        Err(err) => Err(FamilyError::Precondition(format!("{what}: {err}"))),
    }
}

fn value_at_zero(e: &Expr) -> Result<Real, FamilyError> {
    eval_value(e, &Real::zero(CHECK_PREC)).map_err(|err| FamilyError::Precondition(format!("log f is not defined at 0: {err}")))
}

/// `f^(g/x)`, LCM on `(0, b)` when `log f` is Bernstein on `[0, b)` and `g` is CM there.
///
/// Both premises are checked numerically (`log f(0) >= 0` plus sign tests at
/// a modest order); a failure is an error, an inconclusive test is accepted.
pub fn build_power_mean(f: Expr, g: Expr, b: Option<Rational>) -> Result<PowerMean, FamilyError> {
    let interval = Interval::open(Some(Rational::new()), b);
    let log_f = Expr::log(f);
    let l0 = value_at_zero(&log_f)?;
    let eps = Real::pow2(-(CHECK_PREC as i32) + 24, CHECK_PREC);
    if l0 < -&eps {
        return Err(FamilyError::Precondition(format!("log f(0) = {} < 0, so log f is not Bernstein on [0, b)", l0.to_sci(8))));
    }
    check_sign(&log_f, &interval, Mode::Bern, "log f Bernstein")?;
    if !g.is_closed() {
        check_sign(&g, &interval, Mode::Cm, "g completely monotone")?;
    }
    let expr = power_mean_expr(log_f.clone(), g, l0.abs() <= eps);
    Ok(PowerMean { expr, interval, log_base: log_f })
}

/// The power mean of the Gamma ratio:
/// `[c0 Gamma(x+b) / ((x+a)^beta Gamma(x+a))]^(g/x)` on `(0, inf)`, with
/// `phi(x) = log Gamma(x+b) - log Gamma(x+a) - beta log(x+a) + log c0`.
pub fn build_gamma_power_mean(a: &Rational, b: &Rational, beta: &Rational, c0: Expr, g: Expr) -> Result<PowerMean, FamilyError> {
    if a.cmp0() != std::cmp::Ordering::Greater || b.cmp0() != std::cmp::Ordering::Greater {
        return Err(FamilyError::Precondition("a > 0 and b > 0 required".into()));
    }
    let gap = Rational::from(b - a);
    if !(gap.cmp0() != std::cmp::Ordering::Less && gap < 1) {
        return Err(FamilyError::Precondition(format!("0 < 1 - b + a <= 1 required, here 1 - b + a = {}", print(&Expr::constant(Rational::from(1 - gap.clone()))))));
    }
    if *beta > gap {
        return Err(FamilyError::Precondition("beta <= b - a required".into()));
    }
    let inst = FamilyInstance::GammaPowerLog { a: a.clone(), b: b.clone(), beta: beta.clone(), c0: Box::new(c0) };
    inst.validate()?;
    let phi = Expr::family(inst);
    let phi0 = value_at_zero(&phi)?;
    let eps = Real::pow2(-(CHECK_PREC as i32) + 24, CHECK_PREC);
    if phi0 < -&eps {
        return Err(FamilyError::Precondition(format!(
            "c0 >= a^beta * Gamma(a) / Gamma(b) violated: log c0 falls short by {}",
            (-phi0).to_sci(6)
        )));
    }
    let interval = Interval::positive();
    if !g.is_closed() {
        check_sign(&g, &interval, Mode::Cm, "g completely monotone")?;
    }
    let expr = power_mean_expr(phi.clone(), g, phi0.abs() <= eps);
    Ok(PowerMean { expr, interval, log_base: phi })
}

/// `1 - beta - (e^((1-b+a) t) - 1)/(e^t - 1)`, with the limit `b - a - beta` at `t = 0`.
pub fn kernel_phi(t: &Real, a: &Real, b: &Real, beta: &Real) -> Real {
    let p = t.prec();
    if t.is_zero() {
        return &(b - a) - beta;
    }
    let c = &(&Real::one(p) - b) + a;
    let ratio = &(&c * t).exp_m1() / &t.exp_m1();
    &(&Real::one(p) - beta) - &ratio
}

/// `1 + log Gamma(x+1)/x - log(x+beta)` for `0 <= beta <= 1`.
pub fn vogt_expr(beta: &Rational) -> Result<Expr, FamilyError> {
    let inst = FamilyInstance::Vogt { beta: beta.clone() };
    inst.validate()?;
    Ok(Expr::family(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use crate::numkernel::log_gamma;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn kernel_values() {
        let p = 128;
        let r = |v: f64| Real::from_f64(v, p);
        assert!(kernel_phi(&r(0.0), &r(0.0), &r(0.5), &r(0.5)).is_zero());
        let v = kernel_phi(&r(1.0), &r(0.0), &r(0.5), &r(0.0)).to_f64();
        let want = 1.0 - (0.5f64.exp() - 1.0) / (1f64.exp() - 1.0);
        assert!((v - want).abs() < 1e-15);
        assert!((kernel_phi(&r(1e-30), &r(0.0), &r(0.5), &r(0.5)).to_f64()).abs() < 1e-20);
    }

    #[test]
    fn vogt_values() {
        let p = 128;
        let v = eval_value(&vogt_expr(&q(1, 1)).unwrap(), &Real::one(p)).unwrap();
        assert!((v.to_f64() - (1.0 - 2f64.ln())).abs() < 1e-15);
        let v = eval_value(&vogt_expr(&q(0, 1)).unwrap(), &Real::one(p)).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-15);
        let x = Real::from_i64(2, p);
        let v = eval_value(&vogt_expr(&q(1, 1)).unwrap(), &x).unwrap();
        let want = &(&Real::one(p) + &(&log_gamma(&Real::from_i64(3, p)).unwrap() / 2)) - &Real::from_i64(3, p).ln();
        assert!((&v - &want).abs().to_f64() < 1e-30);
        assert!(vogt_expr(&q(3, 2)).is_err());
    }

    #[test]
    fn gamma_power_mean_threshold() {
        let sqrt_pi = parse_expr("sqrt(pi)").unwrap();
        assert!(build_gamma_power_mean(&q(1, 2), &q(1, 1), &q(0, 1), sqrt_pi.clone(), Expr::int(1)).is_ok());
        let half = parse_expr("sqrt(pi)/2").unwrap();
        let err = build_gamma_power_mean(&q(1, 2), &q(1, 1), &q(0, 1), half, Expr::int(1)).unwrap_err();
        assert!(err.to_string().contains("c0 >= a^beta * Gamma(a) / Gamma(b)"));
        let pm = build_gamma_power_mean(&q(1, 2), &q(1, 1), &q(0, 1), sqrt_pi, Expr::int(1)).unwrap();
        assert!(matches!(pm.expr.kind, ExprKind::Exp(_)));
    }

    #[test]
    fn generic_power_mean() {
        // f = 1 + 1/(x+1) has log f(0) = log 2 > 0
        let f = parse_expr("1 + 1/(x+1)").unwrap();
        assert!(build_power_mean(f, Expr::int(1), None).is_err());
        let f = parse_expr("2 - 1/(x+1)").unwrap();
        let pm = build_power_mean(f, Expr::int(1), None).unwrap();
        assert_eq!(pm.interval, Interval::positive());
    }
}
