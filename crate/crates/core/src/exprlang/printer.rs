use std::fmt::Write;

use rug::Rational;

use super::ast::{Expr, ExprKind};
use super::interval::format_rational;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

/// Canonical text form; parsing it yields a structurally equal tree.
pub fn print(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, PREC_ADD, &mut s);
    s
}

fn is_plain_const(q: &Rational) -> bool {
    if q.cmp0() == std::cmp::Ordering::Less {
        return false;
    }
    !format_rational(q).contains('/')
}

fn write_const(q: &Rational, out: &mut String) {
    if is_plain_const(q) {
        out.push_str(&format_rational(q));
    } else {
        let _ = write!(out, "({})", format_rational(q));
    }
}

fn node_prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Add(..) | ExprKind::Sub(..) => PREC_ADD,
        ExprKind::Mul(..) | ExprKind::Div(..) => PREC_MUL,
        ExprKind::Neg(..) => PREC_NEG,
        ExprKind::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn write_expr(e: &Expr, min_prec: u8, out: &mut String) {
    let p = node_prec(e);
    if p < min_prec {
        out.push('(');
        write_inner(e, out);
        out.push(')');
    } else {
        write_inner(e, out);
    }
}

fn call(name: &str, a: &Expr, out: &mut String) {
    out.push_str(name);
    out.push('(');
    write_expr(a, PREC_ADD, out);
    out.push(')');
}

fn write_inner(e: &Expr, out: &mut String) {
    use ExprKind::*;
    match &e.kind {
        Var => out.push('x'),
        Pi => out.push_str("pi"),
        Const(q) => write_const(q, out),
        Add(a, b) => {
            write_expr(a, PREC_ADD, out);
            out.push_str(" + ");
            write_expr(b, PREC_MUL, out);
        }
        Sub(a, b) => {
            write_expr(a, PREC_ADD, out);
            out.push_str(" - ");
            write_expr(b, PREC_MUL, out);
        }
        Mul(a, b) => {
            write_expr(a, PREC_MUL, out);
            out.push_str(" * ");
            write_expr(b, PREC_NEG, out);
        }
        Div(a, b) => {
            write_expr(a, PREC_MUL, out);
            out.push_str(" / ");
            write_expr(b, PREC_NEG, out);
        }
        Neg(a) => {
            out.push('-');
            // a bare literal after '-' would be read back as a negative constant
            if matches!(a.kind, Const(_)) {
                out.push('(');
                write_inner(a, out);
                out.push(')');
            } else {
                write_expr(a, PREC_NEG, out);
            }
        }
        Pow(a, q) => {
            write_expr(a, PREC_ATOM, out);
            out.push('^');
            if *q.denom() == 1 && q.cmp0() != std::cmp::Ordering::Less {
                out.push_str(&q.numer().to_string());
            } else if *q.denom() == 1 {
                let _ = write!(out, "({})", q.numer());
            } else {
                let _ = write!(out, "({}/{})", q.numer(), q.denom());
            }
        }
        Exp(a) => call("exp", a, out),
        Log(a) => call("log", a, out),
        Sin(a) => call("sin", a, out),
        Cos(a) => call("cos", a, out),
        LogGamma(a) => call("loggamma", a, out),
        Digamma(a) => call("psi", a, out),
        Polygamma(m, a) => {
            let _ = write!(out, "polygamma({m}, ");
            write_expr(a, PREC_ADD, out);
            out.push(')');
        }
        OverX(a) => call("overx", a, out),
        Family(node) => {
            out.push_str(node.instance.name());
            out.push('[');
            for (i, (k, v)) in node.instance.params().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{k}=");
                write_expr(v, PREC_ADD, out);
            }
            out.push(']');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;

    fn roundtrip(s: &str) -> String {
        let e = parse_expr(s).unwrap();
        let printed = print(&e);
        let again = parse_expr(&printed).unwrap();
        assert_eq!(e, again, "{s} -> {printed}");
        printed
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(roundtrip("exp(-x)*x^(-1)"), "exp(-x) * x^(-1)");
        assert_eq!(roundtrip("2x"), "2 * x");
        assert_eq!(roundtrip("(-2)^2"), "(-2)^2");
        assert_eq!(roundtrip("-(2)"), "-(2)");
        assert_eq!(roundtrip("x/(1/3)"), "x / (1/3)");
        assert_eq!(roundtrip("a(x)".replace("a(x)", "x - (x - 1)").as_str()), "x - (x - 1)");
        assert_eq!(roundtrip("(x^2)^3"), "(x^2)^3");
        roundtrip("psigap[a=0, b=1/2, alpha=1, beta=0.5]");
        roundtrip("overx(loggamma(x + 1)) + polygamma(3, x)");
        roundtrip("-x * -x / --x");
    }

    #[test]
    fn programmatic_trees_roundtrip() {
        let e = Expr::div(Expr::int(1), Expr::int(3));
        assert_eq!(parse_expr(&print(&e)).unwrap(), e);
        let e = Expr::neg(Expr::constant(Rational::from((-1, 3))));
        assert_eq!(parse_expr(&print(&e)).unwrap(), e);
        let e = Expr::pow(Expr::constant(Rational::from((1, 2))), Rational::from(2));
        assert_eq!(parse_expr(&print(&e)).unwrap(), e);
    }
}
