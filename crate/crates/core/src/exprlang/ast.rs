use rug::Rational;

use super::interval::{Bound, Interval};
use crate::families::FamilyInstance;
use crate::numkernel::Real;

/// Byte range in the source text; `(0, 0)` for synthesized nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Var,
    Const(Rational),
    Pi,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Constant rational exponent.
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    LogGamma(Box<Expr>),
    Digamma(Box<Expr>),
    Polygamma(u32, Box<Expr>),
    /// `phi(x) / x`, continued by `phi'(0)` at the origin.
    OverX(Box<Expr>),
    Family(Box<FamilyNode>),
}

/// A named family instance together with its expansion into primitives.
#[derive(Clone, Debug)]
pub struct FamilyNode {
    pub instance: FamilyInstance,
    pub expansion: Expr,
}

/// Expression tree in the single variable `x`, annotated with its validity interval.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    /// Right-most connected interval on which every subexpression is defined,
    /// as far as it can be determined exactly.
    pub domain: Interval,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Var, Var) | (Pi, Pi) => true,
            (Const(a), Const(b)) => a == b,
            (Add(a, b), Add(c, d)) | (Sub(a, b), Sub(c, d)) | (Mul(a, b), Mul(c, d)) | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Pow(a, p), Pow(b, q)) => a == b && p == q,
            (Neg(a), Neg(b))
            | (Exp(a), Exp(b))
            | (Log(a), Log(b))
            | (Sin(a), Sin(b))
            | (Cos(a), Cos(b))
            | (LogGamma(a), LogGamma(b))
            | (Digamma(a), Digamma(b))
            | (OverX(a), OverX(b)) => a == b,
            (Polygamma(m, a), Polygamma(n, b)) => m == n && a == b,
            (Family(a), Family(b)) => a.instance == b.instance,
            _ => false,
        }
    }
}

fn q(n: i64) -> Rational {
    Rational::from(n)
}

impl Expr {
    fn make(kind: ExprKind, span: Span) -> Expr {
        let domain = compute_domain(&kind);
        Expr { kind, span, domain }
    }

    /// Rebuilds the node with a new span, keeping the domain.
    pub fn with_span(mut self, span: Span) -> Expr {
        self.span = span;
        self
    }

    pub fn var() -> Expr {
        Expr::make(ExprKind::Var, Span::default())
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::make(ExprKind::Const(c), Span::default())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(q(n))
    }

    pub fn pi() -> Expr {
        Expr::make(ExprKind::Pi, Span::default())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        let span = a.span.join(b.span);
        Expr::make(ExprKind::Add(Box::new(a), Box::new(b)), span)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        let span = a.span.join(b.span);
        Expr::make(ExprKind::Sub(Box::new(a), Box::new(b)), span)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        let span = a.span.join(b.span);
        Expr::make(ExprKind::Mul(Box::new(a), Box::new(b)), span)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        let span = a.span.join(b.span);
        Expr::make(ExprKind::Div(Box::new(a), Box::new(b)), span)
    }

    pub fn neg(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Neg(Box::new(a)), span)
    }

    pub fn pow(a: Expr, e: Rational) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Pow(Box::new(a), e), span)
    }

    pub fn exp(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Exp(Box::new(a)), span)
    }

    pub fn log(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Log(Box::new(a)), span)
    }

    pub fn sin(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Sin(Box::new(a)), span)
    }

    pub fn cos(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Cos(Box::new(a)), span)
    }

    pub fn log_gamma(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::LogGamma(Box::new(a)), span)
    }

    pub fn digamma(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::Digamma(Box::new(a)), span)
    }

    pub fn polygamma(m: u32, a: Expr) -> Expr {
        if m == 0 {
            return Expr::digamma(a);
        }
        let span = a.span;
        Expr::make(ExprKind::Polygamma(m, Box::new(a)), span)
    }

    pub fn over_x(a: Expr) -> Expr {
        let span = a.span;
        Expr::make(ExprKind::OverX(Box::new(a)), span)
    }

    pub fn family(instance: FamilyInstance) -> Expr {
        let expansion = instance.expand();
        let mut domain = instance.natural_domain().intersect(&expansion.domain);
        if domain.is_empty() {
            domain = expansion.domain.clone();
        }
        Expr { kind: ExprKind::Family(Box::new(FamilyNode { instance, expansion })), span: Span::default(), domain }
    }

    /// `x + c`.
    pub fn shifted(c: &Rational) -> Expr {
        if c.cmp0() == std::cmp::Ordering::Equal {
            Expr::var()
        } else {
            Expr::add(Expr::var(), Expr::constant(c.clone()))
        }
    }

    /// `a*x + b` with the trivial parts omitted.
    pub fn affine(a: &Rational, b: &Rational) -> Expr {
        let zero = Rational::new();
        let lin = if *a == zero {
            None
        } else if *a == 1 {
            Some(Expr::var())
        } else {
            Some(Expr::mul(Expr::constant(a.clone()), Expr::var()))
        };
        match lin {
            None => Expr::constant(b.clone()),
            Some(l) if *b == zero => l,
            Some(l) => Expr::add(l, Expr::constant(b.clone())),
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Var | Const(_) | Pi | Family(_) => vec![],
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => vec![a, b],
            Neg(a) | Pow(a, _) | Exp(a) | Log(a) | Sin(a) | Cos(a) | LogGamma(a) | Digamma(a) | Polygamma(_, a) | OverX(a) => vec![a],
        }
    }

    /// True when the expression does not depend on `x`.
    pub fn is_closed(&self) -> bool {
        match &self.kind {
            ExprKind::Var => false,
            ExprKind::Family(_) => false,
            _ => self.children().iter().all(|c| c.is_closed()),
        }
    }

    /// Exact value of a closed expression built from rationals by field
    /// operations and integer powers.
    pub fn fold_rational(&self) -> Option<Rational> {
        use ExprKind::*;
        match &self.kind {
            Const(c) => Some(c.clone()),
            Add(a, b) => Some(a.fold_rational()? + b.fold_rational()?),
            Sub(a, b) => Some(a.fold_rational()? - b.fold_rational()?),
            Mul(a, b) => Some(a.fold_rational()? * b.fold_rational()?),
            Div(a, b) => {
                let d = b.fold_rational()?;
                if d.cmp0() == std::cmp::Ordering::Equal {
                    None
                } else {
                    Some(a.fold_rational()? / d)
                }
            }
            Neg(a) => Some(-a.fold_rational()?),
            Pow(a, e) if *e.denom() == 1 => {
                let base = a.fold_rational()?;
                let k = e.numer().to_i32()?;
                if k.unsigned_abs() > 4096 {
                    return None;
                }
                if base.cmp0() == std::cmp::Ordering::Equal {
                    return if k > 0 { Some(Rational::new()) } else if k == 0 { Some(Rational::from(1)) } else { None };
                }
                let mut r = Rational::from(1);
                for _ in 0..k.unsigned_abs() {
                    r *= &base;
                }
                Some(if k < 0 { r.recip() } else { r })
            }
            _ => None,
        }
    }

    /// Coefficients `(alpha, beta)` when the expression is exactly `alpha*x + beta`.
    pub fn as_affine(&self) -> Option<(Rational, Rational)> {
        use ExprKind::*;
        if let Some(c) = self.fold_rational() {
            return Some((Rational::new(), c));
        }
        match &self.kind {
            Var => Some((q(1), q(0))),
            Add(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                Some((a1 + a2, b1 + b2))
            }
            Sub(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                Some((a1 - a2, b1 - b2))
            }
            Neg(a) => {
                let (a1, b1) = a.as_affine()?;
                Some((-a1, -b1))
            }
            Mul(a, b) => {
                if let Some(c) = a.fold_rational() {
                    let (a2, b2) = b.as_affine()?;
                    Some((Rational::from(&c * &a2), c * b2))
                } else if let Some(c) = b.fold_rational() {
                    let (a1, b1) = a.as_affine()?;
                    Some((Rational::from(&c * &a1), c * b1))
                } else {
                    None
                }
            }
            Div(a, b) => {
                let c = b.fold_rational()?;
                if c.cmp0() == std::cmp::Ordering::Equal {
                    return None;
                }
                let (a1, b1) = a.as_affine()?;
                Some((Rational::from(&a1 / &c), b1 / c))
            }
            Pow(a, e) if *e == 1 => a.as_affine(),
            _ => None,
        }
    }

    /// `(a, b, c, d)` when the expression is exactly `(a*x + b)/(c*x + d)`.
    pub fn as_linfrac(&self) -> Option<(Rational, Rational, Rational, Rational)> {
        if let Some((a, b)) = self.as_affine() {
            return Some((a, b, q(0), q(1)));
        }
        match &self.kind {
            ExprKind::Div(n, d) => {
                let (a, b) = n.as_affine()?;
                let (c, dd) = d.as_affine()?;
                Some((a, b, c, dd))
            }
            ExprKind::Pow(base, e) if *e == -1 => {
                let (c, d) = base.as_affine()?;
                Some((q(0), q(1), c, d))
            }
            ExprKind::Family(node) => node.expansion.as_linfrac(),
            _ => None,
        }
    }

    /// Numerical value of a closed expression.
    pub fn closed_value(&self, prec: u32) -> Option<Real> {
        if !self.is_closed() {
            return None;
        }
        crate::taylor::eval_value(self, &Real::zero(prec)).ok()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }
}

/// Set where `alpha*x + beta > 0` (or `>= 0` when `closed`), if it is a half-line.
fn positive_region(alpha: &Rational, beta: &Rational, closed: bool) -> Interval {
    use std::cmp::Ordering::*;
    match alpha.cmp0() {
        Equal => {
            if beta.cmp0() == Greater || (closed && beta.cmp0() == Equal) {
                Interval::real_line()
            } else {
                Interval::open(Some(q(0)), Some(q(0)))
            }
        }
        Greater => {
            let root = Rational::from(-beta) / alpha;
            Interval::new(if closed { Bound::Closed(root) } else { Bound::Open(root) }, Bound::Infinite)
        }
        Less => {
            let root = Rational::from(-beta) / alpha;
            Interval::new(Bound::Infinite, if closed { Bound::Closed(root) } else { Bound::Open(root) })
        }
    }
}

/// Right-most component of the set where the affine function is nonzero.
fn nonzero_region(alpha: &Rational, beta: &Rational) -> Interval {
    use std::cmp::Ordering::*;
    match alpha.cmp0() {
        Equal => {
            if beta.cmp0() == Equal {
                Interval::open(Some(q(0)), Some(q(0)))
            } else {
                Interval::real_line()
            }
        }
        _ => {
            let root = Rational::from(-beta) / alpha;
            Interval::above(root)
        }
    }
}

fn restrict(base: &Interval, constraint: Interval) -> Interval {
    let r = base.intersect(&constraint);
    if r.is_empty() {
        // the constraint misses the child's domain; keep the child's and let
        // evaluation report the failure at the offending point
        base.clone()
    } else {
        r
    }
}

/// Whether a closed expression is known to be strictly positive.
fn closed_positive(e: &Expr) -> bool {
    e.closed_value(64).is_some_and(|v| v.is_positive())
}

fn compute_domain(kind: &ExprKind) -> Interval {
    use ExprKind::*;
    match kind {
        Var | Const(_) | Pi => Interval::real_line(),
        Add(a, b) | Sub(a, b) | Mul(a, b) => a.domain.intersect(&b.domain),
        Div(a, b) => {
            let base = a.domain.intersect(&b.domain);
            match b.as_affine() {
                Some((al, be)) => restrict(&base, nonzero_region(&al, &be)),
                None => match b.as_linfrac() {
                    Some((na, nb, _, _)) => restrict(&base, nonzero_region(&na, &nb)),
                    None => base,
                },
            }
        }
        Neg(a) | Exp(a) | Sin(a) | Cos(a) | OverX(a) => a.domain.clone(),
        Pow(a, e) => {
            let integer = *e.denom() == 1;
            let negative = e.cmp0() == std::cmp::Ordering::Less;
            if integer && !negative {
                return a.domain.clone();
            }
            match a.as_linfrac() {
                Some((na, nb, dc, dd)) => {
                    let mut d = a.domain.clone();
                    if integer {
                        d = restrict(&d, nonzero_region(&na, &nb));
                    } else {
                        d = restrict(&d, positive_region(&na, &nb, !negative));
                    }
                    if dc.cmp0() != std::cmp::Ordering::Equal {
                        d = restrict(&d, positive_region(&dc, &dd, false));
                    }
                    d
                }
                None => a.domain.clone(),
            }
        }
        Log(a) => match a.as_linfrac() {
            Some((na, nb, dc, dd)) => {
                let mut d = restrict(&a.domain, positive_region(&na, &nb, false));
                if dc.cmp0() != std::cmp::Ordering::Equal {
                    d = restrict(&d, positive_region(&dc, &dd, false));
                } else if !closed_positive(&Expr::constant(dd.clone())) {
                    d = Interval::open(Some(q(0)), Some(q(0)));
                }
                d
            }
            None => a.domain.clone(),
        },
        LogGamma(a) => match a.as_affine() {
            Some((al, be)) => restrict(&a.domain, positive_region(&al, &be, false)),
            None => a.domain.clone(),
        },
        Digamma(a) | Polygamma(_, a) => match a.as_affine() {
            Some((al, be)) if al.cmp0() != std::cmp::Ordering::Equal => restrict(&a.domain, positive_region(&al, &be, false)),
            _ => a.domain.clone(),
        },
        Family(node) => node.expansion.domain.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn affine_recognition() {
        let e = Expr::sub(Expr::mul(Expr::int(3), Expr::var()), Expr::constant(r(1, 2)));
        assert_eq!(e.as_affine(), Some((r(3, 1), r(-1, 2))));
        assert!(Expr::exp(Expr::var()).as_affine().is_none());
    }

    #[test]
    fn domains_follow_arguments() {
        let e = Expr::log(Expr::shifted(&r(2, 1)));
        assert_eq!(e.domain, Interval::above(r(-2, 1)));
        let e = Expr::pow(Expr::var(), r(-1, 1));
        assert_eq!(e.domain, Interval::above(r(0, 1)));
        let e = Expr::log_gamma(Expr::shifted(&r(1, 1)));
        assert_eq!(e.domain, Interval::above(r(-1, 1)));
        let e = Expr::exp(Expr::neg(Expr::var()));
        assert_eq!(e.domain, Interval::real_line());
    }

    #[test]
    fn folding() {
        let e = Expr::div(Expr::int(1), Expr::pow(Expr::int(2), r(3, 1)));
        assert_eq!(e.fold_rational(), Some(r(1, 8)));
        assert!(Expr::div(Expr::int(1), Expr::int(0)).fold_rational().is_none());
    }
}
