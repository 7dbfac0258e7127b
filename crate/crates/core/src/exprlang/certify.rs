use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::Serialize;
use serde_json::{json, Value};

use super::ast::{Expr, ExprKind};
use super::interval::{format_rational, Interval};
use super::printer::print;
use crate::families::{classify_linfrac, ClassStatus};
use crate::numkernel::Real;
use crate::taylor::eval_value;

/// Monotonicity classes the calculus derives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MonotoneClass {
    CM,
    AM,
    LCM,
    BERN,
    POS,
    /// `f'` is completely monotone (no sign condition on `f`).
    DCM,
}

impl fmt::Display for MonotoneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonotoneClass::CM => "CM",
            MonotoneClass::AM => "AM",
            MonotoneClass::LCM => "LCM",
            MonotoneClass::BERN => "BERN",
            MonotoneClass::POS => "POS",
            MonotoneClass::DCM => "DCM",
        })
    }
}

impl FromStr for MonotoneClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "CM" => Ok(MonotoneClass::CM),
            "AM" => Ok(MonotoneClass::AM),
            "LCM" => Ok(MonotoneClass::LCM),
            "BERN" | "BERNSTEIN" => Ok(MonotoneClass::BERN),
            "POS" => Ok(MonotoneClass::POS),
            "DCM" => Ok(MonotoneClass::DCM),
            _ => Err(format!("unknown class '{s}'")),
        }
    }
}

/// One derivation step; leaves have no premises.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub expr: String,
    pub conclusion: MonotoneClass,
    pub interval: Interval,
    pub rule: &'static str,
    pub citation: String,
    pub premises: Vec<Certificate>,
    /// For CM conclusions: `Some(false)` when the function is provably constant.
    pub strict: Option<bool>,
}

impl Certificate {
    /// Depth-first list of every node.
    pub fn nodes(&self) -> Vec<&Certificate> {
        let mut out = vec![self];
        for p in &self.premises {
            out.extend(p.nodes());
        }
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    /// The CM certificate implied by an LCM one; other certificates are returned unchanged.
    pub fn to_cm(&self) -> Certificate {
        if self.conclusion != MonotoneClass::LCM {
            return self.clone();
        }
        Certificate {
            expr: self.expr.clone(),
            conclusion: MonotoneClass::CM,
            interval: self.interval.clone(),
            rule: "lcm-implies-cm",
            citation: "Corollary 7".into(),
            premises: vec![self.clone()],
            strict: self.strict,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "expr": self.expr,
            "class": self.conclusion.to_string(),
            "interval": self.interval.to_string(),
            "rule": self.rule,
            "citation": self.citation,
            "strict": self.strict,
            "premises": self.premises.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error("no rule applies to `{0}`")]
    NoRuleApplies(String),
    #[error("`{0}` is not in the certifier's axiom base")]
    UnsupportedPrimitive(String),
    #[error("{interval} is not inside the validity interval {domain} of `{expr}`")]
    OutsideDomain { expr: String, interval: String, domain: String },
}

type Key = (String, String, MonotoneClass);

struct Ctx {
    memo: HashMap<Key, Option<Certificate>>,
}

const PROBE_PREC: u32 = 256;

fn zero() -> Rational {
    Rational::new()
}

fn leaf(e: &Expr, class: MonotoneClass, i: &Interval, rule: &'static str, citation: impl Into<String>) -> Certificate {
    Certificate { expr: print(e), conclusion: class, interval: i.clone(), rule, citation: citation.into(), premises: vec![], strict: None }
}

fn node(e: &Expr, class: MonotoneClass, i: &Interval, rule: &'static str, citation: impl Into<String>, premises: Vec<Certificate>) -> Certificate {
    Certificate { expr: print(e), conclusion: class, interval: i.clone(), rule, citation: citation.into(), premises, strict: None }
}

/// Exact or numerical value of a closed expression.
fn closed_sign(e: &Expr) -> Option<Ordering> {
    if let Some(q) = e.fold_rational() {
        return Some(q.cmp0());
    }
    let v = e.closed_value(PROBE_PREC)?;
    if v.abs() < Real::pow2(-(PROBE_PREC as i32) / 2, PROBE_PREC) {
        return None;
    }
    Some(if v.is_negative() { Ordering::Less } else { Ordering::Greater })
}

fn nonneg_const(e: &Expr) -> bool {
    e.is_closed() && matches!(closed_sign(e), Some(Ordering::Greater | Ordering::Equal))
}

fn pos_const(e: &Expr) -> bool {
    e.is_closed() && closed_sign(e) == Some(Ordering::Greater)
}

/// Lower endpoint, requiring it to be finite and at least `bound`.
fn lo_at_least(i: &Interval, bound: &Rational) -> bool {
    i.lo_value().is_some_and(|lo| lo >= bound)
}

fn find_unsupported(e: &Expr) -> Option<&Expr> {
    if matches!(e.kind, ExprKind::Sin(_) | ExprKind::Cos(_)) {
        return Some(e);
    }
    if let ExprKind::Family(_) = e.kind {
        return None;
    }
    e.children().into_iter().find_map(find_unsupported)
}

/// Numerical sign of `e` at the finite left endpoint of `i`, if defined there.
fn value_at_left(e: &Expr, i: &Interval) -> Option<Real> {
    let lo = i.lo_real(PROBE_PREC)?;
    eval_value(e, &lo).ok()
}

impl Ctx {
    fn derive(&mut self, e: &Expr, i: &Interval, class: MonotoneClass) -> Option<Certificate> {
        let key = (print(e), i.to_string(), class);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        // guard against cycles through rewritten nodes
        self.memo.insert(key.clone(), None);
        let out = match class {
            MonotoneClass::CM => self.cm(e, i),
            MonotoneClass::AM => self.am(e, i),
            MonotoneClass::LCM => self.lcm(e, i),
            MonotoneClass::BERN => self.bern(e, i),
            MonotoneClass::POS => self.pos(e, i),
            MonotoneClass::DCM => self.dcm(e, i),
        };
        let out = out.map(|mut c| {
            if c.conclusion == MonotoneClass::CM && c.strict.is_none() {
                c.strict = Some(!e.is_closed());
            }
            c
        });
        self.memo.insert(key, out.clone());
        out
    }

    fn cm(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        use MonotoneClass::*;
        if e.is_closed() {
            return nonneg_const(e).then(|| leaf(e, CM, i, "axiom", "nonnegative constant"));
        }
        if let Some(c) = self.family_fact(e, i, CM) {
            return Some(c);
        }
        match &e.kind {
            Add(a, b) => {
                let pa = self.derive(a, i, CM)?;
                let pb = self.derive(b, i, CM)?;
                return Some(node(e, CM, i, "linear-combination", "nonnegative linear combination", vec![pa, pb]));
            }
            Mul(a, b) => {
                for (k, f) in [(a, b), (b, a)] {
                    if nonneg_const(k) {
                        let p = self.derive(f, i, CM)?;
                        return Some(node(e, CM, i, "linear-combination", "nonnegative linear combination", vec![p]));
                    }
                }
                if let (Some(pa), Some(pb)) = (self.derive(a, i, CM), self.derive(b, i, CM)) {
                    return Some(node(e, CM, i, "product", "Theorem 3", vec![pa, pb]));
                }
            }
            Div(a, b) => {
                if pos_const(b) {
                    let p = self.derive(a, i, CM)?;
                    return Some(node(e, CM, i, "linear-combination", "nonnegative linear combination", vec![p]));
                }
                let recip = Expr::pow(b.as_ref().clone(), Rational::from(-1));
                let pr = self.derive(&recip, i, CM)?;
                if matches!(a.kind, Const(_)) && *a.as_ref() == Expr::int(1) {
                    return Some(Certificate { expr: print(e), ..pr });
                }
                let pa = self.derive(a, i, CM)?;
                return Some(node(e, CM, i, "product", "Theorem 3", vec![pa, pr]));
            }
            Pow(u, q) => {
                if let Some(c) = self.recip_power(e, u, q, i) {
                    return Some(c);
                }
                if q.cmp0() == Ordering::Less {
                    // y^q is CM on (0, inf); compose with a Bernstein base
                    let pu = self.derive(u, i, BERN)?;
                    let outer = format!("y^{}", format_rational(q));
                    let ax = Certificate {
                        expr: outer,
                        conclusion: CM,
                        interval: Interval::positive(),
                        rule: "axiom",
                        citation: "x^-mu, mu >= 0".into(),
                        premises: vec![],
                        strict: Some(true),
                    };
                    return Some(node(e, CM, i, "composition", "Theorem 5", vec![ax, pu]));
                }
                if *q.denom() == 1 {
                    let pu = self.derive(u, i, CM)?;
                    return Some(node(e, CM, i, "product", "Theorem 3", vec![pu]));
                }
            }
            Exp(g) => {
                if let Some((s, _)) = g.as_affine() {
                    if s.cmp0() != Ordering::Greater {
                        return Some(leaf(e, CM, i, "axiom", "exp(-c x), c >= 0"));
                    }
                }
                if let Some(h) = negated(g) {
                    if let Some(ph) = self.derive(&h, i, BERN) {
                        let ax = Certificate {
                            expr: "exp(-y)".into(),
                            conclusion: CM,
                            interval: Interval::new(super::interval::Bound::Closed(zero()), super::interval::Bound::Infinite),
                            rule: "axiom",
                            citation: "exp(-c x), c >= 0".into(),
                            premises: vec![],
                            strict: Some(true),
                        };
                        let cite = if is_fractional_power(&h) { "Theorem 5 (Corollary 6)" } else { "Theorem 5" };
                        return Some(node(e, CM, i, "composition", cite, vec![ax, ph]));
                    }
                }
                if let Some(c) = self.lcm(e, i).filter(|c| c.citation == "Corollary 4") {
                    return Some(c.to_cm());
                }
                let ng = Expr::neg(g.as_ref().clone());
                if let Some(pg) = self.derive(&ng, i, DCM) {
                    let ax = Certificate {
                        expr: "exp(y)".into(),
                        conclusion: AM,
                        interval: Interval::real_line(),
                        rule: "axiom",
                        citation: "exp is absolutely monotone".into(),
                        premises: vec![],
                        strict: None,
                    };
                    return Some(node(e, CM, i, "composition-am", "Theorem 9", vec![ax, pg]));
                }
            }
            Log(u) => {
                if let Some((a, b, c, d)) = linfrac(u) {
                    let v = classify_linfrac(&a, &b, &c, &d);
                    if v.status == ClassStatus::CM && v.interval.as_ref().is_some_and(|vi| i.is_subset_of(vi)) {
                        let mut c = leaf(e, CM, i, "axiom", v.citation.clone());
                        c.strict = v.strict;
                        return Some(c);
                    }
                }
            }
            Polygamma(m, u) if m % 2 == 1 => {
                if let Some((s, t)) = u.as_affine() {
                    if s.cmp0() == Ordering::Greater && lo_at_least(i, &Rational::from(-t / &s)) {
                        return Some(leaf(e, CM, i, "axiom", format!("psi^({m}) with odd order is CM on (0, inf)")));
                    }
                }
            }
            Neg(u) => {
                if let Polygamma(m, v) = &u.kind {
                    if m % 2 == 0 {
                        if let Some((s, t)) = v.as_affine() {
                            if s.cmp0() == Ordering::Greater && lo_at_least(i, &Rational::from(-t / &s)) {
                                return Some(leaf(e, CM, i, "axiom", format!("-psi^({m}) with even order is CM on (0, inf)")));
                            }
                        }
                    }
                }
            }
            _ => {}
        }
        self.derive(e, i, LCM).map(|c| c.to_cm())
    }

    /// `(a + b/x)^mu` with `a, b, mu >= 0` on a subset of `(0, inf)`.
    fn recip_power(&mut self, e: &Expr, u: &Expr, q: &Rational, i: &Interval) -> Option<Certificate> {
        if q.cmp0() == Ordering::Less || !lo_at_least(i, &zero()) {
            return None;
        }
        let (a, b, c, d) = linfrac(u)?;
        // (a x + b)/(c x), c > 0
        let ok = d.cmp0() == Ordering::Equal && c.cmp0() == Ordering::Greater && a.cmp0() != Ordering::Less && b.cmp0() != Ordering::Less;
        ok.then(|| leaf(e, MonotoneClass::CM, i, "axiom", "Lemma 13"))
    }

    fn family_fact(&mut self, e: &Expr, i: &Interval, class: MonotoneClass) -> Option<Certificate> {
        let ExprKind::Family(n) = &e.kind else { return None };
        let v = n.instance.classify();
        let vi = v.interval.as_ref()?;
        if !i.is_subset_of(vi) {
            return None;
        }
        let status = match v.status {
            ClassStatus::CM => MonotoneClass::CM,
            ClassStatus::LCM => MonotoneClass::LCM,
            _ => return None,
        };
        let mut c = leaf(e, status, i, "axiom", v.citation.clone());
        c.strict = v.strict;
        match (status, class) {
            (s, k) if s == k => Some(c),
            (MonotoneClass::LCM, MonotoneClass::CM) => Some(c.to_cm()),
            _ => None,
        }
    }

    fn lcm(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        use MonotoneClass::*;
        if e.is_closed() {
            return pos_const(e).then(|| leaf(e, LCM, i, "axiom", "positive constant"));
        }
        if let Some(c) = self.family_fact(e, i, LCM) {
            return Some(c);
        }
        match &e.kind {
            Exp(g) => {
                if let Some(c) = self.power_mean(e, g, i) {
                    return Some(c);
                }
                if let Mul(p, l) = &g.kind {
                    for (gg, lf) in [(p, l), (l, p)] {
                        if let Log(_) = &lf.kind {
                            if let (Some(pl), Some(pg)) = (self.derive(lf, i, CM), self.derive(gg, i, CM)) {
                                return Some(node(e, LCM, i, "power", "Corollary 4", vec![pl, pg]));
                            }
                        }
                    }
                }
                let ng = Expr::neg(g.as_ref().clone());
                let pg = self.derive(&ng, i, DCM)?;
                Some(node(e, LCM, i, "definition-lcm", "definition of LCM: -(log f)' is CM", vec![pg]))
            }
            Pow(u, q) if q.cmp0() == Ordering::Greater => {
                let pu = self.derive(u, i, LCM)?;
                Some(node(e, LCM, i, "definition-lcm", "definition of LCM: positive power", vec![pu]))
            }
            Mul(a, b) => {
                let pa = self.derive(a, i, LCM)?;
                let pb = self.derive(b, i, LCM)?;
                Some(node(e, LCM, i, "definition-lcm", "definition of LCM: product", vec![pa, pb]))
            }
            _ => None,
        }
    }

    /// `exp(g * phi/x)` with `phi` Bernstein on `[0, b)` and `g` CM on `(0, b)`.
    fn power_mean(&mut self, e: &Expr, g: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        let zero_q = zero();
        if i.lo_value() != Some(&zero_q) {
            return None;
        }
        let split = |t: &Expr| -> Option<Expr> {
            match &t.kind {
                OverX(phi) => Some(phi.as_ref().clone()),
                Div(phi, x) if matches!(x.kind, Var) => Some(phi.as_ref().clone()),
                _ => None,
            }
        };
        let (weight, phi) = match &g.kind {
            Mul(a, b) => {
                if let Some(phi) = split(b) {
                    (a.as_ref().clone(), phi)
                } else {
                    (b.as_ref().clone(), split(a)?)
                }
            }
            _ => (Expr::int(1), split(g)?),
        };
        let pphi = self.derive(&phi, i, MonotoneClass::BERN)?;
        let pw = self.derive(&weight, i, MonotoneClass::CM)?;
        Some(node(e, MonotoneClass::LCM, i, "power-mean", "Theorem 12", vec![pphi, pw]))
    }

    fn dcm(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        use MonotoneClass::*;
        if e.is_closed() {
            return Some(leaf(e, DCM, i, "axiom", "constant"));
        }
        if let Some((s, _)) = e.as_affine() {
            if s.cmp0() != Ordering::Less {
                return Some(leaf(e, DCM, i, "axiom", "c x + d, c >= 0"));
            }
        }
        if let Some((a, b, c, d)) = linfrac(e) {
            // derivative (ad - bc)/(c x + d)^2
            let (a, b, c, d) = if c.cmp0() == Ordering::Less { (-a, -b, -c, -d) } else { (a, b, c, d) };
            let det = Rational::from(&a * &d) - Rational::from(&b * &c);
            if c.cmp0() == Ordering::Greater && det.cmp0() != Ordering::Less && lo_at_least(i, &(Rational::from(-&d) / &c)) {
                return Some(leaf(e, DCM, i, "axiom", "(a x + b)/(c x + d), ad - bc >= 0, has CM derivative"));
            }
        }
        match &e.kind {
            Neg(u) => {
                // the derivative of a CM function is -CM
                if let Some(p) = self.derive(u, i, CM) {
                    return Some(node(e, DCM, i, "derivative", "derivative of a CM function", vec![p]));
                }
                if let Log(f) = &u.kind {
                    let p = self.derive(f, i, LCM)?;
                    return Some(node(e, DCM, i, "definition-lcm", "definition of LCM: -(log f)' is CM", vec![p]));
                }
                None
            }
            Add(a, b) => {
                let pa = self.derive(a, i, DCM)?;
                let pb = self.derive(b, i, DCM)?;
                Some(node(e, DCM, i, "linear-combination", "nonnegative linear combination", vec![pa, pb]))
            }
            Sub(a, b) => {
                let pa = self.derive(a, i, DCM)?;
                let pb = self.derive(&Expr::neg(b.as_ref().clone()), i, DCM)?;
                Some(node(e, DCM, i, "linear-combination", "nonnegative linear combination", vec![pa, pb]))
            }
            Mul(a, b) => {
                for (k, f) in [(a, b), (b, a)] {
                    if nonneg_const(k) {
                        let p = self.derive(f, i, DCM)?;
                        return Some(node(e, DCM, i, "linear-combination", "nonnegative linear combination", vec![p]));
                    }
                    if k.is_closed() && closed_sign(k) == Some(Ordering::Less) {
                        let p = self.derive(&Expr::neg(f.as_ref().clone()), i, DCM)?;
                        return Some(node(e, DCM, i, "linear-combination", "nonnegative linear combination", vec![p]));
                    }
                }
                None
            }
            Pow(u, q) if q.cmp0() == Ordering::Greater && *q <= 1 => {
                let (s, t) = u.as_affine()?;
                (s.cmp0() == Ordering::Greater && lo_at_least(i, &Rational::from(-t / &s)))
                    .then(|| leaf(e, DCM, i, "axiom", "x^alpha, 0 < alpha <= 1, is Bernstein"))
            }
            Log(u) => {
                let (s, t) = u.as_affine()?;
                (s.cmp0() == Ordering::Greater && lo_at_least(i, &Rational::from(-t / &s)))
                    .then(|| leaf(e, DCM, i, "axiom", "log(c x + d), c > 0, has CM derivative"))
            }
            _ => None,
        }
    }

    fn pos(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        use MonotoneClass::*;
        if e.is_closed() {
            return nonneg_const(e).then(|| leaf(e, POS, i, "axiom", "nonnegative constant"));
        }
        match &e.kind {
            Exp(_) => return Some(leaf(e, POS, i, "axiom", "exp is positive")),
            Add(a, b) | Mul(a, b) => {
                if let (Some(pa), Some(pb)) = (self.derive(a, i, POS), self.derive(b, i, POS)) {
                    return Some(node(e, POS, i, "positivity", "sum or product of nonnegative functions", vec![pa, pb]));
                }
            }
            Pow(u, q) if *q.denom() != 1 || q.numer().is_even() => {
                let _ = u;
                return Some(leaf(e, POS, i, "axiom", "even or fractional power"));
            }
            _ => {}
        }
        if let Some(c) = self.derive(e, i, CM) {
            return Some(node(e, POS, i, "cm-nonnegative", "CM functions are nonnegative", vec![c]));
        }
        // increasing, and nonnegative at the finite left endpoint
        let inc = self.derive(e, i, DCM)?;
        let v = value_at_left(e, i)?;
        (!v.is_negative()).then(|| node(e, POS, i, "increasing", format!("increasing with value {} at the left endpoint", v.to_sci(6)), vec![inc]))
    }

    fn bern(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        let pd = self.derive(e, i, MonotoneClass::DCM)?;
        let pp = self.derive(e, i, MonotoneClass::POS)?;
        Some(node(e, MonotoneClass::BERN, i, "definition-bernstein", "definition of a Bernstein function", vec![pp, pd]))
    }

    fn am(&mut self, e: &Expr, i: &Interval) -> Option<Certificate> {
        use ExprKind::*;
        use MonotoneClass::*;
        if e.is_closed() {
            return nonneg_const(e).then(|| leaf(e, AM, i, "axiom", "nonnegative constant"));
        }
        match &e.kind {
            Exp(g) => {
                let (s, _) = g.as_affine()?;
                (s.cmp0() != Ordering::Less).then(|| leaf(e, AM, i, "axiom", "exp(c x), c >= 0"))
            }
            Var => lo_at_least(i, &zero()).then(|| leaf(e, AM, i, "axiom", "x on [0, inf)")),
            Add(a, b) => {
                let pa = self.derive(a, i, AM)?;
                let pb = self.derive(b, i, AM)?;
                Some(node(e, AM, i, "linear-combination", "nonnegative linear combination", vec![pa, pb]))
            }
            Mul(a, b) => {
                let pa = self.derive(a, i, AM)?;
                let pb = self.derive(b, i, AM)?;
                Some(node(e, AM, i, "product", "Theorem 3 (reflected)", vec![pa, pb]))
            }
            Pow(u, q) if q.cmp0() == Ordering::Greater && *q.denom() == 1 => {
                let pu = self.derive(u, i, AM)?;
                Some(node(e, AM, i, "product", "Theorem 3 (reflected)", vec![pu]))
            }
            _ => {
                let (s, t) = e.as_affine()?;
                (s.cmp0() != Ordering::Less && i.lo_value().is_some_and(|lo| Rational::from(&s * lo) + &t >= 0))
                    .then(|| leaf(e, AM, i, "axiom", "c x + d, c >= 0, nonnegative"))
            }
        }
    }
}

/// `(a, b, c, d)` when `e` is `(a x + b)/(c x + d)` up to constant shifts and factors.
fn linfrac(e: &Expr) -> Option<(Rational, Rational, Rational, Rational)> {
    use ExprKind::*;
    if let Some(f) = e.as_linfrac() {
        return Some(f);
    }
    let shift = |f: (Rational, Rational, Rational, Rational), k: Rational| {
        let (a, b, c, d) = f;
        (a + Rational::from(&k * &c), b + k * &d, c, d)
    };
    match &e.kind {
        Add(l, r) => {
            if let Some(k) = l.fold_rational() {
                return Some(shift(linfrac(r)?, k));
            }
            let k = r.fold_rational()?;
            Some(shift(linfrac(l)?, k))
        }
        Sub(l, r) => {
            if let Some(k) = r.fold_rational() {
                return Some(shift(linfrac(l)?, -k));
            }
            let k = l.fold_rational()?;
            let (a, b, c, d) = linfrac(r)?;
            Some(shift((-a, -b, c, d), k))
        }
        Neg(u) => {
            let (a, b, c, d) = linfrac(u)?;
            Some((-a, -b, c, d))
        }
        Mul(l, r) => {
            let (k, f) = match l.fold_rational() {
                Some(k) => (k, r),
                None => (r.fold_rational()?, l),
            };
            let (a, b, c, d) = linfrac(f)?;
            Some((Rational::from(&k * &a), k * b, c, d))
        }
        Div(l, r) => {
            let k = l.fold_rational()?;
            let (a, b, c, d) = linfrac(r)?;
            // k / ((a x + b)/(c x + d)), affine numerator only
            (a.cmp0() == Ordering::Equal || c.cmp0() == Ordering::Equal).then_some(())?;
            Some((Rational::from(&k * &c), k * d, a, b))
        }
        _ => None,
    }
}

/// `h` when `e` is `-h` or `c*h` with `c < 0` (returned as `|c| h`).
fn negated(e: &Expr) -> Option<Expr> {
    match &e.kind {
        ExprKind::Neg(h) => Some(h.as_ref().clone()),
        ExprKind::Mul(a, b) => {
            let c = a.fold_rational()?;
            (c.cmp0() == Ordering::Less).then(|| Expr::mul(Expr::constant(-c), b.as_ref().clone()))
        }
        _ => None,
    }
}

fn is_fractional_power(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Pow(u, q) if matches!(u.kind, ExprKind::Var) && q.cmp0() == Ordering::Greater && *q <= 1)
}

fn check(e: &Expr, i: &Interval) -> Result<(), CertifyError> {
    if let Some(u) = find_unsupported(e) {
        return Err(CertifyError::UnsupportedPrimitive(print(u)));
    }
    if !i.is_subset_of(&e.domain) {
        return Err(CertifyError::OutsideDomain { expr: print(e), interval: i.to_string(), domain: e.domain.to_string() });
    }
    Ok(())
}

/// Derivation of `class` for `e` on `i`.
pub fn certify_class(e: &Expr, i: &Interval, class: MonotoneClass) -> Result<Certificate, CertifyError> {
    check(e, i)?;
    let mut ctx = Ctx { memo: HashMap::new() };
    ctx.derive(e, i, class).ok_or_else(|| CertifyError::NoRuleApplies(print(e)))
}

/// CM derivation of `e` on `i`; an LCM derivation is preferred when one
/// exists, so the stronger fact is kept in the tree.
pub fn certify(e: &Expr, i: &Interval) -> Result<Certificate, CertifyError> {
    check(e, i)?;
    let mut ctx = Ctx { memo: HashMap::new() };
    ctx.derive(e, i, MonotoneClass::CM).ok_or_else(|| CertifyError::NoRuleApplies(print(e)))
}

/// Every class among CM, LCM, AM, BERN that can be derived.
pub fn certify_all(e: &Expr, i: &Interval) -> Result<Vec<Certificate>, CertifyError> {
    check(e, i)?;
    let mut ctx = Ctx { memo: HashMap::new() };
    Ok([MonotoneClass::LCM, MonotoneClass::CM, MonotoneClass::AM, MonotoneClass::BERN].into_iter().filter_map(|k| ctx.derive(e, i, k)).collect())
}

/// Indented derivation, one step per line: `CLASS on I: expr  [rule; citation]`.
pub fn print_certificate(c: &Certificate) -> String {
    let mut out = String::new();
    write_cert(c, 0, &mut out);
    out
}

fn write_cert(c: &Certificate, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let strict = match (c.conclusion, c.strict) {
        (MonotoneClass::CM, Some(true)) => " (strict)",
        (MonotoneClass::CM, Some(false)) => " (non-strict: constant)",
        _ => "",
    };
    out.push_str(&format!("{pad}{} on {}: {}{strict}  [{}; {}]\n", c.conclusion, c.interval, c.expr, c.rule, c.citation));
    if c.conclusion == MonotoneClass::LCM {
        out.push_str(&format!("{pad}  => CM on {}: {}  [lcm-implies-cm; Corollary 7]\n", c.interval, c.expr));
    }
    for p in &c.premises {
        write_cert(p, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn cert(src: &str) -> Result<Certificate, CertifyError> {
        let p = parse(src).unwrap();
        certify(&p.expr, &p.interval.unwrap_or_else(|| p.expr.domain.clone()))
    }

    fn cites(c: &Certificate, what: &str) -> bool {
        c.nodes().iter().any(|n| n.citation.contains(what))
    }

    #[test]
    fn spec_examples() {
        let c = cert("exp(-x) * x^(-1) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Theorem 3");
        assert_eq!(c.premises.len(), 2);
        let c = cert("exp(-x^(1/2)) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Theorem 5 (Corollary 6)");
        assert_eq!(c.rule, "composition");
        let c = cert("exp(1/x) on (0, inf)").unwrap();
        assert!(cites(&c, "Theorem 9"), "{}", print_certificate(&c));
        assert!(matches!(cert("sin(x) on (0,1)"), Err(CertifyError::UnsupportedPrimitive(_))));
        assert!(matches!(cert("log((x+1)/(x+2)) on (0, inf)"), Err(CertifyError::NoRuleApplies(_))));
    }

    #[test]
    fn log_linear_fractions_and_reciprocal_powers() {
        let c = cert("log((x+2)/(x+1)) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Theorem 14 (3)");
        assert_eq!(c.strict, Some(true));
        assert!(cert("log((x+2)/(x+1)) on (-2, inf)").is_err());
        let c = cert("(1 + 1/x)^2 on (0, inf)").unwrap();
        assert_eq!(c.citation, "Lemma 13");
        let c = cert("(2 + 3/x)^(1/2) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Lemma 13");
    }

    #[test]
    fn power_lcm_and_cm() {
        let p = parse("exp(x^(-1) * log((x+2)/(x+1))) on (0, inf)").unwrap();
        let i = p.interval.unwrap();
        let c = certify(&p.expr, &i).unwrap();
        assert_eq!(c.citation, "Corollary 7");
        assert_eq!(c.premises[0].citation, "Corollary 4");
        let text = print_certificate(&c.premises[0]);
        assert!(text.contains("LCM on") && text.contains("=> CM on"));
        let all = certify_all(&p.expr, &i).unwrap();
        assert!(all.iter().any(|c| c.conclusion == MonotoneClass::LCM));
        assert!(all.iter().any(|c| c.conclusion == MonotoneClass::CM));
    }

    #[test]
    fn composition_with_bernstein() {
        let c = cert("(x + 1)^(-2) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Theorem 5");
        let c = cert("1/(x^(1/2) + 1) on (0, inf)").unwrap();
        assert_eq!(c.citation, "Theorem 5");
        let c = cert("3 * exp(-2*x) + psi1(x) on (0, inf)").unwrap();
        assert_eq!(c.rule, "linear-combination");
        let c = cert("2 on (0, 1)").unwrap();
        assert_eq!(c.strict, Some(false));
        assert!(cert("-psi2(x+1) on (0, inf)").is_ok());
    }

    #[test]
    fn bernstein_and_am() {
        let p = parse("log(x + 1)").unwrap();
        let c = certify_class(&p.expr, &Interval::positive(), MonotoneClass::BERN).unwrap();
        assert_eq!(c.conclusion, MonotoneClass::BERN);
        let p = parse("exp(x) * (x + 1)").unwrap();
        assert!(certify_class(&p.expr, &Interval::positive(), MonotoneClass::AM).is_ok());
        let p = parse("x - 1").unwrap();
        assert!(certify_class(&p.expr, &Interval::positive(), MonotoneClass::BERN).is_err());
    }

    #[test]
    fn family_axioms() {
        let c = cert("vogt[beta=1] on (-1, inf)").unwrap();
        assert_eq!(c.citation, "Lemma 21");
        let c = cert("gammaratiopower[a=1, b=3/2, beta=1/2] on (0, inf)").unwrap();
        assert!(cites(&c, "Theorem 19") && cites(&c, "Corollary 7"));
    }

    #[test]
    fn lcm_to_cm_is_mechanical() {
        let p = parse("exp(1/x)").unwrap();
        let c = certify_class(&p.expr, &Interval::positive(), MonotoneClass::LCM).unwrap();
        let cm = c.to_cm();
        assert_eq!(cm.conclusion, MonotoneClass::CM);
        assert_eq!(cm.premises[0], c);
    }
}
