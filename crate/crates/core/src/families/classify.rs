use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;
use serde::Serialize;

use super::instance::FamilyInstance;
use crate::exprlang::{format_rational, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassStatus {
    CM,
    LCM,
    NOT,
    UNKNOWN,
}

impl fmt::Display for ClassStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassStatus::CM => "CM",
            ClassStatus::LCM => "LCM",
            ClassStatus::NOT => "NOT",
            ClassStatus::UNKNOWN => "UNKNOWN",
        })
    }
}

/// Outcome of an exact classifier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub family: String,
    pub status: ClassStatus,
    /// Clause that decided the outcome, e.g. `(3)` or `(iii_1)`.
    pub condition_id: String,
    pub citation: String,
    /// Interval the verdict refers to.
    pub interval: Option<Interval>,
    /// Named thresholds such as `alpha_min` or `b-a`.
    pub thresholds: BTreeMap<String, String>,
    pub reason: String,
    /// `Some(false)` for constant functions, whose derivatives vanish.
    pub strict: Option<bool>,
}

impl ClassVerdict {
    fn new(family: &str, status: ClassStatus, condition_id: &str, citation: &str, reason: impl Into<String>) -> ClassVerdict {
        ClassVerdict {
            family: family.to_string(),
            status,
            condition_id: condition_id.to_string(),
            citation: citation.to_string(),
            interval: None,
            thresholds: BTreeMap::new(),
            reason: reason.into(),
            strict: None,
        }
    }

    fn on(mut self, i: Interval) -> Self {
        self.interval = Some(i);
        self
    }

    fn threshold(mut self, k: &str, v: &Rational) -> Self {
        self.thresholds.insert(k.to_string(), format_rational(v));
        self
    }

    fn strict(mut self, s: bool) -> Self {
        self.strict = Some(s);
        self
    }

    /// CM or LCM.
    pub fn is_positive(&self) -> bool {
        matches!(self.status, ClassStatus::CM | ClassStatus::LCM)
    }
}

fn sign(q: &Rational) -> Ordering {
    q.cmp0()
}

fn fr(q: &Rational) -> String {
    format_rational(q)
}

/// `log((a x + b)/(c x + d))` with `a, c >= 0`.
pub fn classify_linfrac(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> ClassVerdict {
    use ClassStatus::*;
    use Ordering::*;
    const F: &str = "linfraclog";
    const T: &str = "Theorem 14";
    if sign(a) == Less || sign(c) == Less {
        return ClassVerdict::new(F, UNKNOWN, "hypothesis", T, "classification needs a >= 0 and c >= 0");
    }
    let a0 = sign(a) == Equal;
    let c0 = sign(c) == Equal;
    if a0 && c0 {
        let ok = (sign(d) == Greater && d <= b) || (sign(d) == Less && d >= b);
        if ok {
            return ClassVerdict::new(F, CM, "(1)", "Theorem 14 (1)", format!("constant log({}/{}) >= 0", fr(b), fr(d)))
                .on(Interval::real_line())
                .strict(false);
        }
        let why = if sign(d) == Equal || sign(b) == Equal || (sign(b) != sign(d)) {
            "b/d <= 0, the logarithm is undefined".to_string()
        } else {
            format!("constant log({}/{}) < 0", fr(b), fr(d))
        };
        return ClassVerdict::new(F, NOT, "(1)", "Theorem 14 (1)", format!("(1) requires 0 < d <= b or 0 > d >= b; {why}"));
    }
    if a0 {
        return ClassVerdict::new(F, NOT, "(2)-(4)", T, "a = 0 < c: f = log b - log(c x + d) tends to -inf, so f < 0 for large x")
            .on(Interval::above(Rational::from(-d) / c));
    }
    if c0 {
        return ClassVerdict::new(F, NOT, "(2)-(4)", T, "c = 0 < a: f = log(a x + b) - log d increases without bound")
            .on(Interval::above(Rational::from(-b) / a));
    }
    let alpha = Rational::from(-d) / c;
    let dom = Interval::above(alpha.clone());
    match a.cmp(c) {
        Less => ClassVerdict::new(F, NOT, "(2)-(4)", T, format!("a < c forces the negative limit log(a/c) = log({})", fr(&Rational::from(a / c))))
            .on(dom)
            .threshold("limit_ratio", &Rational::from(a / c)),
        Equal => match b.cmp(d) {
            Equal => ClassVerdict::new(F, CM, "(2)", "Theorem 14 (2)", "c = a, d = b: f is identically zero")
                .on(dom)
                .threshold("alpha_min", &alpha)
                .strict(false),
            Greater => ClassVerdict::new(F, CM, "(3)", "Theorem 14 (3)", "a > 0, c = a, b > d")
                .on(dom)
                .threshold("alpha_min", &alpha)
                .strict(true),
            Less => ClassVerdict::new(F, NOT, "(3)", "Theorem 14 (3)", "(3) requires b > d when c = a; here b < d and f < 0")
                .on(dom)
                .threshold("alpha_min", &alpha),
        },
        Greater => {
            let det = Rational::from(a * d) - Rational::from(b * c);
            if sign(&det) != Greater {
                ClassVerdict::new(F, CM, "(4)", "Theorem 14 (4)", format!("a > c > 0 and ad - bc = {} <= 0", fr(&det)))
                    .on(dom)
                    .threshold("alpha_min", &alpha)
                    .threshold("ad-bc", &det)
                    .strict(true)
            } else {
                ClassVerdict::new(F, NOT, "(4)", "Theorem 14 (4)", format!("(4) requires ad - bc <= 0; here ad - bc = {} > 0", fr(&det)))
                    .on(dom)
                    .threshold("ad-bc", &det)
            }
        }
    }
}

/// `log Gamma(a x + b) - log Gamma(c x + d)` with `a, c > 0`.
pub fn classify_gamma_ratio_log(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> ClassVerdict {
    use ClassStatus::*;
    use Ordering::*;
    const F: &str = "gammalogratio";
    const T: &str = "Theorem 16";
    if sign(a) != Greater || sign(c) != Greater {
        return ClassVerdict::new(F, UNKNOWN, "hypothesis", T, "classification needs a > 0 and c > 0");
    }
    let lo = {
        let l1 = Rational::from(-b) / a;
        let l2 = Rational::from(-d) / c;
        if l1 > l2 {
            l1
        } else {
            l2
        }
    };
    let dom = Interval::above(lo);
    let reason = match (a.cmp(c), b.cmp(d)) {
        (Equal, Equal) => {
            return ClassVerdict::new(F, CM, "a=c, b=d", T, "the ratio is 1, f is identically zero").on(dom).strict(false);
        }
        (Greater, _) => format!("f ~ ({} - {}) x log x grows without bound, so f' > 0 for large x", fr(a), fr(c)),
        (Less, _) => format!("f ~ ({} - {}) x log x tends to -inf, so f < 0 for large x", fr(a), fr(c)),
        (Equal, Greater) => format!("a = c and f ~ ({} - {}) log x grows without bound, so f' > 0 for large x", fr(b), fr(d)),
        (Equal, Less) => format!("a = c and f ~ ({} - {}) log x tends to -inf, so f < 0 for large x", fr(b), fr(d)),
    };
    ClassVerdict::new(F, NOT, "a=c, b=d", T, format!("requires a = c and b = d; {reason}")).on(dom)
}

/// `(x+a)^alpha [psi(x+b) - psi(x+a) - beta/(x+a)]` with `a, b >= 0`.
pub fn classify_psi_gap(a: &Rational, b: &Rational, alpha: &Rational, beta: &Rational) -> ClassVerdict {
    use ClassStatus::*;
    const F: &str = "psigap";
    let dom = Interval::above(Rational::from(-a));
    if sign(a) == Ordering::Less || sign(b) == Ordering::Less {
        return ClassVerdict::new(F, UNKNOWN, "hypothesis", "Theorem 17", "requires a >= 0 and b >= 0");
    }
    let gap = Rational::from(b - a);
    if gap == 0 {
        // f = -beta (x+a)^(alpha-1)
        let constant = *alpha == 1;
        return if sign(beta) == Ordering::Equal {
            ClassVerdict::new(F, CM, "(i_1)", "Theorem 17 (i_1)", "b = a, beta = 0: f is identically zero").on(dom).strict(false)
        } else if sign(beta) == Ordering::Less && *alpha <= 1 {
            ClassVerdict::new(F, CM, "(i_2)", "Theorem 17 (i_2)", format!("b = a: f = {}(x+a)^({} - 1) with alpha <= 1", fr(&Rational::from(-beta)), fr(alpha)))
                .on(dom)
                .strict(!constant)
        } else if sign(beta) == Ordering::Less {
            ClassVerdict::new(F, NOT, "(i_2)", "Theorem 17 (i_2)", "b = a, beta < 0 requires alpha <= 1; f increases").on(dom)
        } else {
            ClassVerdict::new(F, NOT, "(i)", "Theorem 17 (i)", "b = a, beta > 0: f = -beta (x+a)^(alpha-1) < 0").on(dom)
        };
    }
    if gap == 1 {
        let one_minus = Rational::from(1 - beta.clone());
        let constant = *alpha == 1;
        return if *beta == 1 {
            ClassVerdict::new(F, CM, "(ii_1)", "Theorem 17 (ii_1)", "b = a + 1, beta = 1: f is identically zero").on(dom).strict(false)
        } else if *beta < 1 && *alpha <= 1 {
            ClassVerdict::new(F, CM, "(ii_2)", "Theorem 17 (ii_2)", format!("b = a + 1: f = {}(x+a)^(alpha-1) with alpha <= 1", fr(&one_minus)))
                .on(dom)
                .strict(!constant)
        } else if *beta < 1 {
            ClassVerdict::new(F, NOT, "(ii_2)", "Theorem 17 (ii_2)", format!("b = a + 1: f = {}(x+a)^({} - 1) is increasing", fr(&one_minus), fr(alpha))).on(dom)
        } else {
            ClassVerdict::new(F, NOT, "(ii)", "Theorem 17 (ii)", "b = a + 1, beta > 1: f = (1 - beta)(x+a)^(alpha-1) < 0").on(dom)
        };
    }
    if !(sign(&gap) == Ordering::Greater && gap < 1) {
        return ClassVerdict::new(
            F,
            UNKNOWN,
            "regime",
            "Theorem 17 (iii)",
            format!("outside the stated regime: needs b = a, b = a + 1, or 0 < 1 - b + a < 1 (here b - a = {})", fr(&gap)),
        )
        .threshold("b-a", &gap);
    }
    let remark = Rational::from(2 * b.clone()) - Rational::from(2 * a.clone()) - 1;
    let v = |s, id: &str, cite: &str, why: String| ClassVerdict::new(F, s, id, cite, why).on(dom.clone()).threshold("b-a", &gap);
    if *beta > gap {
        return v(NOT, "(iii) beta bound", "Theorem 17 (iii_1)", format!("beta > b - a = {}: f ~ (b - a - beta)(x+a)^(alpha-1) < 0 for large x", fr(&gap)));
    }
    if *alpha <= 1 {
        return v(CM, "(iii_1)", "Theorem 17 (iii_1)", format!("0 < 1 - b + a < 1, beta <= b - a = {}, alpha <= 1", fr(&gap))).strict(true);
    }
    if *beta < gap {
        return v(NOT, "(iii_2)", "Theorem 17 (iii_2)", "beta < b - a requires alpha <= 1".into());
    }
    if *alpha > 2 {
        return v(NOT, "(iii_2)", "Theorem 17 (iii_2)", "beta = b - a requires alpha <= 2".into());
    }
    if sign(&remark) == Ordering::Greater && *alpha >= 2 {
        return v(NOT, "Remark 18", "Remark 18", format!("beta = b - a and -1 - 2a + 2b = {} > 0 require alpha < 2", fr(&remark))).threshold("-1-2a+2b", &remark);
    }
    v(
        UNKNOWN,
        "open problem",
        "Theorem 17 (iii_2)",
        format!("beta = b - a with alpha = {} lies in the open zone 1 < alpha <= 2 where no criterion is known", fr(alpha)),
    )
    .threshold("-1-2a+2b", &remark)
}

/// `(x+a)^beta Gamma(x+a) / Gamma(x+b)` with `a >= 0, b > 0`.
pub fn classify_gamma_ratio_power(a: &Rational, b: &Rational, beta: &Rational) -> ClassVerdict {
    use ClassStatus::*;
    const F: &str = "gammaratiopower";
    const T: &str = "Theorem 19";
    let gap = Rational::from(b - a);
    if sign(a) == Ordering::Less || sign(b) != Ordering::Greater || !(sign(&gap) == Ordering::Greater && gap < 1) {
        return ClassVerdict::new(F, UNKNOWN, "regime", T, format!("outside the regime a >= 0, b > 0, 0 < 1 - b + a < 1 (here b - a = {})", fr(&gap)))
            .threshold("b-a", &gap);
    }
    let dom = Interval::above(Rational::from(-a));
    if *beta <= gap {
        ClassVerdict::new(F, LCM, "beta <= b-a", T, format!("beta <= b - a = {}; LCM implies CM", fr(&gap)))
            .on(dom)
            .threshold("b-a", &gap)
            .strict(true)
    } else {
        ClassVerdict::new(F, NOT, "beta <= b-a", T, format!("beta > b - a = {}: (log g)' > 0 for large x", fr(&gap)))
            .on(dom)
            .threshold("b-a", &gap)
    }
}

impl FamilyInstance {
    /// Exact classification by the theorem attached to the family.
    pub fn classify(&self) -> ClassVerdict {
        use ClassStatus::*;
        use FamilyInstance::*;
        match self {
            LinFracLog { a, b, c, d } => classify_linfrac(a, b, c, d),
            GammaLogRatio { a, b, c, d } => classify_gamma_ratio_log(a, b, c, d),
            PsiGap { a, b, alpha, beta } => classify_psi_gap(a, b, alpha, beta),
            GammaRatioPower { a, b, beta } => classify_gamma_ratio_power(a, b, beta),
            RecipPower { b, mu, .. } => {
                let constant = sign(b) == Ordering::Equal || sign(mu) == Ordering::Equal;
                ClassVerdict::new("recippow", CM, "a, b, mu >= 0", "Lemma 13", "(a + b/x)^mu with a, b, mu >= 0")
                    .on(Interval::positive())
                    .strict(!constant)
            }
            Vogt { beta } => {
                if *beta == 1 {
                    ClassVerdict::new("vogt", CM, "beta = 1", "Lemma 21", "1 + log Gamma(x+1)/x - log(x+1)")
                        .on(Interval::above(Rational::from(-1)))
                        .strict(true)
                } else {
                    ClassVerdict::new("vogt", CM, "0 <= beta <= 1", "Theorem 22", format!("1 + log Gamma(x+1)/x - log(x+{})", fr(beta)))
                        .on(Interval::positive())
                        .strict(true)
                }
            }
            GammaPowerLog { .. } => ClassVerdict::new(
                "gammapowerlog",
                UNKNOWN,
                "builder input",
                "Theorem 20",
                "this is the logarithm of the base of the power mean; classify the built power mean instead",
            ),
        }
    }
}
