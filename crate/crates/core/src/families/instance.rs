use std::cmp::Ordering;

use rug::Rational;
use serde_json::Value;

use crate::exprlang::{parse_expr, parse_interval, Expr, Interval};

/// Named parametric family. Parameters are exact rationals, except the
/// constant factor of [`FamilyInstance::GammaPowerLog`], which may be any
/// closed expression such as `sqrt(pi)`.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyInstance {
    /// `log((a x + b)/(c x + d))`
    LinFracLog { a: Rational, b: Rational, c: Rational, d: Rational },
    /// `log Gamma(a x + b) - log Gamma(c x + d)`
    GammaLogRatio { a: Rational, b: Rational, c: Rational, d: Rational },
    /// `(x+a)^alpha [psi(x+b) - psi(x+a) - beta/(x+a)]`
    PsiGap { a: Rational, b: Rational, alpha: Rational, beta: Rational },
    /// `(x+a)^beta Gamma(x+a) / Gamma(x+b)`
    GammaRatioPower { a: Rational, b: Rational, beta: Rational },
    /// `(a + b/x)^mu`
    RecipPower { a: Rational, b: Rational, mu: Rational },
    /// `1 + log Gamma(x+1)/x - log(x+beta)`
    Vogt { beta: Rational },
    /// `log Gamma(x+b) - log Gamma(x+a) - beta log(x+a) + log c0`
    GammaPowerLog { a: Rational, b: Rational, beta: Rational, c0: Box<Expr> },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family '{0}' (known: {known})", known = FAMILY_NAMES.join(", "))]
    UnknownFamily(String),
    #[error("family '{family}' is missing parameter '{param}'")]
    MissingParam { family: String, param: String },
    #[error("family '{family}' has no parameter '{param}'")]
    UnknownParam { family: String, param: String },
    #[error("parameter '{param}' given twice")]
    DuplicateParam { param: String },
    #[error("parameter '{param}' must be an exact rational number")]
    NotRational { param: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter file: {0}")]
    Json(String),
}

impl FamilyError {
    /// The parameter the error refers to, if any.
    pub fn param(&self) -> Option<&str> {
        match self {
            FamilyError::MissingParam { param, .. }
            | FamilyError::UnknownParam { param, .. }
            | FamilyError::DuplicateParam { param }
            | FamilyError::NotRational { param } => Some(param),
            _ => None,
        }
    }
}

pub const FAMILY_NAMES: [&str; 7] = ["linfraclog", "gammalogratio", "psigap", "gammaratiopower", "recippow", "vogt", "gammapowerlog"];

fn zero() -> Rational {
    Rational::new()
}

fn is_zero(q: &Rational) -> bool {
    q.cmp0() == Ordering::Equal
}

fn c(q: &Rational) -> Expr {
    Expr::constant(q.clone())
}

fn rmax(a: Rational, b: Rational) -> Rational {
    if a > b {
        a
    } else {
        b
    }
}

impl FamilyInstance {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyInstance::LinFracLog { .. } => "linfraclog",
            FamilyInstance::GammaLogRatio { .. } => "gammalogratio",
            FamilyInstance::PsiGap { .. } => "psigap",
            FamilyInstance::GammaRatioPower { .. } => "gammaratiopower",
            FamilyInstance::RecipPower { .. } => "recippow",
            FamilyInstance::Vogt { .. } => "vogt",
            FamilyInstance::GammaPowerLog { .. } => "gammapowerlog",
        }
    }

    fn param_names(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "linfraclog" | "gammalogratio" => &["a", "b", "c", "d"],
            "psigap" => &["a", "b", "alpha", "beta"],
            "gammaratiopower" => &["a", "b", "beta"],
            "recippow" => &["a", "b", "mu"],
            "vogt" => &["beta"],
            "gammapowerlog" => &["a", "b", "beta", "c0"],
            _ => return None,
        })
    }

    /// Parameters in canonical order, as constant expressions.
    pub fn params(&self) -> Vec<(&'static str, Expr)> {
        use FamilyInstance::*;
        match self {
            LinFracLog { a, b, c: cc, d } | GammaLogRatio { a, b, c: cc, d } => vec![("a", c(a)), ("b", c(b)), ("c", c(cc)), ("d", c(d))],
            PsiGap { a, b, alpha, beta } => vec![("a", c(a)), ("b", c(b)), ("alpha", c(alpha)), ("beta", c(beta))],
            GammaRatioPower { a, b, beta } => vec![("a", c(a)), ("b", c(b)), ("beta", c(beta))],
            RecipPower { a, b, mu } => vec![("a", c(a)), ("b", c(b)), ("mu", c(mu))],
            Vogt { beta } => vec![("beta", c(beta))],
            GammaPowerLog { a, b, beta, c0 } => vec![("a", c(a)), ("b", c(b)), ("beta", c(beta)), ("c0", (**c0).clone())],
        }
    }

    /// Builds an instance from `name` and `(key, closed expression)` pairs.
    pub fn from_params(name: &str, params: &[(String, Expr)]) -> Result<FamilyInstance, FamilyError> {
        let name = name.to_ascii_lowercase().replace(['-', '_'], "");
        let names = FamilyInstance::param_names(&name).ok_or_else(|| FamilyError::UnknownFamily(name.clone()))?;
        for (i, (k, _)) in params.iter().enumerate() {
            if !names.contains(&k.as_str()) {
                return Err(FamilyError::UnknownParam { family: name.clone(), param: k.clone() });
            }
            if params[..i].iter().any(|(k2, _)| k2 == k) {
                return Err(FamilyError::DuplicateParam { param: k.clone() });
            }
        }
        let get = |k: &str| -> Result<&Expr, FamilyError> {
            params
                .iter()
                .find(|(pk, _)| pk == k)
                .map(|(_, v)| v)
                .ok_or_else(|| FamilyError::MissingParam { family: name.clone(), param: k.to_string() })
        };
        let rat = |k: &str| -> Result<Rational, FamilyError> { get(k)?.fold_rational().ok_or_else(|| FamilyError::NotRational { param: k.to_string() }) };
        let inst = match name.as_str() {
            "linfraclog" => FamilyInstance::LinFracLog { a: rat("a")?, b: rat("b")?, c: rat("c")?, d: rat("d")? },
            "gammalogratio" => FamilyInstance::GammaLogRatio { a: rat("a")?, b: rat("b")?, c: rat("c")?, d: rat("d")? },
            "psigap" => FamilyInstance::PsiGap { a: rat("a")?, b: rat("b")?, alpha: rat("alpha")?, beta: rat("beta")? },
            "gammaratiopower" => FamilyInstance::GammaRatioPower { a: rat("a")?, b: rat("b")?, beta: rat("beta")? },
            "recippow" => FamilyInstance::RecipPower { a: rat("a")?, b: rat("b")?, mu: rat("mu")? },
            "vogt" => FamilyInstance::Vogt { beta: rat("beta")? },
            "gammapowerlog" => {
                let c0 = get("c0")?.clone();
                if !c0.is_closed() {
                    return Err(FamilyError::NotRational { param: "c0".into() });
                }
                FamilyInstance::GammaPowerLog { a: rat("a")?, b: rat("b")?, beta: rat("beta")?, c0: Box::new(c0) }
            }
            _ => unreachable!("param_names covers every family"),
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks the structural invariants of the family.
    pub fn validate(&self) -> Result<(), FamilyError> {
        use FamilyInstance::*;
        match self {
            LinFracLog { a, b, c, d } => {
                if is_zero(a) && is_zero(b) {
                    return Err(FamilyError::Precondition("a^2 + b^2 must be nonzero".into()));
                }
                if is_zero(c) && is_zero(d) {
                    return Err(FamilyError::Precondition("c^2 + d^2 must be nonzero".into()));
                }
            }
            GammaLogRatio { a, b, c, d } => {
                if (is_zero(a) && b.cmp0() != Ordering::Greater) || (is_zero(c) && d.cmp0() != Ordering::Greater) {
                    return Err(FamilyError::Precondition("Gamma arguments must be positive somewhere".into()));
                }
                if a.cmp0() == Ordering::Less || c.cmp0() == Ordering::Less {
                    return Err(FamilyError::Precondition("a and c must be nonnegative".into()));
                }
            }
            PsiGap { a, b, .. } => {
                if a.cmp0() == Ordering::Less || b.cmp0() == Ordering::Less {
                    return Err(FamilyError::Precondition("a >= 0 and b >= 0 required".into()));
                }
            }
            GammaRatioPower { a, b, .. } => {
                if a.cmp0() == Ordering::Less || b.cmp0() != Ordering::Greater {
                    return Err(FamilyError::Precondition("a >= 0 and b > 0 required".into()));
                }
            }
            RecipPower { a, b, mu } => {
                if a.cmp0() == Ordering::Less || b.cmp0() == Ordering::Less || mu.cmp0() == Ordering::Less {
                    return Err(FamilyError::Precondition("a, b, mu >= 0 required".into()));
                }
                if is_zero(a) && is_zero(b) {
                    return Err(FamilyError::Precondition("a and b cannot both be zero".into()));
                }
            }
            Vogt { beta } => {
                if beta.cmp0() == Ordering::Less || *beta > 1 {
                    return Err(FamilyError::Precondition("0 <= beta <= 1 required".into()));
                }
            }
            GammaPowerLog { a, b, c0, .. } => {
                if a.cmp0() != Ordering::Greater || b.cmp0() != Ordering::Greater {
                    return Err(FamilyError::Precondition("a > 0 and b > 0 required".into()));
                }
                match c0.closed_value(64) {
                    Some(v) if v.is_positive() => {}
                    _ => return Err(FamilyError::Precondition("c0 must be a positive constant".into())),
                }
            }
        }
        Ok(())
    }

    /// The family written in primitive nodes.
    pub fn expand(&self) -> Expr {
        use FamilyInstance::*;
        match self {
            LinFracLog { a, b, c, d } => {
                let num = Expr::affine(a, b);
                if is_zero(c) && *d == 1 {
                    Expr::log(num)
                } else {
                    Expr::log(Expr::div(num, Expr::affine(c, d)))
                }
            }
            GammaLogRatio { a, b, c, d } => Expr::sub(Expr::log_gamma(Expr::affine(a, b)), Expr::log_gamma(Expr::affine(c, d))),
            PsiGap { a, b, alpha, beta } => {
                let xa = Expr::shifted(a);
                let mut bracket = Expr::sub(Expr::digamma(Expr::shifted(b)), Expr::digamma(xa.clone()));
                if !is_zero(beta) {
                    bracket = Expr::sub(bracket, Expr::div(Expr::constant(beta.clone()), xa.clone()));
                }
                if is_zero(alpha) {
                    bracket
                } else if *alpha == 1 {
                    Expr::mul(xa, bracket)
                } else {
                    Expr::mul(Expr::pow(xa, alpha.clone()), bracket)
                }
            }
            GammaRatioPower { a, b, beta } => {
                let ratio = Expr::exp(Expr::sub(Expr::log_gamma(Expr::shifted(a)), Expr::log_gamma(Expr::shifted(b))));
                if is_zero(beta) {
                    ratio
                } else {
                    Expr::mul(Expr::pow(Expr::shifted(a), beta.clone()), ratio)
                }
            }
            RecipPower { a, b, mu } => {
                let base = Expr::add(Expr::constant(a.clone()), Expr::div(Expr::constant(b.clone()), Expr::var()));
                Expr::pow(base, mu.clone())
            }
            Vogt { beta } => {
                let q = Expr::over_x(Expr::log_gamma(Expr::shifted(&Rational::from(1))));
                Expr::sub(Expr::add(Expr::int(1), q), Expr::log(Expr::shifted(beta)))
            }
            GammaPowerLog { a, b, beta, c0 } => {
                let mut e = Expr::sub(Expr::log_gamma(Expr::shifted(b)), Expr::log_gamma(Expr::shifted(a)));
                if !is_zero(beta) {
                    e = Expr::sub(e, Expr::mul(Expr::constant(beta.clone()), Expr::log(Expr::shifted(a))));
                }
                Expr::add(e, Expr::log((**c0).clone()))
            }
        }
    }

    /// Largest open half-line `(lo, inf)` on which the family is defined.
    pub fn natural_domain(&self) -> Interval {
        use FamilyInstance::*;
        match self {
            LinFracLog { a, b, c, d } => {
                let mut lo: Option<Rational> = None;
                for (p, q) in [(a, b), (c, d)] {
                    if p.cmp0() == Ordering::Greater {
                        let root = Rational::from(-q) / p;
                        lo = Some(match lo {
                            Some(l) => rmax(l, root),
                            None => root,
                        });
                    }
                }
                Interval::open(lo, None)
            }
            GammaLogRatio { a, b, c, d } => {
                let mut lo: Option<Rational> = None;
                for (p, q) in [(a, b), (c, d)] {
                    if p.cmp0() == Ordering::Greater {
                        let root = Rational::from(-q) / p;
                        lo = Some(match lo {
                            Some(l) => rmax(l, root),
                            None => root,
                        });
                    }
                }
                Interval::open(lo, None)
            }
            PsiGap { a, b, .. } | GammaRatioPower { a, b, .. } | GammaPowerLog { a, b, .. } => Interval::above(rmax(-a.clone(), -b.clone())),
            RecipPower { .. } => Interval::positive(),
            Vogt { beta } => Interval::above(rmax(Rational::from(-1), -beta.clone())),
        }
    }

    /// Interval named by the theorem attached to the family, falling back to the natural domain.
    pub fn theorem_interval(&self) -> Interval {
        use FamilyInstance::*;
        match self {
            PsiGap { a, .. } | GammaRatioPower { a, .. } => Interval::above(-a.clone()),
            Vogt { beta } if *beta < 1 => Interval::positive(),
            GammaPowerLog { .. } => Interval::new(crate::exprlang::Bound::Closed(zero()), crate::exprlang::Bound::Infinite),
            _ => self.natural_domain(),
        }
    }
}

/// Family instance read from a parameter file.
#[derive(Clone, Debug)]
pub struct FamilyFile {
    pub instance: FamilyInstance,
    pub interval: Option<Interval>,
}

fn json_param(key: &str, v: &Value) -> Result<Expr, FamilyError> {
    match v {
        // f64 Display is the shortest round-trip form, so 0.1 reads back as 1/10
        Value::Number(n) => {
            let text = if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                let f = n.as_f64().ok_or_else(|| FamilyError::Json(format!("parameter '{key}' is not a finite number")))?;
                if !f.is_finite() {
                    return Err(FamilyError::Json(format!("parameter '{key}' is not a finite number")));
                }
                format!("{f:?}")
            };
            parse_expr(&text).map_err(|e| FamilyError::Json(format!("parameter '{key}': {e}")))
        }
        Value::String(s) => parse_expr(s).map_err(|e| FamilyError::Json(format!("parameter '{key}': {e}"))),
        _ => Err(FamilyError::Json(format!("parameter '{key}' must be a number or a string"))),
    }
}

/// Reads `{"family": ..., "params": {...}, "interval": "(0, inf)"}`.
pub fn parse_family_json(text: &str) -> Result<FamilyFile, FamilyError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FamilyError::Json(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| FamilyError::Json("top level must be an object".into()))?;
    let family = obj.get("family").and_then(Value::as_str).ok_or_else(|| FamilyError::Json("missing string field 'family'".into()))?;
    let params_obj = obj.get("params").and_then(Value::as_object).ok_or_else(|| FamilyError::Json("missing object field 'params'".into()))?;
    let mut params = Vec::new();
    for (k, pv) in params_obj {
        let e = json_param(k, pv)?;
        if !e.is_closed() {
            return Err(FamilyError::Json(format!("parameter '{k}' must not depend on x")));
        }
        params.push((k.clone(), e));
    }
    let instance = FamilyInstance::from_params(family, &params)?;
    let interval = match obj.get("interval") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(parse_interval(s).map_err(|e| FamilyError::Json(format!("interval: {e}")))?),
        Some(_) => return Err(FamilyError::Json("'interval' must be a string such as \"(0, inf)\"".into())),
    };
    Ok(FamilyFile { instance, interval })
}
