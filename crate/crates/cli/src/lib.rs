//! Subcommand implementations behind the `cmono` binary.

pub mod config;

use std::time::{SystemTime, UNIX_EPOCH};

use rug::Rational;
use serde_json::{json, Value};

use cmono_core::alpha0::{estimate_alpha0, sweep_alpha0, sweep_csv, Alpha0Config};
use cmono_core::exprlang::{certify, parse, parse_expr, parse_family_spec, parse_interval, print, print_certificate, CertifyError, Expr, Interval, ParseError};
use cmono_core::families::{
    asym_error_exponent, geometric_points, parse_family_json, psi_asymptotic_slope, psi_gap_slopes, ClassStatus, FamilyError, FamilyInstance,
    SlopeFit, FAMILY_NAMES,
};
use cmono_core::numkernel::Real;
use cmono_core::testers::{point_cells, sign_test, witness_search, Mode, SignConfig, Verdict, Witness, WitnessConfig};

pub use config::{parse_config, ConfigError, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

/// Rendered output and the exit code it maps to.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{err}\n  {input}\n  {caret}")]
    Parse { input: String, err: ParseError, caret: String },
    #[error("{0}")]
    Family(#[from] FamilyError),
    #[error("{0}")]
    Certify(CertifyError),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
}

impl CliError {
    pub fn parse(input: &str, err: ParseError) -> CliError {
        let caret = format!("{}^", " ".repeat(err.pos.min(input.len())));
        CliError::Parse { input: input.to_string(), err, caret }
    }
}

fn stamp(mut v: Value, cfg: &RunConfig) -> Value {
    if !cfg.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        v["generated_at"] = json!(secs);
    }
    v
}

fn render_json(v: Value, cfg: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(&stamp(v, cfg)).expect("json values serialize");
    s.push('\n');
    s
}

/// What a command operates on.
pub struct Target {
    pub expr: Expr,
    pub interval: Option<Interval>,
    pub family: Option<FamilyInstance>,
}

fn looks_like_family(input: &str) -> bool {
    let head: String = input.trim_start().chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_').collect();
    let norm = head.to_ascii_lowercase().replace(['-', '_'], "");
    FAMILY_NAMES.contains(&norm.as_str()) && !input.trim_start()[head.len()..].trim_start().starts_with('(')
}

/// Reads an expression (`expr [on I]`), a family spec (`name k=v ... [on I]`)
/// or, with `json`, a parameter file.
pub fn load_target(input: Option<&str>, json: Option<&str>) -> Result<Target, CliError> {
    if let Some(path) = json {
        let text = std::fs::read_to_string(path).map_err(|err| CliError::Io { path: path.to_string(), err })?;
        let f = parse_family_json(&text)?;
        return Ok(Target { expr: Expr::family(f.instance.clone()), interval: f.interval, family: Some(f.instance) });
    }
    let input = input.ok_or_else(|| CliError::Usage("an expression, a family spec or --json FILE is required".into()))?;
    if looks_like_family(input) {
        let (inst, interval) = parse_family_spec(input).map_err(|e| CliError::parse(input, e))?;
        inst.validate()?;
        return Ok(Target { expr: Expr::family(inst.clone()), interval, family: Some(inst) });
    }
    let p = parse(input).map_err(|e| CliError::parse(input, e))?;
    Ok(Target { expr: p.expr, interval: p.interval, family: None })
}

fn resolve_interval(t: &Target, flag: Option<&str>) -> Result<Interval, CliError> {
    if let Some(s) = flag {
        return parse_interval(s).map_err(|e| CliError::parse(s, e));
    }
    if let Some(i) = &t.interval {
        return Ok(i.clone());
    }
    if let Some(f) = &t.family {
        return Ok(f.theorem_interval().intersect(&t.expr.domain));
    }
    Ok(t.expr.domain.clone())
}

pub fn cmd_certify(input: &str, interval: Option<&str>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = load_target(Some(input), None)?;
    let i = resolve_interval(&t, interval)?;
    let fmt = cfg.format.unwrap_or(Format::Text);
    match certify(&t.expr, &i) {
        Ok(c) => {
            let body = match fmt {
                Format::Json => render_json(json!({"schema": "certificate/1", "status": "CERTIFIED", "certificate": c.to_json()}), cfg),
                _ => print_certificate(&c),
            };
            Ok(Outcome { code: EXIT_OK, body })
        }
        Err(CertifyError::NoRuleApplies(e)) => {
            let msg = format!("no rule applies to `{e}` on {i}; this is not a claim that it fails to be completely monotone");
            let body = match fmt {
                Format::Json => render_json(json!({"schema": "certificate/1", "status": "NO_RULE", "message": msg}), cfg),
                _ => format!("NO_RULE: {msg}\n"),
            };
            Ok(Outcome { code: EXIT_UNDECIDED, body })
        }
        Err(err) => Err(CliError::Certify(err)),
    }
}

fn sign_config(cfg: &RunConfig) -> SignConfig {
    SignConfig {
        order: cfg.order.unwrap_or(cmono_core::taylor::DEFAULT_ORDER),
        grid_size: cfg.grid.unwrap_or(48),
        precision: cfg.precision.unwrap_or(0),
        tol: cfg.tol,
        ..SignConfig::default()
    }
}

/// Confirms a FAIL cell at twice the precision, falling back to a witness search.
fn confirm_failure(e: &Expr, i: &Interval, mode: Mode, sc: &SignConfig, prec: u32, verdict: &Verdict, seed: u64) -> Option<Witness> {
    if let Verdict::Fail { n, x, margin, tol } = verdict {
        let p2 = 2 * prec;
        if let Ok(cells) = point_cells(e, &x.with_prec(p2), sc.order, mode, p2, None) {
            if let Some(Some(c)) = cells.get(*n) {
                if c.margin < -&c.tol {
                    return Some(Witness {
                        order: *n,
                        x: x.clone(),
                        margin: margin.clone(),
                        tol: tol.clone(),
                        precision: prec,
                        confirm_margin: c.margin.clone(),
                        confirm_precision: p2,
                    });
                }
            }
        }
    }
    let wc = WitnessConfig { order: sc.order, budget: 400, precision: prec, seed, mode, span: sc.grid.span };
    witness_search(e, i, &wc)
}

pub fn cmd_test(input: Option<&str>, json_path: Option<&str>, interval: Option<&str>, mode: Mode, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = load_target(input, json_path)?;
    let i = resolve_interval(&t, interval)?;
    let sc = sign_config(cfg);
    let r = sign_test(&t.expr, &i, mode, &sc).map_err(|e| CliError::Usage(e.to_string()))?;
    let (code, witness) = match &r.verdict {
        Verdict::Pass => (EXIT_OK, None),
        v @ Verdict::Fail { .. } => match confirm_failure(&t.expr, &i, mode, &sc, r.precision, v, cfg.seed.unwrap_or(0)) {
            Some(w) => (EXIT_FAIL, Some(w)),
            None => (EXIT_UNDECIDED, None),
        },
        Verdict::Inconclusive { .. } => (EXIT_UNDECIDED, None),
    };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = r.to_json();
            v["witness"] = witness.as_ref().map_or(Value::Null, Witness::to_json);
            render_json(v, cfg)
        }
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut s = format!("{} on {} [{} N={} P={} grid={}]\n{}\n", r.expr, r.interval, r.mode, r.order, r.precision, r.grid.len(), r.summary());
            if let Some(w) = &witness {
                s.push_str(&format!(
                    "witness: n={} x={} margin={} (re-confirmed at {} bits: {})\n",
                    w.order,
                    w.x.to_sci(20),
                    w.margin.to_sci(12),
                    w.confirm_precision,
                    w.confirm_margin.to_sci(12)
                ));
            }
            for sk in &r.skipped {
                s.push_str(&format!("skipped x={}: {}\n", sk.x.to_sci(12), sk.reason));
            }
            s
        }
    };
    Ok(Outcome { code, body })
}

pub fn cmd_classify(input: Option<&str>, json_path: Option<&str>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = load_target(input, json_path)?;
    let inst = t.family.ok_or_else(|| CliError::Usage("classify needs a family spec, e.g. `psi-gap a=0 b=0.5 alpha=1 beta=0.5`".into()))?;
    let v = inst.classify();
    let code = match v.status {
        ClassStatus::CM | ClassStatus::LCM => EXIT_OK,
        ClassStatus::NOT => EXIT_FAIL,
        ClassStatus::UNKNOWN => EXIT_UNDECIDED,
    };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut j = serde_json::to_value(&v).expect("verdict serializes");
            j["schema"] = json!("class-verdict/1");
            j["interval"] = v.interval.as_ref().map_or(Value::Null, |i| json!(i.to_string()));
            j["expr"] = json!(print(&t.expr));
            render_json(j, cfg)
        }
        Format::Csv => format!(
            "family,status,condition,citation,interval\n{},{},{},\"{}\",\"{}\"\n",
            v.family,
            v.status,
            v.condition_id,
            v.citation,
            v.interval.as_ref().map_or(String::new(), |i| i.to_string())
        ),
        Format::Text => {
            let mut s = format!("{} {} {} [{}]\n", v.family, v.status, v.condition_id, v.citation);
            if let Some(i) = &v.interval {
                s.push_str(&format!("interval: {i}\n"));
            }
            for (k, val) in &v.thresholds {
                s.push_str(&format!("{k} = {val}\n"));
            }
            s.push_str(&format!("reason: {}\n", v.reason));
            s
        }
    };
    Ok(Outcome { code, body })
}

/// Reads `0.5`, `1/2` or `-3` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let e = parse_expr(s.trim()).map_err(|e| CliError::parse(s, e))?;
    e.fold_rational().ok_or_else(|| CliError::Usage(format!("'{s}' is not a rational number")))
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_rational).collect()
}

fn alpha0_config(cfg: &RunConfig, bisect_tol: Option<&str>) -> Result<Alpha0Config, CliError> {
    let mut c = Alpha0Config::default();
    if let Some(n) = cfg.order {
        c.order = n;
    }
    if let Some(g) = cfg.grid {
        c.grid_size = g;
    }
    if let Some(p) = cfg.precision {
        c.precision = p;
        c.max_precision = c.max_precision.max(4 * p);
    }
    if let Some(t) = bisect_tol {
        c.bisect_tol = parse_rational(t)?;
    }
    Ok(c)
}

pub fn cmd_alpha0(a: &str, b: &str, bisect_tol: Option<&str>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ac = alpha0_config(cfg, bisect_tol)?;
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let est = estimate_alpha0(&a, &b, &ac);
    let row = cmono_core::alpha0::SweepRow { a, b, result: est };
    let code = if row.result.is_ok() { EXIT_OK } else { EXIT_UNDECIDED };
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => render_json(row.to_json(), cfg),
        Format::Csv => sweep_csv(std::slice::from_ref(&row), &ac),
        Format::Text => match &row.result {
            Ok(e) => format!(
                "{}: alpha_0 in [{}, {}] for a={} b={} beta={} (N={}, P={}, {} grid points)\n",
                e.label,
                cmono_core::exprlang::format_rational(&e.alpha_lo),
                cmono_core::exprlang::format_rational(&e.alpha_hi),
                cmono_core::exprlang::format_rational(&e.a),
                cmono_core::exprlang::format_rational(&e.b),
                cmono_core::exprlang::format_rational(&e.beta),
                e.order,
                e.precision,
                e.grid_points
            ),
            Err(err) => format!("ERROR: {err}\n"),
        },
    };
    Ok(Outcome { code, body })
}

pub const SWEEP_A: &str = "0,0.5,1";
pub const SWEEP_OFFSETS: &str = "0.1,0.5,0.9";

pub fn cmd_alpha0_sweep(a_values: &str, b_offsets: &str, bisect_tol: Option<&str>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ac = alpha0_config(cfg, bisect_tol)?;
    let rows = sweep_alpha0(&parse_rational_list(a_values)?, &parse_rational_list(b_offsets)?, &ac);
    let code = if rows.iter().all(|r| r.result.is_ok()) { EXIT_OK } else { EXIT_UNDECIDED };
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => render_json(json!({"schema": "alpha0-sweep/1", "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>()}), cfg),
        _ => sweep_csv(&rows, &ac),
    };
    Ok(Outcome { code, body })
}

pub const SLOPE_TOL: f64 = 0.2;

fn slope_json(s: &SlopeFit) -> Value {
    json!({"label": s.label, "expected": s.expected, "fitted": s.fitted, "pass": s.within(SLOPE_TOL)})
}

pub fn cmd_asymcheck(a: &str, b: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let prec = cfg.precision.unwrap_or(256);
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let (ar, br) = (Real::from_rational(&a, prec), Real::from_rational(&b, prec));
    let xs = geometric_points(1e2, 1e5, 7, prec);
    let kerr = |e: cmono_core::numkernel::KernelError| CliError::Usage(e.to_string());
    let mut fits = Vec::new();
    for m in 0..=1 {
        for k in 1..=3 {
            fits.push(psi_asymptotic_slope(&ar, k, m, &xs).map_err(kerr)?);
        }
    }
    for depth in 1..=3 {
        let (g, c) = psi_gap_slopes(&ar, &br, depth, &xs).map_err(kerr)?;
        debug_assert_eq!(g.expected, asym_error_exponent(depth));
        fits.push(g);
        fits.push(c);
    }
    let ok = fits.iter().all(|f| f.within(SLOPE_TOL));
    let body = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => render_json(
            json!({"schema": "asymcheck/1", "a": cmono_core::exprlang::format_rational(&a), "b": cmono_core::exprlang::format_rational(&b),
                   "precision": prec, "x_range": [1e2, 1e5], "tolerance": SLOPE_TOL, "fits": fits.iter().map(slope_json).collect::<Vec<_>>(),
                   "status": if ok { "PASS" } else { "FAIL" }}),
            cfg,
        ),
        Format::Csv => {
            let mut s = String::from("label,expected,fitted,pass\n");
            for f in &fits {
                s.push_str(&format!("{},{},{},{}\n", f.label, f.expected, f.fitted.map_or(String::new(), |v| format!("{v:.4}")), f.within(SLOPE_TOL)));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for f in &fits {
                s.push_str(&format!(
                    "{:<28} expected {:>3}  fitted {}  {}\n",
                    f.label,
                    f.expected,
                    f.fitted.map_or("n/a".into(), |v| format!("{v:.4}")),
                    if f.within(SLOPE_TOL) { "ok" } else { "off" }
                ));
            }
            s
        }
    };
    Ok(Outcome { code: if ok { EXIT_OK } else { EXIT_FAIL }, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_detection() {
        assert!(looks_like_family("psi-gap a=0 b=1/2 alpha=1 beta=1/2"));
        assert!(looks_like_family("vogt beta=1"));
        assert!(!looks_like_family("exp(-x)"));
        assert!(!looks_like_family("x + 1"));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.5").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational_list("0, 1/3,").unwrap().len(), 2);
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn parse_errors_point_at_the_column() {
        let e = load_target(Some("exp(-x"), None).err().unwrap().to_string();
        assert!(e.contains("column"), "{e}");
        assert!(e.lines().last().unwrap().trim_end().ends_with('^'));
    }
}
