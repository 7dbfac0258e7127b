//! Empirical bracket for the largest exponent `alpha` at which
//! `(x+a)^alpha [psi(x+b) - psi(x+a)] - (b-a)(x+a)^(alpha-1)` still passes
//! complete-monotonicity sign tests.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use crate::exprlang::{format_rational, Expr, Interval};
use crate::families::FamilyInstance;
use crate::numkernel::Real;
use crate::testers::{point_cells, sign_test, GridSpec, Mode, SignConfig, Verdict};

/// Label attached to every estimate: a finite-order, finite-grid bracket.
pub const EMPIRICAL: &str = "EMPIRICAL";

#[derive(Clone, Debug)]
pub struct Alpha0Config {
    pub order: usize,
    pub grid_size: usize,
    /// Offset of the first grid point from `-a`.
    pub delta: f64,
    pub span: f64,
    /// Starting precision; `0` means `max(64, 8N)`.
    pub precision: u32,
    /// Cap for precision escalation on INCONCLUSIVE probes.
    pub max_precision: u32,
    pub bisect_tol: Rational,
    pub search_lo: Rational,
    pub search_hi: Rational,
}

impl Default for Alpha0Config {
    fn default() -> Self {
        Alpha0Config {
            order: 14,
            grid_size: 96,
            delta: 2f64.powi(-8),
            span: 1e5,
            precision: 0,
            max_precision: 1024,
            bisect_tol: Rational::from((1, 1024)),
            search_lo: Rational::from(1),
            search_hi: Rational::from((5, 2)),
        }
    }
}

impl Alpha0Config {
    fn base_precision(&self) -> u32 {
        if self.precision == 0 {
            crate::taylor::default_precision(self.order)
        } else {
            self.precision
        }
    }
}

/// One bisection probe.
#[derive(Clone, Debug)]
pub struct Probe {
    pub alpha: Rational,
    pub precision: u32,
    pub verdict: String,
    /// `(n, x, margin)` of the deciding cell for FAIL or INCONCLUSIVE.
    pub cell: Option<(usize, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Alpha0Estimate {
    pub a: Rational,
    pub b: Rational,
    pub beta: Rational,
    pub alpha_lo: Rational,
    pub alpha_hi: Rational,
    pub order: usize,
    pub grid_points: usize,
    pub precision: u32,
    /// Order and point of the confirmed violation at `alpha_hi`.
    pub witness: (usize, Real, Real),
    pub trace: Vec<Probe>,
    pub label: &'static str,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Alpha0Error {
    #[error("(a, b) = ({a}, {b}) is outside the regime a >= 0, 0 < 1 - b + a < 1")]
    Regime { a: String, b: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("probe at alpha = {alpha} stayed INCONCLUSIVE up to {precision} bits: {detail}")]
    Inconclusive { alpha: String, precision: u32, detail: String },
    #[error("alpha = {alpha}: {detail}")]
    Unexpected { alpha: String, detail: String },
    #[error("non-monotone evidence: alpha = {failed} fails while alpha = {passed} passes")]
    NonMonotone { passed: String, failed: String },
}

/// `f_(alpha, b-a)` of the psi-gap family.
pub fn alpha_expr(a: &Rational, b: &Rational, alpha: &Rational) -> Expr {
    Expr::family(FamilyInstance::PsiGap { a: a.clone(), b: b.clone(), alpha: alpha.clone(), beta: Rational::from(b - a) })
}

fn in_regime(a: &Rational, b: &Rational) -> bool {
    let c = Rational::from(1 - Rational::from(b - a));
    a.cmp0() != Ordering::Less && c.cmp0() == Ordering::Greater && c < 1
}

/// Sample points on `(-a, inf)`.
pub fn alpha0_grid(a: &Rational, cfg: &Alpha0Config) -> GridSpec {
    let _ = a;
    GridSpec { size: cfg.grid_size, delta: Some(cfg.delta), span: cfg.span, decades: false }
}

enum Outcome {
    Pass,
    Fail { n: usize, x: Real, margin: Real },
}

struct Runner<'a> {
    a: &'a Rational,
    b: &'a Rational,
    cfg: &'a Alpha0Config,
    interval: Interval,
    trace: Vec<Probe>,
    precision: u32,
}

impl Runner<'_> {
    fn sign_cfg(&self, prec: u32) -> SignConfig {
        SignConfig { order: self.cfg.order, grid_size: self.cfg.grid_size, precision: prec, tol: None, grid: alpha0_grid(self.a, self.cfg) }
    }

    /// Sign test with precision escalation; FAIL is re-confirmed at twice the precision.
    fn probe(&mut self, alpha: &Rational) -> Result<Outcome, Alpha0Error> {
        let e = alpha_expr(self.a, self.b, alpha);
        let mut prec = self.precision;
        loop {
            let r = sign_test(&e, &self.interval, Mode::Cm, &self.sign_cfg(prec))
                .map_err(|err| Alpha0Error::Unexpected { alpha: format_rational(alpha), detail: err.to_string() })?;
            if !r.skipped.is_empty() {
                return Err(Alpha0Error::Unexpected {
                    alpha: format_rational(alpha),
                    detail: format!("{} grid points could not be evaluated: {}", r.skipped.len(), r.skipped[0].reason),
                });
            }
            let cell = match &r.verdict {
                Verdict::Pass => None,
                Verdict::Fail { n, x, margin, .. } | Verdict::Inconclusive { n, x, margin, .. } => Some((*n, x.to_f64(), margin.to_f64())),
            };
            self.trace.push(Probe { alpha: alpha.clone(), precision: prec, verdict: r.verdict.label().to_string(), cell });
            match r.verdict {
                Verdict::Pass => return Ok(Outcome::Pass),
                Verdict::Fail { n, x, margin, .. } => {
                    let p2 = 2 * prec;
                    let cells = point_cells(&e, &x.with_prec(p2), self.cfg.order, Mode::Cm, p2, None)
                        .map_err(|detail| Alpha0Error::Unexpected { alpha: format_rational(alpha), detail })?;
                    let confirmed = cells.get(n).and_then(|c| c.as_ref()).is_some_and(|c| c.margin < -&c.tol);
                    if confirmed {
                        self.precision = self.precision.max(prec);
                        return Ok(Outcome::Fail { n, x, margin });
                    }
                    if p2 > self.cfg.max_precision {
                        return Err(Alpha0Error::Inconclusive {
                            alpha: format_rational(alpha),
                            precision: prec,
                            detail: format!("FAIL at n={n} not re-confirmed at {p2} bits"),
                        });
                    }
                    prec = p2;
                }
                Verdict::Inconclusive { n, x, margin, tol } => {
                    if 2 * prec > self.cfg.max_precision {
                        return Err(Alpha0Error::Inconclusive {
                            alpha: format_rational(alpha),
                            precision: prec,
                            detail: format!("n={n} x={} margin={} tol={}", x.to_sci(10), margin.to_sci(6), tol.to_sci(3)),
                        });
                    }
                    prec *= 2;
                }
            }
        }
    }
}

/// Bisection bracket `[alpha_lo, alpha_hi]` with `alpha_lo` passing and
/// `alpha_hi` failing with a re-confirmed violation, `beta = b - a` fixed.
pub fn estimate_alpha0(a: &Rational, b: &Rational, cfg: &Alpha0Config) -> Result<Alpha0Estimate, Alpha0Error> {
    if !in_regime(a, b) {
        return Err(Alpha0Error::Regime { a: format_rational(a), b: format_rational(b) });
    }
    if cfg.order < 8 {
        return Err(Alpha0Error::Config(format!("order must be at least 8, got {}", cfg.order)));
    }
    if cfg.bisect_tol < Rational::from((1, 1 << 20)) {
        return Err(Alpha0Error::Config("bisection tolerance must be at least 2^-20".into()));
    }
    if cfg.search_lo >= cfg.search_hi {
        return Err(Alpha0Error::Config("empty search interval".into()));
    }
    let mut run = Runner { a, b, cfg, interval: Interval::above(Rational::from(-a)), trace: Vec::new(), precision: cfg.base_precision() };
    let mut lo = cfg.search_lo.clone();
    let mut hi = cfg.search_hi.clone();
    if let Outcome::Fail { n, .. } = run.probe(&lo)? {
        return Err(Alpha0Error::Unexpected { alpha: format_rational(&lo), detail: format!("the lower search end fails at n={n}") });
    }
    let mut witness = match run.probe(&hi)? {
        Outcome::Fail { n, x, margin } => (n, x, margin),
        Outcome::Pass => {
            return Err(Alpha0Error::Unexpected { alpha: format_rational(&hi), detail: "the upper search end passes; widen the search".into() })
        }
    };
    while Rational::from(&hi - &lo) > cfg.bisect_tol {
        let mid = Rational::from(&lo + &hi) / 2;
        match run.probe(&mid)? {
            Outcome::Pass => lo = mid,
            Outcome::Fail { n, x, margin } => {
                hi = mid;
                witness = (n, x, margin);
            }
        }
    }
    // every failing probe must lie above every passing one
    let passed = run.trace.iter().filter(|p| p.verdict == "PASS").map(|p| p.alpha.clone()).max();
    let failed = run.trace.iter().filter(|p| p.verdict == "FAIL").map(|p| p.alpha.clone()).min();
    if let (Some(p), Some(f)) = (&passed, &failed) {
        if f <= p {
            return Err(Alpha0Error::NonMonotone { passed: format_rational(p), failed: format_rational(f) });
        }
    }
    // the passing end re-verifies at twice the precision
    let p2 = 2 * run.precision;
    let e = alpha_expr(a, b, &lo);
    let r = sign_test(&e, &run.interval, Mode::Cm, &run.sign_cfg(p2))
        .map_err(|err| Alpha0Error::Unexpected { alpha: format_rational(&lo), detail: err.to_string() })?;
    if r.verdict.is_fail() {
        return Err(Alpha0Error::Unexpected { alpha: format_rational(&lo), detail: format!("alpha_lo fails at {p2} bits: {}", r.summary()) });
    }
    let grid_points = crate::testers::build_grid(&run.interval, &alpha0_grid(a, cfg), run.precision).len();
    Ok(Alpha0Estimate {
        a: a.clone(),
        b: b.clone(),
        beta: Rational::from(b - a),
        alpha_lo: lo,
        alpha_hi: hi,
        order: cfg.order,
        grid_points,
        precision: run.precision,
        witness,
        trace: run.trace,
        label: EMPIRICAL,
    })
}

/// One sweep row: an estimate or the error that stopped it.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub a: Rational,
    pub b: Rational,
    pub result: Result<Alpha0Estimate, Alpha0Error>,
}

/// Estimates over `a in a_values`, `b = a + offset`, ordered by `(a, b)`.
pub fn sweep_alpha0(a_values: &[Rational], b_offsets: &[Rational], cfg: &Alpha0Config) -> Vec<SweepRow> {
    let mut pairs: Vec<(Rational, Rational)> =
        a_values.iter().flat_map(|a| b_offsets.iter().map(move |o| (a.clone(), Rational::from(a + o)))).collect();
    pairs.sort();
    pairs.par_iter().map(|(a, b)| SweepRow { a: a.clone(), b: b.clone(), result: estimate_alpha0(a, b, cfg) }).collect()
}

pub const CSV_HEADER: &str = "a,b,beta,alpha_lo,alpha_hi,N,P,grid_points,status";

impl SweepRow {
    pub fn csv_line(&self, cfg: &Alpha0Config) -> String {
        let beta = format_rational(&Rational::from(&self.b - &self.a));
        match &self.result {
            Ok(e) => format!(
                "{},{},{},{},{},{},{},{},{}",
                format_rational(&e.a),
                format_rational(&e.b),
                beta,
                format_rational(&e.alpha_lo),
                format_rational(&e.alpha_hi),
                e.order,
                e.precision,
                e.grid_points,
                e.label
            ),
            Err(err) => format!(
                "{},{},{},,,{},{},{},\"ERROR: {}\"",
                format_rational(&self.a),
                format_rational(&self.b),
                beta,
                cfg.order,
                cfg.base_precision(),
                cfg.grid_size,
                err.to_string().replace('"', "'")
            ),
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.result {
            Ok(e) => e.to_json(),
            Err(err) => json!({"a": format_rational(&self.a), "b": format_rational(&self.b), "status": "ERROR", "error": err.to_string()}),
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow], cfg: &Alpha0Config) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line(cfg));
        out.push('\n');
    }
    out
}

impl Alpha0Estimate {
    /// `-1 - 2a + 2b`; positive values force `alpha_0 < 2`.
    pub fn gap_margin(&self) -> Rational {
        Rational::from(2 * Rational::from(&self.b - &self.a)) - 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "alpha0-estimate/1",
            "label": self.label,
            "a": format_rational(&self.a),
            "b": format_rational(&self.b),
            "beta": format_rational(&self.beta),
            "alpha_lo": format_rational(&self.alpha_lo),
            "alpha_hi": format_rational(&self.alpha_hi),
            "N": self.order,
            "P": self.precision,
            "grid_points": self.grid_points,
            "witness": {"n": self.witness.0, "x": self.witness.1.to_sci(20), "margin": self.witness.2.to_sci(20)},
            "trace": self.trace.iter().map(|p| json!({
                "alpha": format_rational(&p.alpha),
                "precision": p.precision,
                "verdict": p.verdict,
                "n": p.cell.map(|c| c.0),
                "x": p.cell.map(|c| c.1),
                "margin": p.cell.map(|c| c.2),
            })).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn quick() -> Alpha0Config {
        Alpha0Config { order: 8, grid_size: 32, bisect_tol: q(1, 64), ..Alpha0Config::default() }
    }

    #[test]
    fn bracket_inside_the_known_bounds() {
        let e = estimate_alpha0(&q(0, 1), &q(9, 10), &quick()).unwrap();
        assert!(e.alpha_lo >= 1 && e.alpha_hi < 2);
        assert!(Rational::from(&e.alpha_hi - &e.alpha_lo) <= q(1, 64));
        assert_eq!(e.trace[0].verdict, "PASS");
        assert_eq!(e.label, EMPIRICAL);
    }

    #[test]
    fn regime_and_config_errors() {
        assert!(matches!(estimate_alpha0(&q(0, 1), &q(1, 1), &quick()), Err(Alpha0Error::Regime { .. })));
        let cfg = Alpha0Config { bisect_tol: q(1, 1 << 22), ..quick() };
        assert!(matches!(estimate_alpha0(&q(0, 1), &q(1, 2), &cfg), Err(Alpha0Error::Config(_))));
    }

    #[test]
    fn sweep_rows_are_ordered_and_deterministic() {
        assert!(sweep_alpha0(&[], &[q(1, 2)], &quick()).is_empty());
        let rows = sweep_alpha0(&[q(1, 2), q(0, 1), q(1, 2)], &[q(1, 2)], &quick());
        assert_eq!(rows.len(), 3);
        assert!(rows[0].a < rows[1].a);
        assert_eq!(rows[1].csv_line(&quick()), rows[2].csv_line(&quick()));
        assert!(sweep_csv(&rows, &quick()).starts_with(CSV_HEADER));
    }
}
