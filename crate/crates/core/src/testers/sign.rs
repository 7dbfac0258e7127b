use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::grid::{build_grid, GridSpec};
use crate::exprlang::{print, Expr, ExprKind, Interval};
use crate::numkernel::Real;
use crate::taylor::{default_precision, eval_derivatives, Jet, DEFAULT_ORDER, MAX_ORDER};

/// Which defining inequalities to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `(-1)^n f^(n) >= 0`
    Cm,
    /// `f^(n) >= 0`
    Am,
    /// `f > 0` and `(-1)^n (log f)^(n) >= 0` for `n >= 1`
    Lcm,
    /// `f >= 0` and `(-1)^(n-1) f^(n) >= 0` for `n >= 1`
    Bern,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cm => "CM",
            Mode::Am => "AM",
            Mode::Lcm => "LCM",
            Mode::Bern => "BERN",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s.to_ascii_uppercase().as_str() {
            "CM" => Ok(Mode::Cm),
            "AM" => Ok(Mode::Am),
            "LCM" => Ok(Mode::Lcm),
            "BERN" | "BERNSTEIN" => Ok(Mode::Bern),
            _ => Err(format!("unknown mode '{s}' (expected CM, AM, LCM or BERN)")),
        }
    }
}

/// Sign-test settings.
#[derive(Clone, Debug)]
pub struct SignConfig {
    pub order: usize,
    pub grid_size: usize,
    /// Working precision in bits; `0` means `max(64, 8N)`.
    pub precision: u32,
    /// Absolute floor added to every cell tolerance.
    pub tol: Option<f64>,
    pub grid: GridSpec,
}

impl Default for SignConfig {
    fn default() -> Self {
        SignConfig { order: DEFAULT_ORDER, grid_size: 48, precision: 0, tol: None, grid: GridSpec::default() }
    }
}

impl SignConfig {
    pub fn effective_precision(&self) -> u32 {
        if self.precision == 0 {
            default_precision(self.order)
        } else {
            self.precision
        }
    }
}

/// Extra bits of the second evaluation used to estimate rounding noise.
pub const NOISE_PROBE_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TestError {
    #[error("the interval {0} is empty")]
    EmptyInterval(String),
    #[error("order {0} exceeds the maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("the grid has no points inside {0}")]
    NoGrid(String),
    #[error("{0}")]
    Eval(String),
    #[error("{0}")]
    InvalidArgument(String),
}

/// Margin and tolerance of one `(n, x)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub margin: Real,
    pub tol: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail { n: usize, x: Real, margin: Real, tol: Real },
    Inconclusive { n: usize, x: Real, margin: Real, tol: Real },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail { .. } => "FAIL",
            Verdict::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Clone, Debug)]
pub struct SkippedPoint {
    pub x: Real,
    pub reason: String,
}

/// Result of a sign test: `margins[n][i]` for order `n` at `grid[i]`.
#[derive(Clone, Debug)]
pub struct SignReport {
    pub expr: String,
    pub interval: Interval,
    pub mode: Mode,
    pub order: usize,
    pub precision: u32,
    pub grid: Vec<Real>,
    pub cells: Vec<Vec<Option<Cell>>>,
    pub skipped: Vec<SkippedPoint>,
    pub verdict: Verdict,
}

/// Jet of the function whose derivative signs the mode constrains, plus `f(x)` when it matters.
fn mode_jet(e: &Expr, x: &Real, order: usize, mode: Mode) -> Result<(Jet, Option<Real>), String> {
    match mode {
        Mode::Cm | Mode::Am | Mode::Bern => eval_derivatives(e, x, order).map(|j| (j, None)).map_err(|err| err.to_string()),
        Mode::Lcm => {
            if let ExprKind::Exp(u) = &e.kind {
                let j = eval_derivatives(u, x, order).map_err(|err| err.to_string())?;
                let f0 = j.value().exp();
                return Ok((j, Some(f0)));
            }
            let j = eval_derivatives(e, x, order).map_err(|err| err.to_string())?;
            let f0 = j.value().clone();
            if !f0.is_positive() {
                return Ok((j, Some(f0)));
            }
            let l = j.ln().map_err(|err| err.to_string())?;
            Ok((l, Some(f0)))
        }
    }
}

fn raw_margins(jet: &Jet, f0: &Option<Real>, mode: Mode) -> Vec<Option<Real>> {
    let order = jet.order();
    (0..=order)
        .map(|n| match mode {
            Mode::Cm => {
                let d = jet.derivative(n);
                Some(if n % 2 == 0 { d } else { -d })
            }
            Mode::Am => Some(jet.derivative(n)),
            Mode::Bern => {
                let d = jet.derivative(n);
                Some(if n == 0 || n % 2 == 1 { d } else { -d })
            }
            Mode::Lcm => {
                let f = f0.as_ref().expect("LCM jets carry f(x)");
                if n == 0 {
                    Some(f.clone())
                } else if !f.is_positive() {
                    None
                } else {
                    let d = jet.derivative(n);
                    Some(if n % 2 == 0 { d } else { -d })
                }
            }
        })
        .collect()
}

/// Margins at one point with per-cell tolerances.
///
/// The jet is computed at `prec` and again with [`NOISE_PROBE_BITS`] more;
/// their difference `nu` estimates the rounding error. The tolerance is
/// `2^(-prec/2) * max(|margin|, 2^prec * nu)`, raised to `floor` if given.
pub fn point_cells(e: &Expr, x: &Real, order: usize, mode: Mode, prec: u32, floor: Option<f64>) -> Result<Vec<Option<Cell>>, String> {
    let x1 = x.with_prec(prec);
    let x2 = x.with_prec(prec + NOISE_PROBE_BITS);
    let (j1, f1) = mode_jet(e, &x1, order, mode)?;
    let (j2, f2) = mode_jet(e, &x2, order, mode)?;
    let m1 = raw_margins(&j1, &f1, mode);
    let m2 = raw_margins(&j2, &f2, mode);
    let half = Real::pow2(-(prec as i32) / 2, prec);
    let full = Real::pow2(prec as i32, prec);
    Ok(m1
        .into_iter()
        .zip(m2)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => {
                let nu = (&a.with_prec(prec + NOISE_PROBE_BITS) - &b).abs().with_prec(prec);
                let scale = a.abs().max(&full * &nu);
                let mut tol = &half * &scale;
                if let Some(fl) = floor {
                    tol = tol.max(Real::from_f64(fl, prec));
                }
                Some(Cell { margin: a, tol })
            }
            _ => None,
        })
        .collect())
}

/// Grid sign test of the inequalities of `mode` up to `cfg.order` on `i`.
pub fn sign_test(e: &Expr, i: &Interval, mode: Mode, cfg: &SignConfig) -> Result<SignReport, TestError> {
    if i.is_empty() {
        return Err(TestError::EmptyInterval(i.to_string()));
    }
    if cfg.order > MAX_ORDER {
        return Err(TestError::OrderTooLarge(cfg.order));
    }
    let prec = cfg.effective_precision();
    let spec = GridSpec { size: cfg.grid_size, ..cfg.grid.clone() };
    let grid = build_grid(i, &spec, prec);
    if grid.is_empty() {
        return Err(TestError::NoGrid(i.to_string()));
    }
    let results: Vec<Result<Vec<Option<Cell>>, String>> =
        grid.par_iter().map(|x| point_cells(e, x, cfg.order, mode, prec, cfg.tol)).collect();
    let mut cells: Vec<Vec<Option<Cell>>> = vec![Vec::with_capacity(grid.len()); cfg.order + 1];
    let mut skipped = Vec::new();
    for (x, r) in grid.iter().zip(results) {
        match r {
            Ok(col) => {
                for (n, c) in col.into_iter().enumerate() {
                    cells[n].push(c);
                }
            }
            Err(reason) => {
                skipped.push(SkippedPoint { x: x.clone(), reason });
                for row in cells.iter_mut() {
                    row.push(None);
                }
            }
        }
    }
    let verdict = decide(&grid, &cells);
    Ok(SignReport { expr: print(e), interval: i.clone(), mode, order: cfg.order, precision: prec, grid, cells, skipped, verdict })
}

/// FAIL on the most negative margin below `-tol`; otherwise INCONCLUSIVE if a
/// margin lies in `[-tol, 0)`; otherwise PASS. A test with no evaluated cell
/// is INCONCLUSIVE.
fn decide(grid: &[Real], cells: &[Vec<Option<Cell>>]) -> Verdict {
    let mut worst_fail: Option<(usize, usize)> = None;
    let mut worst_unsure: Option<(usize, usize)> = None;
    let mut any = false;
    for (n, row) in cells.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            let Some(c) = c else { continue };
            any = true;
            if c.margin < -&c.tol {
                let better = worst_fail.map_or(true, |(wn, wi)| c.margin < cells[wn][wi].as_ref().unwrap().margin);
                if better {
                    worst_fail = Some((n, i));
                }
            } else if c.margin.is_negative() && worst_unsure.is_none() {
                worst_unsure = Some((n, i));
            }
        }
    }
    let pick = |(n, i): (usize, usize)| {
        let c = cells[n][i].as_ref().unwrap();
        (n, grid[i].clone(), c.margin.clone(), c.tol.clone())
    };
    if let Some(w) = worst_fail {
        let (n, x, margin, tol) = pick(w);
        return Verdict::Fail { n, x, margin, tol };
    }
    if let Some(w) = worst_unsure {
        let (n, x, margin, tol) = pick(w);
        return Verdict::Inconclusive { n, x, margin, tol };
    }
    if !any {
        let x = grid.first().cloned().unwrap_or_else(|| Real::zero(64));
        let z = Real::zero(x.prec());
        return Verdict::Inconclusive { n: 0, x, margin: z.clone(), tol: z };
    }
    Verdict::Pass
}

/// Smallest margin of a passing report; above the tolerance it indicates strict monotonicity.
pub fn strictness_margins(r: &SignReport) -> Option<Real> {
    if !r.verdict.is_pass() {
        return None;
    }
    r.cells.iter().flatten().flatten().map(|c| c.margin.clone()).reduce(|a, b| a.min(b))
}

const DIGITS: usize = 20;

impl SignReport {
    /// Verdict line such as `FAIL n=1 x=1.5e0 margin=-2.1e-3`.
    pub fn summary(&self) -> String {
        match &self.verdict {
            Verdict::Pass => "PASS".to_string(),
            Verdict::Fail { n, x, margin, tol } | Verdict::Inconclusive { n, x, margin, tol } => format!(
                "{} n={} x={} margin={} tol={}",
                self.verdict.label(),
                n,
                x.to_sci(DIGITS),
                margin.to_sci(DIGITS),
                tol.to_sci(4)
            ),
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::Pass => json!({"status": "PASS"}),
            Verdict::Fail { n, x, margin, tol } | Verdict::Inconclusive { n, x, margin, tol } => json!({
                "status": self.verdict.label(),
                "n": n,
                "x": x.to_sci(DIGITS),
                "margin": margin.to_sci(DIGITS),
                "tol": tol.to_sci(DIGITS),
            }),
        };
        let cells: Vec<Value> = self
            .cells
            .iter()
            .enumerate()
            .flat_map(|(n, row)| {
                row.iter().enumerate().filter_map(move |(i, c)| {
                    c.as_ref().map(|c| json!({"n": n, "i": i, "margin": c.margin.to_sci(DIGITS), "tol": c.tol.to_sci(6)}))
                })
            })
            .collect();
        json!({
            "schema": "sign-report/1",
            "expr": self.expr,
            "interval": self.interval.to_string(),
            "mode": self.mode.to_string(),
            "order": self.order,
            "precision": self.precision,
            "grid": self.grid.iter().map(|x| x.to_sci(DIGITS)).collect::<Vec<_>>(),
            "cells": cells,
            "skipped": self.skipped.iter().map(|s| json!({"x": s.x.to_sci(DIGITS), "reason": s.reason})).collect::<Vec<_>>(),
            "min_margin": strictness_margins(self).map(|m| m.to_sci(DIGITS)),
            "verdict": verdict,
        })
    }

    /// One row per cell: `n,x,margin,tol,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x,margin,tol,status\n");
        for (n, row) in self.cells.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                let x = self.grid[i].to_sci(DIGITS);
                match c {
                    Some(c) => {
                        let status = if c.margin < -&c.tol {
                            "fail"
                        } else if c.margin.is_negative() {
                            "inconclusive"
                        } else {
                            "ok"
                        };
                        out.push_str(&format!("{n},{x},{},{},{status}\n", c.margin.to_sci(DIGITS), c.tol.to_sci(6)));
                    }
                    None => out.push_str(&format!("{n},{x},,,skipped\n")),
                }
            }
        }
        out
    }
}
