use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::grid::{build_grid, GridSpec};
use super::sign::{point_cells, Mode};
use crate::exprlang::Interval;
use crate::numkernel::Real;
use crate::taylor::default_precision;

#[derive(Clone, Debug)]
pub struct WitnessConfig {
    pub order: usize,
    /// Maximum number of sample points (each point is one jet evaluation pair).
    pub budget: usize,
    /// `0` means `max(64, 8N)`.
    pub precision: u32,
    pub seed: u64,
    pub mode: Mode,
    /// Reach of the random phase from a finite endpoint on unbounded intervals.
    pub span: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { order: 12, budget: 400, precision: 0, seed: 0, mode: Mode::Cm, span: 1e5 }
    }
}

/// A violation `margin < -tol` at `(order, x)`, confirmed at twice the precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub order: usize,
    pub x: Real,
    pub margin: Real,
    pub tol: Real,
    pub precision: u32,
    pub confirm_margin: Real,
    pub confirm_precision: u32,
}

impl Witness {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.order,
            "x": self.x.to_sci(20),
            "margin": self.margin.to_sci(20),
            "tol": self.tol.to_sci(6),
            "precision": self.precision,
            "confirm_margin": self.confirm_margin.to_sci(20),
            "confirm_precision": self.confirm_precision,
        })
    }
}

fn worst_violation(e: &crate::exprlang::Expr, x: &Real, cfg: &WitnessConfig, prec: u32) -> Option<(usize, Real, Real)> {
    let cells = point_cells(e, x, cfg.order, cfg.mode, prec, None).ok()?;
    cells
        .into_iter()
        .enumerate()
        .filter_map(|(n, c)| c.map(|c| (n, c)))
        .filter(|(_, c)| c.margin < -&c.tol)
        .min_by(|a, b| a.1.margin.partial_cmp(&b.1.margin).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(n, c)| (n, c.margin, c.tol))
}

fn confirm(e: &crate::exprlang::Expr, x: &Real, n: usize, cfg: &WitnessConfig, prec: u32) -> Option<Real> {
    let p2 = 2 * prec;
    let cells = point_cells(e, &x.with_prec(p2), cfg.order, cfg.mode, p2, None).ok()?;
    let c = cells.get(n)?.as_ref()?;
    (c.margin < -&c.tol).then(|| c.margin.clone())
}

/// Random point inside `i`: log-uniform offset from the finite endpoint, or
/// uniform on a bounded interval's interior when both ends are finite.
fn random_point(i: &Interval, rng: &mut ChaCha8Rng, span: f64, prec: u32) -> Option<Real> {
    let lo = i.lo_real(prec);
    let hi = i.hi_real(prec);
    let len = i.length().map(|l| l.to_f64());
    let draw_offset = |rng: &mut ChaCha8Rng, reach: f64| {
        let lo_t = (reach * 2f64.powi(-30)).max(f64::MIN_POSITIVE).ln();
        (lo_t + rng.gen::<f64>() * (reach.ln() - lo_t)).exp()
    };
    let x = match (lo, hi) {
        (Some(l), Some(_)) => {
            let len = len?;
            let t = if rng.gen_bool(0.5) { draw_offset(rng, len) } else { rng.gen::<f64>() * len };
            &l + &Real::from_f64(t, prec)
        }
        (Some(l), None) => &l + &Real::from_f64(draw_offset(rng, span), prec),
        (None, Some(h)) => &h - &Real::from_f64(draw_offset(rng, span), prec),
        (None, None) => {
            let t = draw_offset(rng, span);
            Real::from_f64(if rng.gen_bool(0.5) { t } else { -t }, prec)
        }
    };
    i.contains_real(&x).then_some(x)
}

/// Search for a confirmed violation of the `cfg.mode` inequalities on `i`.
///
/// A default grid is tried first, then seeded random points until the budget
/// is spent. `None` is not a proof of monotonicity.
pub fn witness_search(e: &crate::exprlang::Expr, i: &Interval, cfg: &WitnessConfig) -> Option<Witness> {
    if i.is_empty() || cfg.budget == 0 {
        return None;
    }
    let prec = if cfg.precision == 0 { default_precision(cfg.order) } else { cfg.precision };
    let grid_size = (cfg.budget / 2).clamp(1, 64);
    let grid = build_grid(i, &GridSpec { size: grid_size, span: cfg.span, ..GridSpec::default() }, prec);
    let mut spent = 0usize;
    let try_point = |x: &Real| -> Option<Witness> {
        let (n, margin, tol) = worst_violation(e, x, cfg, prec)?;
        let confirm_margin = confirm(e, x, n, cfg, prec)?;
        Some(Witness { order: n, x: x.clone(), margin, tol, precision: prec, confirm_margin, confirm_precision: 2 * prec })
    };
    // grid phase: pick the most negative confirmed cell among the grid points
    let mut best: Option<Witness> = None;
    for x in grid.iter().take(cfg.budget) {
        spent += 1;
        if let Some(w) = try_point(x) {
            if best.as_ref().map_or(true, |b| w.margin < b.margin) {
                best = Some(w);
            }
        }
    }
    if best.is_some() {
        return best;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut misses = 0;
    while spent < cfg.budget && misses < 4 * cfg.budget {
        let Some(x) = random_point(i, &mut rng, cfg.span, prec) else {
            misses += 1;
            continue;
        };
        spent += 1;
        if let Some(w) = try_point(&x) {
            return Some(w);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;
    use rug::Rational;

    fn search(src: &str, i: &Interval, n: usize) -> Option<Witness> {
        let cfg = WitnessConfig { order: n, budget: 200, precision: 128, ..WitnessConfig::default() };
        witness_search(&parse_expr(src).unwrap(), i, &cfg)
    }

    #[test]
    fn examples() {
        let w = search("loggamma(2x+1) - loggamma(x+1)", &Interval::above(Rational::from(1)), 12).unwrap();
        assert!(w.order % 2 == 1 || w.order == 0);
        assert!(w.confirm_margin.is_negative());
        assert!(search("exp(-x)", &Interval::positive(), 12).is_none());
        let w = search("-x", &Interval::open(Some(Rational::new()), Some(Rational::from(1))), 0).unwrap();
        assert_eq!(w.order, 0);
        assert!(w.margin < -&w.tol);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let e = parse_expr("sin(x) + 2").unwrap();
        let cfg = WitnessConfig { order: 3, budget: 30, precision: 96, seed: 7, ..WitnessConfig::default() };
        let a = witness_search(&e, &Interval::positive(), &cfg);
        let b = witness_search(&e, &Interval::positive(), &cfg);
        assert_eq!(a, b);
        assert!(a.is_some());
    }
}
