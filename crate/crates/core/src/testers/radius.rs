use serde_json::{json, Value};

use super::sign::TestError;
use crate::exprlang::Expr;
use crate::numkernel::Real;
use crate::taylor::{eval_derivatives, Jet, MAX_ORDER};

/// Accepted shortfall of the estimated radius relative to `x0 - a`.
pub const RADIUS_SLACK: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl RadiusStatus {
    pub fn label(self) -> &'static str {
        match self {
            RadiusStatus::Pass => "PASS",
            RadiusStatus::Fail => "FAIL",
            RadiusStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub center: Real,
    pub n_coeffs: usize,
    /// `None` when the tail ratios tend to zero (no finite singularity seen).
    pub rho_hat: Option<f64>,
    pub rho_min: f64,
    pub status: RadiusStatus,
    pub note: String,
}

impl RadiusEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "center": self.center.to_sci(20),
            "n_coeffs": self.n_coeffs,
            "rho_hat": self.rho_hat.map_or("inf".to_string(), |r| format!("{r:.6e}")),
            "rho_min": self.rho_min,
            "status": self.status.label(),
            "note": self.note,
        })
    }
}

/// Ratios `|c_k / c_(k-1)|` over the last `ceil(N/2)` coefficients as `(1/k, ratio)`.
fn tail_ratios(j: &Jet, n: usize) -> Option<Vec<(f64, f64)>> {
    let start = n + 1 - n.div_ceil(2);
    (start.max(1)..=n)
        .map(|k| {
            let prev = j.coeff(k - 1);
            if prev.is_zero() || j.coeff(k).is_zero() {
                return None;
            }
            Some((1.0 / k as f64, (j.coeff(k) / prev).abs().to_f64()))
        })
        .collect()
}

/// Least-squares intercept of `ratio` against `1/k` (Domb-Sykes).
fn intercept(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return my;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    my - sxy / sxx * mx
}

/// Real-axis estimate of the Taylor radius of `e` at `x0`, compared with `x0 - a`.
///
/// Tail coefficients are computed at `prec` and `prec + 32` bits; any
/// disagreement beyond `2^(-prec/2)` relative, or a vanishing coefficient,
/// makes the estimate INCONCLUSIVE.
pub fn radius_probe(e: &Expr, x0: &Real, a: &Real, n: usize, prec: u32) -> Result<RadiusEstimate, TestError> {
    if n < 8 || n > MAX_ORDER {
        return Err(TestError::InvalidArgument(format!("coefficient count must be in 8..={MAX_ORDER}, got {n}")));
    }
    if x0 <= a {
        return Err(TestError::InvalidArgument("x0 must exceed the left endpoint".into()));
    }
    let rho_min = (x0 - a).to_f64();
    let j1 = eval_derivatives(e, &x0.with_prec(prec), n).map_err(|err| TestError::Eval(err.to_string()))?;
    let j2 = eval_derivatives(e, &x0.with_prec(prec + 32), n).map_err(|err| TestError::Eval(err.to_string()))?;
    let floor = Real::pow2(-(prec as i32) / 2, prec);
    let noisy = (0..=n).any(|k| {
        let (c1, c2) = (j1.coeff(k), j2.coeff(k));
        (c1 - c2).abs() > &floor * &c1.abs().max(c2.abs()) && !(c1.is_zero() && c2.is_zero())
    });
    let inconclusive = |note: &str| RadiusEstimate {
        center: x0.clone(),
        n_coeffs: n,
        rho_hat: None,
        rho_min,
        status: RadiusStatus::Inconclusive,
        note: note.to_string(),
    };
    if noisy {
        return Ok(inconclusive("tail coefficients below the noise floor"));
    }
    let Some(pts) = tail_ratios(&j2, n) else {
        return Ok(inconclusive("a tail coefficient vanishes"));
    };
    let c = intercept(&pts);
    let rho_hat = (c > 0.0 && (1.0 / c).is_finite()).then(|| 1.0 / c);
    let ok = rho_hat.map_or(true, |r| r >= rho_min * (1.0 - RADIUS_SLACK));
    Ok(RadiusEstimate {
        center: x0.clone(),
        n_coeffs: n,
        rho_hat,
        rho_min,
        status: if ok { RadiusStatus::Pass } else { RadiusStatus::Fail },
        note: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse_expr;

    fn probe(src: &str, x0: f64, a: f64) -> RadiusEstimate {
        let p = 128;
        radius_probe(&parse_expr(src).unwrap(), &Real::from_f64(x0, p), &Real::from_f64(a, p), 16, p).unwrap()
    }

    #[test]
    fn examples() {
        let r = probe("1/x", 1.0, 0.0);
        assert!((r.rho_hat.unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(r.status, RadiusStatus::Pass);
        let r = probe("1/(x-1)", 3.0, 1.0);
        assert!((r.rho_hat.unwrap() - 2.0).abs() < 1e-6);
        let r = probe("exp(-x)", 1.0, 0.0);
        assert!(r.rho_hat.map_or(true, |v| v > 1e3));
        assert_eq!(r.status, RadiusStatus::Pass);
    }

    #[test]
    fn pole_closer_than_endpoint_fails() {
        // 1/(x^2 + 1) has poles at +-i, distance sqrt(5) from x0 = 2 but x0 - a = 10
        let r = probe("1/(x^2 + 1)", 2.0, -8.0);
        assert_eq!(r.status, RadiusStatus::Fail);
        assert!(radius_probe(&parse_expr("1/x").unwrap(), &Real::one(64), &Real::zero(64), 4, 64).is_err());
    }

    #[test]
    fn polynomial_is_inconclusive() {
        assert_eq!(probe("x^2 + 1", 1.0, 0.0).status, RadiusStatus::Inconclusive);
    }
}
