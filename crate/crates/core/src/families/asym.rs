use serde::Serialize;

use crate::numkernel::{bernoulli_poly, digamma, polygamma, psi_asymptotic, KernelError, PsiExpansion, Real, ASYMPTOTIC_MIN_X};

/// Truncated large-`x` expansions of the digamma gap.
#[derive(Clone, Debug)]
pub struct PsiGapExpansion {
    /// `(x+a)[psi(x+b) - psi(x+a)] - (b-a)`
    pub gap: Real,
    /// `-(x+a)^2 [psi'(x+b) - psi'(x+a)] + (a-b)`
    pub companion: Real,
}

fn delta_b(k: usize, a: &Real, b: &Real) -> Real {
    if k == 0 {
        return Real::zero(a.prec());
    }
    &bernoulli_poly(k, b) - &bernoulli_poly(k, a)
}

fn alt(m: usize, v: Real) -> Real {
    if m % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Coefficient of `x^-m` in the gap expansion:
/// `(-1)^m [dB_(m+1)/(m+1) - a dB_m/m]` with `dB_j = B_j(b) - B_j(a)`.
pub fn gap_coefficient(m: usize, a: &Real, b: &Real) -> Real {
    let t1 = &delta_b(m + 1, a, b) / (m as i32 + 1);
    let t2 = &(a * &delta_b(m, a, b)) / (m as i32);
    alt(m, &t1 - &t2)
}

/// Coefficient of `x^-m` in the companion expansion:
/// `-[(-1)^(m+1) dB_(m+1) + 2a (-1)^m dB_m + a^2 (-1)^(m-1) dB_(m-1)]`.
pub fn companion_coefficient(m: usize, a: &Real, b: &Real) -> Real {
    let t1 = alt(m + 1, delta_b(m + 1, a, b));
    let t2 = alt(m, &(a * &delta_b(m, a, b)) * 2);
    let t3 = alt(m - 1, &(a * a) * &delta_b(m - 1, a, b));
    -(&(&t1 + &t2) + &t3)
}

/// Both expansions truncated after `depth` terms, at `x >= 10`.
pub fn asym_psi_gap(x: &Real, a: &Real, b: &Real, depth: usize) -> Result<PsiGapExpansion, KernelError> {
    if *x < ASYMPTOTIC_MIN_X {
        return Err(KernelError::Refused { op: "asym_psi_gap", reason: format!("x = {} is below {ASYMPTOTIC_MIN_X}", x.to_sci(10)) });
    }
    if !(1..=3).contains(&depth) {
        return Err(KernelError::InvalidArgument { op: "asym_psi_gap", reason: format!("depth must be 1, 2 or 3, got {depth}") });
    }
    let p = x.prec();
    let (a, b) = (a.with_prec(p), b.with_prec(p));
    let inv = x.recip();
    let mut pw = inv.clone();
    let mut gap = Real::zero(p);
    let mut comp = Real::zero(p);
    for m in 1..=depth {
        gap = &gap + &(&gap_coefficient(m, &a, &b) * &pw);
        comp = &comp + &(&companion_coefficient(m, &a, &b) * &pw);
        pw = &pw * &inv;
    }
    Ok(PsiGapExpansion { gap, companion: comp })
}

/// Truncation error exponent of [`asym_psi_gap`] at the given depth.
pub fn asym_error_exponent(depth: usize) -> i32 {
    -(depth as i32 + 1)
}

/// The two quantities of [`PsiGapExpansion`] computed from the digamma kernel.
pub fn psi_gap_direct(x: &Real, a: &Real, b: &Real) -> Result<PsiGapExpansion, KernelError> {
    let p = x.prec();
    let (a, b) = (a.with_prec(p), b.with_prec(p));
    let xa = x + &a;
    let xb = x + &b;
    let d = &digamma(&xb)? - &digamma(&xa)?;
    let gap = &(&xa * &d) - &(&b - &a);
    let d1 = &polygamma(1, &xb)? - &polygamma(1, &xa)?;
    let companion = &(-&(&(&xa * &xa) * &d1)) + &(&a - &b);
    Ok(PsiGapExpansion { gap, companion })
}

/// Least-squares slope of `log|err|` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, e)| *x > 0.0 && *e > 0.0 && e.is_finite()).map(|(x, e)| (x.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// One fitted error exponent.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub label: String,
    pub expected: i32,
    pub fitted: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

impl SlopeFit {
    pub fn within(&self, tol: f64) -> bool {
        self.fitted.is_some_and(|s| (s - self.expected as f64).abs() <= tol)
    }
}

/// `x` values spread geometrically over `[lo, hi]`.
pub fn geometric_points(lo: f64, hi: f64, count: usize, prec: u32) -> Vec<Real> {
    (0..count)
        .map(|i| {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            Real::from_f64(lo * (hi / lo).powf(t), prec)
        })
        .collect()
}

/// Error slopes of `psi_asymptotic` with `k` terms for `psi^(m)(x + shift)`.
pub fn psi_asymptotic_slope(shift: &Real, k: usize, m: usize, xs: &[Real]) -> Result<SlopeFit, KernelError> {
    let e = PsiExpansion::new(shift, k, m)?;
    let mut samples = Vec::with_capacity(xs.len());
    for x in xs {
        let approx = psi_asymptotic(x, &e)?;
        let exact = polygamma(m, &(x + &shift.with_prec(x.prec())))?;
        samples.push((x.to_f64(), (&approx - &exact).abs().to_f64()));
    }
    Ok(SlopeFit { label: format!("psi_asymptotic k={k} m={m}"), expected: e.error_exponent(), fitted: loglog_slope(&samples), samples })
}

/// Error slopes of [`asym_psi_gap`] (gap and companion) at one depth.
pub fn psi_gap_slopes(a: &Real, b: &Real, depth: usize, xs: &[Real]) -> Result<(SlopeFit, SlopeFit), KernelError> {
    let mut g = Vec::with_capacity(xs.len());
    let mut c = Vec::with_capacity(xs.len());
    for x in xs {
        let approx = asym_psi_gap(x, a, b, depth)?;
        let exact = psi_gap_direct(x, a, b)?;
        g.push((x.to_f64(), (&approx.gap - &exact.gap).abs().to_f64()));
        c.push((x.to_f64(), (&approx.companion - &exact.companion).abs().to_f64()));
    }
    let expected = asym_error_exponent(depth);
    Ok((
        SlopeFit { label: format!("gap depth={depth}"), expected, fitted: loglog_slope(&g), samples: g },
        SlopeFit { label: format!("companion depth={depth}"), expected, fitted: loglog_slope(&c), samples: c },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(v: f64) -> Real {
        Real::from_f64(v, P)
    }

    #[test]
    fn closed_form_coefficients() {
        for (a, b) in [(0.0, 0.5), (0.3, 0.9), (1.25, 1.5)] {
            let (ar, br) = (r(a), r(b));
            let q1 = (b - a) * (a - b + 1.0) / 2.0;
            let q2 = (a - b) * (1.0 + a - b) * (-1.0 + a + 2.0 * b) / 6.0;
            assert!((gap_coefficient(1, &ar, &br).to_f64() - q1).abs() < 1e-15);
            assert!((gap_coefficient(2, &ar, &br).to_f64() - q2).abs() < 1e-15);
            // the companion is the negated (x+a)^2 [psi'(x+b) - psi'(x+a)] expansion shifted by a - b
            let r1 = (b - a) * (1.0 + a - b);
            let r2 = -(b - a) * (1.0 + a - b) * (-1.0 + 2.0 * b) / 2.0;
            assert!((companion_coefficient(1, &ar, &br).to_f64() - r1).abs() < 1e-15);
            assert!((companion_coefficient(2, &ar, &br).to_f64() - r2).abs() < 1e-15);
        }
    }

    #[test]
    fn leading_term_example() {
        let e = asym_psi_gap(&r(100.0), &r(0.0), &r(0.5), 1).unwrap();
        assert!((e.gap.to_f64() - 1.25e-3).abs() < 1e-15);
        let d = psi_gap_direct(&r(100.0), &r(0.0), &r(0.5)).unwrap();
        assert!((&e.gap - &d.gap).abs().to_f64() < 1e-5);
        let z = asym_psi_gap(&r(50.0), &r(0.7), &r(0.7), 3).unwrap();
        assert!(z.gap.is_zero() && z.companion.is_zero());
    }

    #[test]
    fn refusals() {
        assert!(asym_psi_gap(&r(9.5), &r(0.0), &r(0.5), 1).is_err());
        assert!(asym_psi_gap(&r(20.0), &r(0.0), &r(0.5), 4).is_err());
        assert!(asym_psi_gap(&r(20.0), &r(0.0), &r(0.5), 0).is_err());
    }

    #[test]
    fn slopes() {
        let xs = geometric_points(1e2, 1e5, 7, P);
        for depth in 1..=3 {
            let (g, c) = psi_gap_slopes(&r(0.0), &r(0.9), depth, &xs).unwrap();
            assert!(g.within(0.2), "{:?}", g.fitted);
            assert!(c.within(0.2), "{:?}", c.fitted);
        }
        assert!((loglog_slope(&[(1.0, 1.0), (10.0, 0.01)]).unwrap() + 2.0).abs() < 1e-12);
    }
}
