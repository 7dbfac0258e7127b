use crate::exprlang::Interval;
use crate::numkernel::Real;

/// Sample-point layout for sign tests.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    /// Number of geometric points.
    pub size: usize,
    /// Offset of the first point from the finite endpoint; default `(len or 1) * 2^-10`.
    pub delta: Option<f64>,
    /// Reach of the grid from a finite endpoint when the other end is infinite.
    pub span: f64,
    /// Add the points `endpoint + 10^k`, `k = -2..=5`, that fall inside.
    pub decades: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { size: 48, delta: None, span: 1e5, decades: true }
    }
}

impl GridSpec {
    pub fn with_size(size: usize) -> GridSpec {
        GridSpec { size, ..GridSpec::default() }
    }
}

/// Geometric offsets `delta * (reach/delta)^(i/(n-1))`.
fn offsets(delta: f64, reach: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![];
    }
    if n == 1 || reach <= delta {
        return vec![delta];
    }
    (0..n).map(|i| delta * (reach / delta).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Points strictly inside `i`, clustered toward the finite (left) endpoint, ascending.
pub fn build_grid(i: &Interval, spec: &GridSpec, prec: u32) -> Vec<Real> {
    let mut pts: Vec<Real> = Vec::new();
    let len = i.length().map(|l| l.to_f64());
    let delta = spec.delta.unwrap_or(len.unwrap_or(1.0).min(1.0) * (2f64).powi(-10));
    match (i.lo_real(prec), i.hi_real(prec)) {
        (Some(lo), hi) => {
            let reach = match len {
                Some(l) => l * (1.0 - (2f64).powi(-10)),
                None => spec.span,
            };
            let mut offs = offsets(delta, reach, spec.size);
            if spec.decades {
                offs.extend((-2..=5).map(|k| 10f64.powi(k)));
            }
            for t in offs {
                let x = &lo + &Real::from_f64(t, prec);
                let inside = match &hi {
                    Some(h) => x < *h,
                    None => true,
                };
                if inside && i.contains_real(&x) {
                    pts.push(x);
                }
            }
        }
        (None, Some(hi)) => {
            let mut offs = offsets(delta, spec.span, spec.size);
            if spec.decades {
                offs.extend((-2..=5).map(|k| 10f64.powi(k)));
            }
            for t in offs {
                let x = &hi - &Real::from_f64(t, prec);
                if i.contains_real(&x) {
                    pts.push(x);
                }
            }
        }
        (None, None) => {
            let half = offsets(delta, spec.span, spec.size.div_ceil(2));
            pts.push(Real::zero(prec));
            for t in half {
                pts.push(Real::from_f64(t, prec));
                pts.push(Real::from_f64(-t, prec));
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup_by(|a, b| a == b);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn layout() {
        let g = build_grid(&Interval::positive(), &GridSpec::default(), 64);
        assert!(g.len() >= 48 && g.len() <= 56);
        assert!((g[0].to_f64() - 2f64.powi(-10)).abs() < 1e-18);
        assert!((g.last().unwrap().to_f64() - 1e5).abs() < 1e-6);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let fin = Interval::open(Some(Rational::from(1)), Some(Rational::from(3)));
        let g = build_grid(&fin, &GridSpec::default(), 64);
        assert!(g.iter().all(|x| fin.contains_real(x)));
        assert!((g[0].to_f64() - (1.0 + 2f64.powi(-10))).abs() < 1e-15);
        let g = build_grid(&Interval::real_line(), &GridSpec::with_size(10), 64);
        assert_eq!(g.len(), 11);
    }
}
