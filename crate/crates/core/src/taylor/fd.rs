use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Rational;

use super::eval::{eval_value, EvalError};
use crate::exprlang::{print, Expr};
use crate::numkernel::Real;

/// Finite-difference estimate of a derivative with an error heuristic.
#[derive(Clone, Debug)]
pub struct FdEstimate {
    pub value: Real,
    pub error: Real,
    pub step: Real,
    pub precision: u32,
}

/// Largest derivative order the oracle accepts.
pub const FD_MAX_ORDER: usize = 12;

type WeightCache = Mutex<HashMap<(usize, usize), Arc<Vec<Rational>>>>;

fn cache() -> &'static WeightCache {
    static C: OnceLock<WeightCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Exact weights `w_k`, `k = -r..=r`, with `f^(n)(0) ~ sum w_k f(k)` (unit step), by Fornberg's recursion.
pub fn central_weights(n: usize, r: usize) -> Arc<Vec<Rational>> {
    if let Some(w) = cache().lock().unwrap().get(&(n, r)) {
        return w.clone();
    }
    let nodes: Vec<Rational> = (-(r as i64)..=r as i64).map(Rational::from).collect();
    let m = nodes.len();
    let mut c = vec![vec![Rational::new(); n + 1]; m];
    c[0][0] = Rational::from(1);
    let mut c1 = Rational::from(1);
    let mut c4 = nodes[0].clone();
    for i in 1..m {
        let mn = i.min(n);
        let mut c2 = Rational::from(1);
        let c5 = c4.clone();
        c4 = nodes[i].clone();
        for j in 0..i {
            let c3 = Rational::from(&nodes[i] - &nodes[j]);
            c2 *= &c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let t = Rational::from(&c[i - 1][k - 1] * k as u32) - Rational::from(&c5 * &c[i - 1][k]);
                    c[i][k] = Rational::from(&c1 * &t) / &c2;
                }
                c[i][0] = -Rational::from(&c1 * &c5) * &c[i - 1][0] / &c2;
            }
            for k in (1..=mn).rev() {
                let t = Rational::from(&c4 * &c[j][k]) - Rational::from(&c[j][k - 1] * k as u32);
                c[j][k] = t / &c3;
            }
            c[j][0] = Rational::from(&c4 * &c[j][0]) / &c3;
        }
        c1 = c2;
    }
    let w = Arc::new(c.into_iter().map(|row| row[n].clone()).collect::<Vec<_>>());
    cache().lock().unwrap().insert((n, r), w.clone());
    w
}

/// Central finite-difference estimate of `e^(n)(x)`, independent of the jet engine.
///
/// Values are computed at `max(p_hi, 4P)` bits where `P` is the precision of
/// `x`; the step is `h = 2^-ceil(P/(n+2))` and the stencil radius `n + 2`, so
/// the truncation error is `O(h^(n+5))`. The error estimate is the change
/// when the outermost stencil points are dropped, plus a rounding bound.
pub fn fd_oracle(e: &Expr, x: &Real, n: usize, p_hi: u32) -> Result<FdEstimate, EvalError> {
    if n > FD_MAX_ORDER {
        return Err(EvalError { subexpr: print(e), cause: format!("finite-difference order {n} exceeds {FD_MAX_ORDER}") });
    }
    let p = x.prec();
    let wp = p_hi.max(4 * p);
    let shift = p.div_ceil(n as u32 + 2) as i32;
    let h = Real::pow2(-shift, wp);
    let r = n + 2;
    let xw = x.with_prec(wp);
    let lo = &xw - &(&h * r as i32);
    let hi = &xw + &(&h * r as i32);
    if !e.domain.contains_real(&lo) || !e.domain.contains_real(&hi) {
        return Err(EvalError {
            subexpr: print(e),
            cause: format!("stencil [{}, {}] leaves the domain {}", lo.to_sci(8), hi.to_sci(8), e.domain),
        });
    }
    let mut values = Vec::with_capacity(2 * r + 1);
    for k in -(r as i64)..=r as i64 {
        let xk = &xw + &(&h * k as i32);
        values.push(eval_value(e, &xk)?);
    }
    let hn = Real::pow2(-shift * n as i32, wp);
    let combine = |rad: usize| -> (Real, Real) {
        let w = central_weights(n, rad);
        let off = r - rad;
        let mut s = Real::zero(wp);
        let mut mag = Real::zero(wp);
        for (k, wk) in w.iter().enumerate() {
            let wr = Real::from_rational(wk, wp);
            let t = &wr * &values[off + k];
            mag = &mag + &t.abs();
            s = &s + &t;
        }
        (&s / &hn, &mag / &hn)
    };
    let (d, mag) = combine(r);
    let (d_prev, _) = combine(r - 1);
    let round = &mag * &Real::pow2(8 - wp as i32, wp);
    let error = &(&d - &d_prev).abs() + &round;
    Ok(FdEstimate { value: d.with_prec(p), error: error.with_prec(p), step: h.with_prec(p), precision: wp })
}
