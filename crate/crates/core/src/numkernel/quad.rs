use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::real::{Real, GUARD_BITS};
use super::KernelError;

const GL_POINTS: usize = 20;
const MAX_DEPTH: u32 = 48;

type Rule = Arc<Vec<(Real, Real)>>;

/// Gauss-Legendre nodes and weights on `[-1, 1]` at `prec` bits, cached.
fn gauss_legendre(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("quadrature cache poisoned").get(&(n, prec)) {
        return r.clone();
    }
    let mut rule = Vec::with_capacity(n);
    let eps = Real::pow2(-(prec as i32) + 4, prec);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Real::from_f64(guess, prec);
        let mut dp = Real::zero(prec);
        for _ in 0..100 {
            let (p, d) = legendre(n, &x);
            let step = &p / &d;
            x = &x - &step;
            dp = d;
            if step.abs() < eps {
                let (_, d) = legendre(n, &x);
                dp = d;
                break;
            }
        }
        let one_minus = &Real::one(prec) - &(&x * &x);
        let w = &Real::from_i64(2, prec) / &(&one_minus * &(&dp * &dp));
        rule.push((x, w));
    }
    let rule = Arc::new(rule);
    cache.lock().expect("quadrature cache poisoned").insert((n, prec), rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p0 = Real::one(prec);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as i32;
        let p2 = &(&(&(x * &p1) * (2 * k - 1)) - &(&p0 * (k - 1))) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = &(&(x * &p1) - &p0) * (n as i32) / &(&(x * x) - 1);
    (p1, d)
}

fn panel<F: Fn(&Real) -> Real>(f: &F, lo: &Real, hi: &Real, rule: &Rule) -> Real {
    let half = (hi - lo).ldexp(-1);
    let mid = &(hi + lo).ldexp(-1);
    let mut acc = Real::zero(lo.prec());
    for (x, w) in rule.iter() {
        acc = &acc + &(w * &f(&(mid + &(&half * x))));
    }
    &acc * &half
}

fn adaptive<F: Fn(&Real) -> Real>(
    f: &F,
    lo: &Real,
    hi: &Real,
    whole: Real,
    tol: &Real,
    rule: &Rule,
    depth: u32,
) -> Result<Real, KernelError> {
    let mid = (lo + hi).ldexp(-1);
    let left = panel(f, lo, &mid, rule);
    let right = panel(f, &mid, hi, rule);
    let split = &left + &right;
    if (&split - &whole).abs() <= *tol {
        return Ok(split);
    }
    if depth >= MAX_DEPTH {
        return Err(KernelError::Domain { op: "frullani_quad", reason: "adaptive quadrature did not converge".into() });
    }
    let half_tol = tol.ldexp(-1);
    let l = adaptive(f, lo, &mid, left, &half_tol, rule, depth + 1)?;
    let r = adaptive(f, &mid, hi, right, &half_tol, rule, depth + 1)?;
    Ok(&l + &r)
}

/// `int_0^inf (exp(-(s+B)t) - exp(-(s+A)t)) / t dt` to absolute error `tol`.
pub fn frullani_quad(s: &Real, a: &Real, b: &Real, tol: &Real) -> Result<Real, KernelError> {
    if !tol.is_positive() {
        return Err(KernelError::InvalidArgument { op: "frullani_quad", reason: "tol must be positive".into() });
    }
    let p_out = s.prec().max(a.prec()).max(b.prec());
    let tol_bits = (-tol.ln().to_f64() / std::f64::consts::LN_2).max(0.0) as u32;
    let wp = p_out.max(tol_bits + 8) + 2 * GUARD_BITS;
    let ca = &s.with_prec(wp) + &a.with_prec(wp);
    let cb = &s.with_prec(wp) + &b.with_prec(wp);
    if !ca.is_positive() || !cb.is_positive() {
        return Err(KernelError::Domain {
            op: "frullani_quad",
            reason: "integral diverges unless s + A > 0 and s + B > 0".into(),
        });
    }
    if a == b {
        return Ok(Real::zero(p_out));
    }
    let diff = &ca - &cb;
    let c = ca.clone().min(cb.clone()).to_f64();
    // tail bound 2 exp(-cT)/(cT) <= tol/2
    let ln_half_tol = tol.ln().to_f64() - std::f64::consts::LN_2;
    let mut t_end = 1.0 / c;
    while -c * t_end - (c * t_end).ln() + std::f64::consts::LN_2 > ln_half_tol {
        t_end *= 2.0;
    }
    // (e^{-cb t} - e^{-ca t})/t = -e^{-cb t} expm1(-(ca-cb) t)/t
    let integrand = |t: &Real| -> Real {
        let e = (&(-&cb) * t).exp();
        let m = (&(-&diff) * t).exp_m1();
        &(-(&e * &m)) / t
    };
    let rule = gauss_legendre(GL_POINTS, wp);
    let hi = Real::from_f64(t_end, wp);
    let mut total = Real::zero(wp);
    // split [0, T] geometrically so the decay scale is resolved from the start
    let mut edges = vec![Real::zero(wp)];
    let mut e = 1.0 / (ca.clone().max(cb.clone()).to_f64());
    while e < t_end {
        edges.push(Real::from_f64(e, wp));
        e *= 4.0;
    }
    edges.push(hi);
    let pieces = (edges.len() - 1) as i32;
    let piece_tol = &tol.with_prec(wp).ldexp(-1) / pieces;
    for w in edges.windows(2) {
        let whole = panel(&integrand, &w[0], &w[1], &rule);
        total = &total + &adaptive(&integrand, &w[0], &w[1], whole, &piece_tol, &rule, 0)?;
    }
    Ok(total.with_prec(p_out))
}
