use rug::float::Constant;
use rug::Float;

use super::bernoulli::bernoulli_number;
use super::real::{Real, GUARD_BITS, MIN_PRECISION};
use super::KernelError;

/// Most negative argument accepted by the recurrence-based functions.
const MAX_LIFT: f64 = 1.0e7;

/// Euler's constant to `prec` bits (values below 16 are raised to 16).
pub fn euler_gamma(prec: u32) -> Real {
    Real::from_float(Float::with_val(prec.max(MIN_PRECISION), Constant::Euler))
}

fn working_prec(x: &Real) -> u32 {
    x.prec() + 2 * GUARD_BITS
}

/// Lower bound for the argument where the asymptotic series takes over.
fn threshold(prec: u32, order: usize) -> f64 {
    (10.0f64).max(prec as f64 / 4.0).max(order as f64)
}

fn lift_count(x: &Real, t: f64) -> Result<u64, KernelError> {
    let xf = x.to_f64();
    if xf >= t {
        return Ok(0);
    }
    let need = (t - xf).ceil();
    if !need.is_finite() || need > MAX_LIFT {
        return Err(KernelError::Domain {
            op: "recurrence",
            reason: format!("argument {} too far below the asymptotic region", x.to_sci(10)),
        });
    }
    Ok(need as u64)
}

fn is_nonpositive_integer(x: &Real) -> bool {
    !x.is_positive() && x.as_float().is_integer()
}

/// `log Gamma(x)` for `x > 0`, relative error at most `2^-(P-16)` away from the
/// zeros at 1 and 2 (where the error is absolute).
pub fn log_gamma(x: &Real) -> Result<Real, KernelError> {
    if !x.is_finite() || !x.is_positive() {
        return Err(KernelError::Domain {
            op: "log_gamma",
            reason: format!("requires x > 0, got {}", x.to_sci(10)),
        });
    }
    let p = x.prec();
    if *x == 1 || *x == 2 {
        return Ok(Real::zero(p));
    }
    let wp = working_prec(x);
    let mut t = threshold(p, 0);
    loop {
        if let Some(v) = log_gamma_attempt(x, wp, t)? {
            return Ok(v.with_prec(p));
        }
        t *= 2.0;
    }
}

fn log_gamma_attempt(x: &Real, wp: u32, t: f64) -> Result<Option<Real>, KernelError> {
    let xw = x.with_prec(wp);
    let lift = lift_count(&xw, t)?;
    let mut prod = Real::one(wp);
    let mut y = xw.clone();
    for _ in 0..lift {
        prod = &prod * &y;
        y = &y + 1;
    }
    let half = Real::from_f64(0.5, wp);
    let two_pi = Real::pi(wp).ldexp(1);
    let mut sum = &(&(&y - &half) * &y.ln()) - &y;
    sum = &sum + &(&two_pi.ln() * &half);
    let inv_y = y.recip();
    let inv_y2 = &inv_y * &inv_y;
    let mut ypow = inv_y.clone();
    let eps = Real::pow2(-(wp as i32), wp);
    let scale = sum.abs().max(Real::one(wp));
    let mut prev: Option<Real> = None;
    for k in 1.. {
        let b = Real::from_rational(&bernoulli_number(2 * k), wp);
        let term = &(&b * &ypow) / ((2 * k * (2 * k - 1)) as i32);
        let mag = term.abs();
        if let Some(pm) = &prev {
            if mag > *pm {
                return Ok(None);
            }
        }
        sum = &sum + &term;
        if mag < &eps * &scale {
            break;
        }
        prev = Some(mag);
        ypow = &ypow * &inv_y2;
        if k > 4 * wp as usize {
            return Ok(None);
        }
    }
    Ok(Some(&sum - &prod.ln()))
}

/// Digamma `psi(x)` for `x` not a non-positive integer.
pub fn digamma(x: &Real) -> Result<Real, KernelError> {
    Ok(polygamma_tower(x, 0)?.swap_remove(0))
}

/// Polygamma `psi^(m)(x)`; `m = 0` is the digamma function.
pub fn polygamma(m: usize, x: &Real) -> Result<Real, KernelError> {
    Ok(polygamma_tower(x, m)?.swap_remove(m))
}

/// `[psi(x), psi'(x), ..., psi^(mmax)(x)]` sharing one recurrence lift.
pub fn polygamma_tower(x: &Real, mmax: usize) -> Result<Vec<Real>, KernelError> {
    if !x.is_finite() {
        return Err(KernelError::Domain { op: "polygamma", reason: "non-finite argument".into() });
    }
    if is_nonpositive_integer(x) {
        return Err(KernelError::Domain {
            op: "polygamma",
            reason: format!("pole at x = {}", x.to_sci(10)),
        });
    }
    let p = x.prec();
    let wp = working_prec(x) + (mmax as u32).min(64);
    let mut t = threshold(p, mmax);
    loop {
        if let Some(v) = polygamma_attempt(x, mmax, wp, t)? {
            return Ok(v.into_iter().map(|r| r.with_prec(p)).collect());
        }
        t *= 2.0;
    }
}

fn polygamma_attempt(x: &Real, mmax: usize, wp: u32, t: f64) -> Result<Option<Vec<Real>>, KernelError> {
    let xw = x.with_prec(wp);
    let lift = lift_count(&xw, t)?;
    let mut sums: Vec<Real> = (0..=mmax).map(|_| Real::zero(wp)).collect();
    let mut y = xw.clone();
    for _ in 0..lift {
        let r = y.recip();
        let mut pw = r.clone();
        sums[0] = &sums[0] + &pw;
        for s in sums.iter_mut().skip(1) {
            pw = &pw * &r;
            *s = &*s + &pw;
        }
        y = &y + 1;
    }
    let eps = Real::pow2(-(wp as i32), wp);
    let inv_y = y.recip();
    let inv_y2 = &inv_y * &inv_y;
    let mut bern = LazyBernoulli::new(wp);
    let mut out = Vec::with_capacity(mmax + 1);

    // m = 0
    {
        let mut sum = &y.ln() - &inv_y.ldexp(-1);
        let scale = sum.abs().max(Real::one(wp));
        let mut ypow = inv_y2.clone();
        let mut prev: Option<Real> = None;
        let mut converged = false;
        for k in 1..=4 * wp as usize {
            let term = &(bern.get(k) * &ypow) / (2 * k as i32);
            let mag = term.abs();
            if prev.as_ref().is_some_and(|pm| mag > *pm) {
                return Ok(None);
            }
            sum = &sum - &term;
            if mag < &eps * &scale {
                converged = true;
                break;
            }
            prev = Some(mag);
            ypow = &ypow * &inv_y2;
        }
        if !converged {
            return Ok(None);
        }
        out.push(&sum - &sums[0]);
    }

    // m >= 1
    let mut fact_m_minus_1 = Real::one(wp);
    let mut ym = Real::one(wp);
    for m in 1..=mmax {
        if m > 1 {
            fact_m_minus_1 = &fact_m_minus_1 * ((m - 1) as i32);
        }
        ym = &ym * &inv_y;
        let lead = &fact_m_minus_1 * &ym;
        let fact_m = &fact_m_minus_1 * (m as i32);
        let mut sum = &lead + &(&(&fact_m * &ym) * &inv_y).ldexp(-1);
        // r_k = (2k+m-1)!/(2k)! / y^(2k+m)
        let mut r = &(&(&fact_m * (m as i32 + 1)) * &ym) * &inv_y2;
        r = r.ldexp(-1);
        let mut prev: Option<Real> = None;
        let mut converged = false;
        for k in 1..=4 * wp as i32 {
            let term = bern.get(k as usize) * &r;
            let mag = term.abs();
            if prev.as_ref().is_some_and(|pm| mag > *pm) {
                return Ok(None);
            }
            sum = &sum + &term;
            if mag < &eps * &lead {
                converged = true;
                break;
            }
            prev = Some(mag);
            let num = (2 * k + m as i32) * (2 * k + m as i32 + 1);
            let den = (2 * k + 1) * (2 * k + 2);
            r = &(&(&r * &inv_y2) * num) / den;
        }
        if !converged {
            return Ok(None);
        }
        // psi^(m)(x) = psi^(m)(y) + (-1)^(m+1) m! sum_j (x+j)^-(m+1)
        let total = &sum + &(&fact_m * &sums[m]);
        out.push(if m % 2 == 1 { total } else { -total });
    }
    Ok(Some(out))
}

/// `B_{2k}` converted on demand at a fixed precision.
struct LazyBernoulli {
    prec: u32,
    values: Vec<Real>,
}

impl LazyBernoulli {
    fn new(prec: u32) -> LazyBernoulli {
        LazyBernoulli { prec, values: Vec::new() }
    }

    fn get(&mut self, k: usize) -> &Real {
        while self.values.len() < k {
            let n = 2 * (self.values.len() + 1);
            self.values.push(Real::from_rational(&bernoulli_number(n), self.prec));
        }
        &self.values[k - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &Real, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a.as_float() - b);
        (d / b).to_f64().abs()
    }

    #[test]
    fn euler_gamma_digits() {
        let g = euler_gamma(64);
        assert!((g.to_f64() - 0.577_215_664_901_532_9).abs() < 1e-16);
        assert_eq!(euler_gamma(4).prec(), 16);
    }

    #[test]
    fn log_gamma_against_mpfr() {
        for &xv in &[0.001, 0.5, 1.5, 3.0, 7.25, 33.0, 1e4, 1e12] {
            for &p in &[64u32, 128, 300] {
                let x = Real::from_f64(xv, p);
                let got = log_gamma(&x).unwrap();
                let expect = Float::with_val(p + 64, x.as_float()).ln_gamma();
                assert!(rel(&got, &expect) < 2f64.powi(-(p as i32) + 16), "x={xv} p={p}");
            }
        }
    }

    #[test]
    fn log_gamma_trivial_values() {
        assert!(log_gamma(&Real::from_i64(1, 64)).unwrap().is_zero());
        assert!(log_gamma(&Real::from_i64(2, 64)).unwrap().is_zero());
        assert!(log_gamma(&Real::zero(64)).is_err());
    }

    #[test]
    fn digamma_against_mpfr() {
        for &xv in &[0.01, 0.5, 1.0, 2.75, 12.0, 1e5, -0.5, -3.3] {
            let x = Real::from_f64(xv, 128);
            let got = digamma(&x).unwrap();
            let expect = Float::with_val(256, x.as_float()).digamma();
            assert!(rel(&got, &expect) < 2f64.powi(-110), "x={xv}");
        }
        let g = euler_gamma(128);
        let psi1 = digamma(&Real::one(128)).unwrap();
        assert!(((&psi1 + &g).abs().to_f64()) < 1e-36);
        assert!(digamma(&Real::zero(64)).is_err());
        assert!(digamma(&Real::from_i64(-2, 64)).is_err());
    }

    #[test]
    fn trigamma_at_one_is_zeta_two() {
        let p = 160;
        let v = polygamma(1, &Real::one(p)).unwrap();
        let zeta2 = &(&Real::pi(p) * &Real::pi(p)) / 6;
        assert!(rel(&v, zeta2.as_float()) < 2f64.powi(-140));
    }

    #[test]
    fn polygamma_recurrence() {
        // psi^(m)(x+1) - psi^(m)(x) = (-1)^m m! / x^(m+1)
        let p = 128;
        let x = Real::from_f64(0.37, p);
        let x1 = &x + 1;
        let a = polygamma_tower(&x, 12).unwrap();
        let b = polygamma_tower(&x1, 12).unwrap();
        let mut fact = Real::one(p);
        for m in 0..=12usize {
            if m > 0 {
                fact = &fact * (m as i32);
            }
            let mut rhs = &fact / &x.powi(m as i32 + 1);
            if m % 2 == 1 {
                rhs = -rhs;
            }
            let lhs = &b[m] - &a[m];
            let err = (&(&lhs - &rhs) / &rhs).abs().to_f64();
            assert!(err < 2f64.powi(-100), "m={m} err={err}");
        }
    }

    #[test]
    fn tower_matches_single_orders() {
        let x = Real::from_f64(2.5, 96);
        let t = polygamma_tower(&x, 6).unwrap();
        for m in 0..=6 {
            let single = polygamma(m, &x).unwrap();
            assert!((&t[m] - &single).abs() <= &t[m].abs() * &Real::pow2(-80, 96));
        }
    }
}
