use super::bernoulli::bernoulli_number;
use super::real::{Real, GUARD_BITS};
use super::KernelError;

/// `F(a, b, x) = 1/(x+b) + (x+a) * sum_{k>=1} 1/((x+a+k)(x+b+k))` with `|error| <= tol`.
///
/// The sum is taken directly up to a cutoff `K` and the remainder is an
/// Euler-Maclaurin tail. The summand is completely monotone in `k`, so the
/// first omitted correction bounds the truncation error.
pub fn f_series(a: &Real, b: &Real, x: &Real, tol: &Real) -> Result<Real, KernelError> {
    if !tol.is_positive() {
        return Err(KernelError::InvalidArgument { op: "F_series", reason: "tol must be positive".into() });
    }
    let p_out = x.prec().max(a.prec()).max(b.prec());
    let wp = p_out + 2 * GUARD_BITS;
    let p = &x.with_prec(wp) + &a.with_prec(wp);
    let q = &x.with_prec(wp) + &b.with_prec(wp);
    if !p.is_positive() || !q.is_positive() {
        return Err(KernelError::Domain {
            op: "F_series",
            reason: format!("series requires x + a > 0 and x + b > 0 (x + a = {}, x + b = {})", p.to_sci(8), q.to_sci(8)),
        });
    }
    let floor = Real::pow2(-(wp as i32), wp);
    let target = tol.with_prec(wp).max(floor);
    let ln_target = -target.ln().to_f64();
    let mut cutoff = (8.0 + ln_target / (2.0 * std::f64::consts::PI)).ceil() as u64;
    let weight = p.clone().max(Real::one(wp));
    loop {
        if let Some(tail) = em_tail(&p, &q, cutoff, &(&target / &weight).ldexp(-2))? {
            let mut head = Real::zero(wp);
            for k in (1..cutoff).rev() {
                let t = &(&p + k as i32) * &(&q + k as i32);
                head = &head + &t.recip();
            }
            let s = &head + &tail;
            let f = &q.recip() + &(&p * &s);
            return Ok(f.with_prec(p_out));
        }
        cutoff *= 2;
        if cutoff > 1 << 24 {
            return Err(KernelError::Domain { op: "F_series", reason: "tail did not converge".into() });
        }
    }
}

/// `sum_{k >= K} 1/((k+p)(k+q))`, or `None` if the correction terms stop shrinking first.
fn em_tail(p: &Real, q: &Real, cutoff: u64, tol: &Real) -> Result<Option<Real>, KernelError> {
    let wp = p.prec();
    let k = Real::from_i64(cutoff as i64, wp);
    let tp = &k + p;
    let tq = &k + q;
    let d = q - p;
    let equal = d.is_zero();
    // log((t+p)/(t+q)) without cancellation
    let u = (&(-&d) / &tq).ln_1p();
    let integral = if equal { tp.recip() } else { &(-&u) / &d };
    let g = (&tp * &tq).recip();
    let mut sum = &integral + &g.ldexp(-1);
    // s-th derivative of g at t = K, divided by s!, with sign (-1)^s removed
    let deriv_abs = |s: u32| -> Real {
        let inv = tp.powi(-(s as i32) - 1);
        if equal {
            &(&inv / &tp) * ((s + 1) as i32)
        } else {
            let ratio = (&u * ((s + 1) as i32)).exp_m1();
            &(&inv * &(-ratio)) / &d
        }
    };
    let mut fact = Real::one(wp);
    let mut prev: Option<Real> = None;
    for j in 1u32..400 {
        let s = 2 * j - 1;
        // (2j)! / (2j-1)! = 2j
        fact = &fact * (s as i32);
        let bj = Real::from_rational(&bernoulli_number(2 * j as usize), wp);
        // g^(2j-1)(K) = -(2j-1)! * deriv_abs
        let dv = &deriv_abs(s) * &fact;
        fact = &fact * ((s + 1) as i32);
        let term = &(&bj * &dv) / &fact;
        let mag = term.abs();
        if prev.as_ref().is_some_and(|pm| mag > *pm) {
            return Ok(None);
        }
        sum = &sum + &term;
        if mag < *tol {
            return Ok(Some(sum));
        }
        prev = Some(mag);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::digamma;

    #[test]
    fn equal_parameters_give_one() {
        let p = 128;
        let tol = Real::from_f64(1e-30, p);
        for &a in &[0.0, 0.5, 2.0] {
            let f = f_series(&Real::from_f64(a, p), &Real::from_f64(a + 1.0, p), &Real::from_f64(1.7, p), &tol).unwrap();
            assert!((f.to_f64() - 1.0).abs() < 1e-28, "a={a}");
        }
    }

    #[test]
    fn matches_digamma_closed_form() {
        // F(a,b,x) = 1/(x+b) + (x+a)(psi(x+b+1) - psi(x+a+1))/(b-a)
        let p = 128;
        let tol = Real::from_f64(1e-25, p);
        let (a, b, x) = (Real::from_f64(0.25, p), Real::from_f64(0.9, p), Real::from_f64(3.5, p));
        let f = f_series(&a, &b, &x, &tol).unwrap();
        let pa = &(&x + &a) + 1;
        let pb = &(&x + &b) + 1;
        let closed = &(&x + &b).recip() + &(&(&(&x + &a) * &(&digamma(&pb).unwrap() - &digamma(&pa).unwrap())) / &(&b - &a));
        assert!((&f - &closed).abs().to_f64() < 1e-24);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = 64;
        let one = Real::one(p);
        assert!(f_series(&one, &one, &Real::from_i64(-2, p), &one).is_err());
        assert!(f_series(&one, &one, &one, &Real::zero(p)).is_err());
    }
}
