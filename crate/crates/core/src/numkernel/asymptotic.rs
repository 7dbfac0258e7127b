use super::bernoulli::bernoulli_poly;
use super::real::Real;
use super::KernelError;

/// Smallest argument at which truncated expansions are evaluated.
pub const ASYMPTOTIC_MIN_X: f64 = 10.0;

/// Truncated large-`x` expansion of `psi(x + a)` or `psi'(x + a)`.
#[derive(Clone, Debug)]
pub struct PsiExpansion {
    shift: Real,
    term_count: usize,
    derivative_order: usize,
}

impl PsiExpansion {
    /// `term_count` counts the Bernoulli terms after the leading term (at most 3);
    /// `derivative_order` is 0 for `psi` and 1 for `psi'`.
    pub fn new(shift: &Real, term_count: usize, derivative_order: usize) -> Result<PsiExpansion, KernelError> {
        if term_count > 3 {
            return Err(KernelError::InvalidArgument {
                op: "psi_asymptotic",
                reason: format!("term_count must be at most 3, got {term_count}"),
            });
        }
        if derivative_order > 1 {
            return Err(KernelError::InvalidArgument {
                op: "psi_asymptotic",
                reason: format!("derivative_order must be 0 or 1, got {derivative_order}"),
            });
        }
        Ok(PsiExpansion {
            shift: shift.clone(),
            term_count,
            derivative_order,
        })
    }

    pub fn shift(&self) -> &Real {
        &self.shift
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    pub fn derivative_order(&self) -> usize {
        self.derivative_order
    }

    /// Exponent `e` such that the truncation error is `O(x^e)`: the order of the
    /// first omitted term with a nonzero coefficient. Odd `B_j(a)` vanish at
    /// `a = 0, 1/2, 1`, which gains one order.
    pub fn error_exponent(&self) -> i32 {
        let k = self.term_count;
        let m = self.derivative_order as i32;
        let p = self.shift.prec().max(64);
        let tiny = Real::pow2(-(p as i32) / 2, p);
        let a = self.shift.with_prec(p);
        (k + 1..=k + 3)
            .find(|&j| bernoulli_poly(j, &a).abs() > tiny)
            .map_or(-((k + 1) as i32 + m), |j| -(j as i32 + m))
    }
}

/// Evaluates the truncated expansion at `x >= 10`.
///
/// `m = 0`: `log x + sum_{j=1..k} (-1)^(j+1) B_j(a) / (j x^j)`.
/// `m = 1`: `1/x + sum_{j=1..k} (-1)^j B_j(a) / x^(j+1)`.
pub fn psi_asymptotic(x: &Real, exp: &PsiExpansion) -> Result<Real, KernelError> {
    if *x < ASYMPTOTIC_MIN_X {
        return Err(KernelError::Refused {
            op: "psi_asymptotic",
            reason: format!("x = {} is below {ASYMPTOTIC_MIN_X}", x.to_sci(10)),
        });
    }
    let p = x.prec();
    let a = exp.shift.with_prec(p);
    let inv_x = x.recip();
    let mut acc = if exp.derivative_order == 0 { x.ln() } else { inv_x.clone() };
    let mut xpow = if exp.derivative_order == 0 { inv_x.clone() } else { &inv_x * &inv_x };
    for j in 1..=exp.term_count {
        let b = bernoulli_poly(j, &a);
        let mut term = &b * &xpow;
        if exp.derivative_order == 0 {
            term = &term / (j as i32);
            if j % 2 == 0 {
                term = -term;
            }
        } else if j % 2 == 1 {
            term = -term;
        }
        acc = &acc + &term;
        xpow = &xpow * &inv_x;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{digamma, polygamma};

    #[test]
    fn closed_forms_at_zero_shift() {
        let p = 128;
        let x = Real::from_i64(10, p);
        let zero = Real::zero(p);
        // psi'(x) ~ 1/x + 1/(2x^2) + 1/(6x^3)
        let e = PsiExpansion::new(&zero, 2, 1).unwrap();
        let got = psi_asymptotic(&x, &e).unwrap();
        let expect = 0.1 + 0.005 + 1.0 / 6000.0;
        assert!((got.to_f64() - expect).abs() < 1e-15);
        // psi(x) ~ log x - 1/(2x)
        let e = PsiExpansion::new(&zero, 1, 0).unwrap();
        let got = psi_asymptotic(&x, &e).unwrap();
        assert!((got.to_f64() - (10f64.ln() - 0.05)).abs() < 1e-15);
    }

    #[test]
    fn refuses_small_x_and_bad_counts() {
        let p = 64;
        let e = PsiExpansion::new(&Real::zero(p), 1, 0).unwrap();
        assert!(psi_asymptotic(&Real::from_i64(5, p), &e).is_err());
        assert!(PsiExpansion::new(&Real::zero(p), 4, 0).is_err());
        assert!(PsiExpansion::new(&Real::zero(p), 1, 2).is_err());
    }

    #[test]
    fn error_shrinks_at_predicted_rate() {
        let p = 160;
        let a = Real::from_f64(0.3, p);
        for m in 0..=1usize {
            for k in 1..=3usize {
                let e = PsiExpansion::new(&a, k, m).unwrap();
                let err = |xv: f64| {
                    let x = Real::from_f64(xv, p);
                    let exact = if m == 0 { digamma(&(&x + &a)).unwrap() } else { polygamma(1, &(&x + &a)).unwrap() };
                    (&psi_asymptotic(&x, &e).unwrap() - &exact).abs().to_f64()
                };
                let slope = (err(1e4).ln() - err(1e2).ln()) / (1e4f64.ln() - 1e2f64.ln());
                assert!((slope - e.error_exponent() as f64).abs() < 0.2, "m={m} k={k} slope={slope}");
            }
        }
    }

    #[test]
    fn vanishing_bernoulli_terms_gain_an_order() {
        let p = 128;
        let zero = Real::zero(p);
        // B_3(0) = 0: psi'(x) with two terms is O(x^-5)
        assert_eq!(PsiExpansion::new(&zero, 2, 1).unwrap().error_exponent(), -5);
        assert_eq!(PsiExpansion::new(&zero, 1, 1).unwrap().error_exponent(), -3);
        assert_eq!(PsiExpansion::new(&Real::from_f64(0.3, p), 2, 1).unwrap().error_exponent(), -4);
    }
}
