use std::sync::{OnceLock, RwLock};

use rug::{Integer, Rational};

use super::real::Real;

fn cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1)]))
}

/// Exact Bernoulli number `B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli_number(n: usize) -> Rational {
    {
        let table = cache().read().expect("bernoulli cache poisoned");
        if n < table.len() {
            return table[n].clone();
        }
    }
    let mut table = cache().write().expect("bernoulli cache poisoned");
    while table.len() <= n {
        let m = table.len();
        let value = if m >= 3 && m % 2 == 1 {
            Rational::new()
        } else {
            // sum_{k<m} C(m+1, k) B_k = -(m+1) B_m
            let mut binom = Integer::from(1);
            let mut acc = Rational::new();
            for (k, bk) in table.iter().enumerate() {
                if bk.cmp0() != std::cmp::Ordering::Equal {
                    acc += Rational::from(&binom * bk.numer()) / bk.denom();
                }
                binom *= (m + 1 - k) as u64;
                binom /= (k + 1) as u64;
            }
            -acc / Rational::from((m + 1) as u64)
        };
        table.push(value);
    }
    table[n].clone()
}

/// Exact Bernoulli polynomial `B_k(a)` for rational `a`.
pub fn bernoulli_poly_rational(k: usize, a: &Rational) -> Rational {
    let mut binom = Integer::from(1);
    let mut acc = Rational::new();
    let mut apow = Rational::from(1);
    // sum_{j} C(k, j) B_j a^{k-j}, accumulated from j = k downwards
    let mut terms = Vec::with_capacity(k + 1);
    for j in 0..=k {
        terms.push((binom.clone(), bernoulli_number(j)));
        binom *= (k - j) as u64;
        binom /= (j + 1) as u64;
    }
    for (c, bj) in terms.into_iter().rev() {
        acc += Rational::from(c) * bj * &apow;
        apow *= a;
    }
    acc
}

/// Bernoulli polynomial `B_k(a)` evaluated in floating point at the precision of `a`.
pub fn bernoulli_poly(k: usize, a: &Real) -> Real {
    let prec = a.prec();
    // Horner in a: B_k(a) = sum_j C(k,j) B_{k-j} a^j
    let mut binom = Integer::from(1);
    let mut coeffs = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let c = Rational::from(binom.clone()) * bernoulli_number(k - j);
        coeffs.push(Real::from_rational(&c, prec));
        binom *= (k - j) as u64;
        binom /= (j + 1) as u64;
    }
    let mut acc = Real::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &(&acc * a) + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn first_bernoulli_numbers() {
        assert_eq!(bernoulli_number(0), q(1, 1));
        assert_eq!(bernoulli_number(1), q(-1, 2));
        assert_eq!(bernoulli_number(2), q(1, 6));
        assert_eq!(bernoulli_number(3), q(0, 1));
        assert_eq!(bernoulli_number(4), q(-1, 30));
        assert_eq!(bernoulli_number(12), q(-691, 2730));
        assert_eq!(bernoulli_number(20), q(-174611, 330));
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(bernoulli_poly_rational(1, &q(0, 1)), q(-1, 2));
        assert_eq!(bernoulli_poly_rational(2, &q(1, 2)), q(-1, 12));
        // B_3(x) = x^3 - 3x^2/2 + x/2
        let x = q(2, 3);
        let expect = Rational::from(&x * &x) * &x - q(3, 2) * Rational::from(&x * &x) + q(1, 2) * &x;
        assert_eq!(bernoulli_poly_rational(3, &x), expect);
        let r = bernoulli_poly(2, &Real::from_f64(0.5, 64));
        assert!((r.to_f64() + 1.0 / 12.0).abs() < 1e-18);
    }

    #[test]
    fn translation_identity() {
        // B_k(a + 1) - B_k(a) = k a^{k-1}
        for k in 1..8usize {
            let a = q(3, 7);
            let lhs = bernoulli_poly_rational(k, &(a.clone() + 1u32)) - bernoulli_poly_rational(k, &a);
            let mut rhs = Rational::from(k as u64);
            for _ in 1..k {
                rhs *= &a;
            }
            assert_eq!(lhs, rhs);
        }
    }
}
