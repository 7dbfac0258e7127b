use proptest::prelude::*;
use rug::ops::Pow;
use rug::Rational;

use cmono_core::exprlang::{parse, parse_expr, print, Expr, Interval};
use cmono_core::numkernel::Real;
use cmono_core::taylor::{eval_derivatives, eval_value, fd_oracle, Jet};
use cmono_core::testers::{build_grid, GridSpec};

const P: u32 = 160;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| Rational::from((n, d)))
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::var()), rational().prop_map(Expr::constant), Just(Expr::pi())];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), rational()).prop_map(|(a, q)| Expr::pow(a, q)),
            inner.clone().prop_map(Expr::exp),
            inner.clone().prop_map(Expr::log),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(Expr::log_gamma),
            inner.clone().prop_map(Expr::digamma),
            (0u32..4, inner.clone()).prop_map(|(m, a)| Expr::polygamma(m, a)),
            inner.prop_map(Expr::over_x),
        ]
    })
}

/// Polynomial `sum c_k x^k` with small integer coefficients, as source text.
fn polynomial() -> impl Strategy<Value = (Vec<i64>, String)> {
    prop::collection::vec(-9i64..=9, 1..7).prop_map(|cs| {
        let terms: Vec<String> = cs.iter().enumerate().map(|(k, c)| format!("({c})*x^{k}")).collect();
        (cs, terms.join(" + "))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_forms_parse_back(e in expr_tree()) {
        let text = print(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^(),.0-9a-z ]{0,40}") {
        let _ = parse(&s);
    }

    #[test]
    fn parse_errors_point_inside_the_input(s in "[-+*/^()0-9x ]{1,30}") {
        if let Err(err) = parse_expr(&s) {
            prop_assert!(err.pos <= s.len());
        }
    }

    #[test]
    fn polynomial_jets_are_exact((cs, src) in polynomial(), x in -20i64..=20) {
        let e = parse_expr(&src).unwrap();
        let xr = Real::from_i64(x, P);
        let j = eval_derivatives(&e, &xr, 8).unwrap();
        // Taylor coefficients of a polynomial at x, by the binomial expansion
        for n in 0..=8usize {
            let mut c = Rational::new();
            for (k, ck) in cs.iter().enumerate() {
                if k >= n {
                    let binom = rug::Integer::from(rug::Integer::binomial_u(k as u32, n as u32));
                    c += Rational::from(binom * ck) * Rational::from(rug::Integer::from(x).pow((k - n) as u32));
                }
            }
            prop_assert_eq!(j.coeff(n).to_rational().unwrap(), c);
        }
    }

    #[test]
    fn exp_log_round_trip(c in 1i64..=9, x in 1i64..=40) {
        let xr = Real::from_f64(x as f64 / 8.0, P);
        let e = parse_expr(&format!("exp(log(x^2 + {c}))")).unwrap();
        let f = parse_expr(&format!("x^2 + {c}")).unwrap();
        let (a, b) = (eval_derivatives(&e, &xr, 10).unwrap(), eval_derivatives(&f, &xr, 10).unwrap());
        for n in 0..=10 {
            let d = (a.coeff(n) - b.coeff(n)).abs();
            prop_assert!(d <= Real::pow2(-(P as i32) + 24, P), "n={} diff={}", n, d.to_sci(6));
        }
    }

    #[test]
    fn product_then_quotient_is_identity(x in 1i64..=40, k in 1i64..=5) {
        let xr = Real::from_f64(x as f64 / 4.0, P);
        let f = eval_derivatives(&parse_expr(&format!("exp(-{k}*x) + 1/(x+1)")).unwrap(), &xr, 10).unwrap();
        let g = eval_derivatives(&parse_expr("log(x + 2)").unwrap(), &xr, 10).unwrap();
        let back = f.mul(&g).unwrap().div(&g).unwrap();
        for n in 0..=10 {
            let d = (back.coeff(n) - f.coeff(n)).abs();
            prop_assert!(d <= &f.coeff(n).abs().max(Real::one(P)) * &Real::pow2(-(P as i32) + 24, P));
        }
    }

    #[test]
    fn jets_match_finite_differences(c in 1i64..=6, x in 1i64..=30, n in 0usize..=8) {
        let e = parse_expr(&format!("log(x + {c}) * exp(-x/{c}) + psi(x + 1)")).unwrap();
        let xr = Real::from_f64(x as f64 / 3.0, 128);
        let j = eval_derivatives(&e, &xr, n).unwrap();
        let fd = fd_oracle(&e, &xr, n, 512).unwrap();
        let d = (&j.derivative(n) - &fd.value).abs();
        prop_assert!(d <= &j.derivative(n).abs().max(Real::pow2(-40, 128)) * &Real::pow2(-64, 128), "n={} d={}", n, d.to_sci(6));
    }

    #[test]
    fn grid_points_are_inside_and_ascending(lo in -50i64..=50, len in prop::option::of(1i64..=1000), size in 1usize..=80, decades in any::<bool>()) {
        let lo_q = Rational::from((lo, 4));
        let i = match len {
            Some(l) => Interval::open(Some(lo_q.clone()), Some(lo_q.clone() + Rational::from((l, 4)))),
            None => Interval::above(lo_q.clone()),
        };
        let spec = GridSpec { size, decades, ..GridSpec::default() };
        let pts = build_grid(&i, &spec, 128);
        prop_assert!(!pts.is_empty());
        for w in pts.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for p in &pts {
            prop_assert!(i.contains_real(p));
        }
    }

    #[test]
    fn jet_leibniz_rule(a in prop::collection::vec(-50i64..=50, 6), b in prop::collection::vec(-50i64..=50, 6)) {
        let x = Real::from_i64(0, 64);
        let ja = Jet::new(x.clone(), a.iter().map(|&v| Real::from_i64(v, 64)).collect());
        let jb = Jet::new(x.clone(), b.iter().map(|&v| Real::from_i64(v, 64)).collect());
        let p = ja.mul(&jb).unwrap();
        for n in 0..6 {
            let want: i64 = (0..=n).map(|k| a[k] * b[n - k]).sum();
            prop_assert_eq!(p.coeff(n).to_f64(), want as f64);
        }
    }
}

#[test]
fn eval_value_agrees_with_jet_value() {
    let e = parse_expr("loggamma(x + 1/2) - x*log(x) + sqrt(x)").unwrap();
    let x = Real::from_f64(3.25, P);
    let v = eval_value(&e, &x).unwrap();
    let j = eval_derivatives(&e, &x, 4).unwrap();
    assert!((&v - j.value()).abs() < Real::pow2(-140, P));
}
