use bandflow_core::poly::{elementary_symmetric, real_roots, stackel_solve, vandermonde_condition, RealPolynomial};
use proptest::prelude::*;

fn separated(min_gap: f64, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_len).prop_filter("roots too close", move |r| {
        let mut s = r.clone();
        s.sort_by(f64::total_cmp);
        s.windows(2).all(|w| w[1] - w[0] > min_gap)
    })
}

proptest! {
    #[test]
    fn root_round_trip(roots in separated(0.5, 9), scale in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0]) {
        let p = RealPolynomial::from_roots(&roots, scale);
        let found = real_roots(&p, 1e-7);
        prop_assert!(found.all_real());
        let mut want = roots.clone();
        want.sort_by(f64::total_cmp);
        let got = found.expanded();
        prop_assert_eq!(got.len(), want.len());
        let n = p.coeffs().len() as f64;
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            // Rounding in p(w) divided by |p'(w)|: the root's own conditioning.
            let noise = p.coeffs().iter().fold(0.0, |acc, c| acc * w.abs() + c.abs());
            let slope = scale.abs() * want.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| (w - v).abs()).product::<f64>();
            let tol = (16.0 * n * f64::EPSILON * noise / slope).max(1e-12);
            prop_assert!((g - w).abs() < tol, "{} vs {} (tol {:e})", g, w, tol);
        }
    }

    #[test]
    fn eval_vanishes_on_roots(roots in separated(0.05, 9), scale in 0.5f64..3.0) {
        let p = RealPolynomial::from_roots(&roots, scale);
        let n = p.coeffs().len() as f64;
        for &r in &roots {
            // Horner forward-error bound.
            let bound = p.coeffs().iter().fold(0.0, |acc, c| acc * r.abs() + c.abs());
            prop_assert!(p.eval(r).abs() <= 4.0 * n * f64::EPSILON * bound);
        }
    }

    #[test]
    fn symmetric_functions_are_coefficients(q in prop::collection::vec(-5.0f64..5.0, 1..8)) {
        let e = elementary_symmetric(&q);
        let p = RealPolynomial::from_roots(&q, 1.0);
        prop_assert_eq!(&e[..], &p.coeffs()[1..]);
    }

    #[test]
    fn stackel_reproduces_rhs(q in separated(0.1, 6), seed in prop::collection::vec(-3.0f64..3.0, 6)) {
        let n = q.len();
        let rhs = &seed[..n];
        let cond = vandermonde_condition(&q);
        prop_assume!(cond < 1e12);
        let x = stackel_solve(&q, rhs).unwrap();
        for (i, &qi) in q.iter().enumerate() {
            let back: f64 = (0..n).map(|j| qi.powi((n - 1 - j) as i32) * x[j]).sum();
            prop_assert!((back - rhs[i]).abs() <= 1e-12 * cond.max(1.0), "{} vs {}", back, rhs[i]);
        }
    }
}
