use bandflow_core::benenti::{
    affine_reparam, integrals_at, momentum_from_energy, poisson_residual, potential_coefficients, SeparableProfile,
};
use bandflow_core::poly::{RationalFunction, RealPolynomial};
use bandflow_core::systems::{neumann_profile, random_neumann_state, NeumannSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(a: &[f64]) -> NeumannSpec {
    NeumannSpec::new(a.to_vec()).unwrap()
}

#[test]
fn poisson_brackets_vanish_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for a in [vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0, 4.5]] {
        let s = spec(&a);
        let p = neumann_profile(&s);
        let n = s.n();
        for _ in 0..100 {
            let q: Vec<f64> = (0..n).map(|i| a[i] + (a[i + 1] - a[i]) * rng.gen_range(0.05..0.95)).collect();
            let mom: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for k in 0..n {
                for l in k + 1..n {
                    let r = poisson_residual(&p, &q, &mom, k, l, 1e-4).unwrap();
                    assert!(r <= 1e-5, "{{I{k}, I{l}}} = {r:e} at q = {q:?}, p = {mom:?}");
                }
            }
        }
    }
}

#[test]
fn momenta_round_trip_through_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for a in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0], vec![0.5, 1.0, 2.0, 3.5]] {
        let s = spec(&a);
        let p = neumann_profile(&s);
        for _ in 0..100 {
            let st = random_neumann_state(&s, &mut || rng.gen::<f64>()).unwrap();
            let mom = momentum_from_energy(&p, &st.h, &st.q, &st.sigma).unwrap();
            let back = integrals_at(&p, &st.q, &mom).unwrap();
            for (x, y) in back.0.iter().zip(&st.h.0) {
                assert!((x - y).abs() < 1e-10, "{back:?} vs {:?}", st.h);
            }
        }
    }
}

fn poly(c: Vec<f64>) -> RationalFunction {
    RationalFunction::polynomial(RealPolynomial::new(c))
}

proptest! {
    #[test]
    fn low_degree_potential_is_its_own_coefficients(
        u in prop::collection::vec(-3.0f64..3.0, 3),
        q0 in -3.0f64..-1.0, q1 in -0.5f64..0.5, q2 in 1.0f64..3.0,
    ) {
        let c = potential_coefficients(&poly(u.clone()), &[q0, q1, q2]).unwrap();
        for (a, b) in c.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-10, "{:?} vs {:?}", c, u);
        }
    }

    #[test]
    fn affine_reparam_inverts(
        f in prop::collection::vec(-2.0f64..2.0, 1..5),
        u in prop::collection::vec(-2.0f64..2.0, 0..5),
        c1 in prop_oneof![-3.0f64..-0.3, 0.3f64..3.0],
        c2 in -2.0f64..2.0,
    ) {
        prop_assume!(f[0] != 0.0);
        let p = SeparableProfile::new(2, poly(f), poly(u), "p").unwrap();
        let back = affine_reparam(&affine_reparam(&p, c1, c2).unwrap(), 1.0 / c1, -c2 / c1).unwrap();
        for t in [-1.3, 0.2, 0.9, 2.4] {
            let (a, b) = (p.f.eval(t).unwrap(), back.f.eval(t).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            let (a, b) = (p.u.eval(t).unwrap(), back.u.eval(t).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }
}
