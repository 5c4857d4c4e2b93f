use bandflow_core::benenti::{IntegralValues, SeparableProfile};
use bandflow_core::defaults::{DX, NEUMANN_KAPPA};
use bandflow_core::poly::{RationalFunction, RealPolynomial};
use bandflow_core::separation::{integrate, legendre_residual, trace_series};
use bandflow_core::systems::{
    calibrate_kappa, cartesian_to_sphero_conical, integrate_cartesian, match_profiles, neumann_profile,
    separation_state_from_cartesian, sphero_conical_to_cartesian, CartesianState, MatchOutcome, NeumannSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cartesian(n: usize, rng: &mut ChaCha8Rng) -> CartesianState {
    let mut x: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= r);
    let mut v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-0.8..0.8)).collect();
    let xv: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
    v.iter_mut().zip(&x).for_each(|(b, a)| *b -= xv * a);
    CartesianState::new(x, v).unwrap()
}

#[test]
fn coordinate_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let specs = [vec![1.0, 2.0], vec![1.0, 2.0, 3.0], vec![0.5, 1.5, 2.0, 4.0]];
    for k in 0..1000 {
        let a = &specs[k % 3];
        let s = NeumannSpec::new(a.clone()).unwrap();
        let n = s.n();
        let q: Vec<f64> = (0..n).map(|i| a[i] + (a[i + 1] - a[i]) * rng.gen::<f64>()).collect();
        let eps: Vec<f64> = (0..=n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let x = sphero_conical_to_cartesian(&s, &q, &eps).unwrap();
        let norm: f64 = x.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let quad: f64 = x.iter().zip(a).map(|(x, a)| a * x * x).sum();
        assert!((quad + q.iter().sum::<f64>() - s.sum()).abs() < 1e-10);
        let back = cartesian_to_sphero_conical(&s, &x).unwrap();
        for (g, w) in back.iter().zip(&q) {
            assert!((g - w).abs() < 1e-10, "{q:?} → {back:?}");
        }
    }
}

#[test]
fn cartesian_flow_matches_separated_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for a in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0]] {
        let s = NeumannSpec::new(a).unwrap();
        let p = neumann_profile(&s);
        for _ in 0..3 {
            let c = random_cartesian(s.n(), &mut rng);
            let sep = integrate(&p, &separation_state_from_cartesian(&s, &c).unwrap(), (0.0, 20.0), DX).unwrap();
            let cart = integrate_cartesian(&s, &c, (0.0, 20.0), DX, NEUMANN_KAPPA).unwrap();
            let trace = trace_series(&sep);
            for (st, t) in cart.states.iter().zip(&trace) {
                let q = cartesian_to_sphero_conical(&s, &st.x).unwrap();
                assert!((q.iter().sum::<f64>() - t).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn calibration_recovers_unit_kappa() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let s = NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
    let k = calibrate_kappa(&s, &random_cartesian(2, &mut rng), 10.0).unwrap();
    assert!((k - 1.0).abs() < 1e-6, "{k}");
}

fn neumann_scaled(s: &NeumannSpec) -> SeparableProfile {
    let p = neumann_profile(s);
    let shift = RationalFunction::polynomial(RealPolynomial::new(vec![0.5, -1.0]));
    SeparableProfile::new(p.n, p.f.scale(2.0), p.u.scale(0.5).add_poly(&shift.num), "scaled").unwrap()
}

fn matched(p1: &SeparableProfile, h: &IntegralValues, p2: &SeparableProfile) -> Vec<f64> {
    match match_profiles(p1, h, p2).unwrap() {
        MatchOutcome::Matched(g) => g.0,
        m => panic!("{m:?}"),
    }
}

#[test]
fn matching_is_identity_and_affine() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let s = NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
    let p = neumann_profile(&s);
    let q = neumann_scaled(&s);
    for _ in 0..20 {
        let h1 = IntegralValues(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]);
        let h2 = IntegralValues(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]);
        let same = matched(&p, &h1, &p);
        assert!(same.iter().zip(&h1.0).all(|(a, b)| (a - b).abs() < 1e-10));
        let t = rng.gen_range(-2.0..2.0);
        let mix = IntegralValues(h1.0.iter().zip(&h2.0).map(|(a, b)| t * a + (1.0 - t) * b).collect());
        let (m1, m2, mm) = (matched(&p, &h1, &q), matched(&p, &h2, &q), matched(&p, &mix, &q));
        for k in 0..2 {
            assert!((mm[k] - (t * m1[k] + (1.0 - t) * m2[k])).abs() < 1e-10);
        }
    }
}

#[test]
fn neumann_trajectories_solve_the_normalized_kdv_profile() {
    use bandflow_core::benenti::{allowed_product, integrals_at};
    use bandflow_core::separation::SeparationState;
    use bandflow_core::systems::normalize_to_kdv;
    let cases = [
        (vec![1.0, 2.0], vec![1.5], vec![1.0]),
        (vec![1.0, 2.0, 3.0], vec![1.5, 2.5], vec![0.3, 0.2]),
    ];
    for (a, q, mom) in cases {
        let s = NeumannSpec::new(a).unwrap();
        let p = neumann_profile(&s);
        let h = integrals_at(&p, &q, &mom).unwrap();
        let st = SeparationState { q, sigma: mom.iter().map(|v: &f64| v.signum()).collect(), h };
        let traj = integrate(&p, &st, (0.0, 20.0), DX).unwrap();
        let norm = normalize_to_kdv(&allowed_product(&p, &traj.h).as_polynomial().unwrap()).unwrap();
        let kdv = traj.rescale_time(norm.time_factor()).shift_coordinates(-norm.shift, norm.h.clone(), "kdv");
        let r = legendre_residual(&norm.profile, &kdv).unwrap();
        assert!(r < 1e-6, "{r:e}");
    }
}
