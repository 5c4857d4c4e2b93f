use bandflow_core::benenti::IntegralValues;
use bandflow_core::defaults::{DX, EDGE_TOL};
use bandflow_core::hill::{band_edge_solution, PairKind, explicit_pair, floquet_discriminant, hill_residual};
use bandflow_core::kdv::{base1_residual, default_mu_grid, interlacing_check, kdv_trace_native, KdvTrace};
use bandflow_core::poly::{real_roots, RealPolynomial};
use bandflow_core::separation::{integrate, SeparationState};
use bandflow_core::systems::{neumann_profile, random_neumann_state, NeumannSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_trace(a: &[f64], span: f64, rng: &mut ChaCha8Rng) -> KdvTrace {
    let s = NeumannSpec::new(a.to_vec()).unwrap();
    let p = neumann_profile(&s);
    let st = random_neumann_state(&s, &mut || rng.gen::<f64>()).unwrap();
    kdv_trace_native(&p, &integrate(&p, &st, (0.0, span), DX).unwrap()).unwrap()
}

#[test]
fn interlacing_and_boundedness_along_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for a in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0], vec![1.0, 1.5, 3.0, 4.0]] {
        let n = a.len() - 1;
        for _ in 0..4 {
            let t = random_trace(&a, 20.0, &mut rng);
            for j in 0..t.len() {
                let q: Vec<f64> = t.q.iter().map(|s| s[j]).collect();
                let m = interlacing_check(&t.c, &q).unwrap();
                assert!(m.margins.iter().all(|&v| v >= -1e-8), "{:?}", m.margins);
                let lo = -2.0 * n as f64 * a[n];
                let hi = -2.0 * n as f64 * a[0];
                assert!(t.u[j] >= lo && t.u[j] <= hi);
            }
        }
    }
}

#[test]
fn base1_stable_under_grid_doubling() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for a in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0]] {
        let t = random_trace(&a, 10.0, &mut rng);
        let g = default_mu_grid(&t.c);
        let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let fine: Vec<f64> = (0..2 * g.len()).map(|i| lo + (hi - lo) * i as f64 / (2 * g.len() - 1) as f64).collect();
        let (r1, r2) = (base1_residual(&t, &g).unwrap(), base1_residual(&t, &fine).unwrap());
        assert!(r1 < 1e-5 && r2 < 1e-5, "{r1:e} {r2:e}");
        assert!(r2 <= 2.0 * r1 + 1e-12, "{r1:e} {r2:e}");
    }
}

#[test]
fn roots_of_w_are_the_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let t = random_trace(&[1.0, 2.0, 3.0], 5.0, &mut rng);
    for j in (0..t.len()).step_by(7) {
        let mut c = vec![1.0];
        c.extend(t.w.iter().map(|s| s[j]));
        let r = real_roots(&RealPolynomial::new(c), 1e-7).expanded();
        for (i, v) in r.iter().enumerate() {
            assert!((v - t.q[i][j]).abs() < 1e-9);
        }
    }
}

#[test]
fn explicit_solutions_on_two_degree_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let t = random_trace(&[1.0, 2.0, 3.0], 10.0, &mut rng);
    let r = t.c.real_roots().unwrap();
    let span = (0.0, t.x_end());
    for lambda in [r[0] - 0.7, r[0] + 0.3 * (r[1] - r[0]), r[4] + 0.5] {
        let e = explicit_pair(&t, lambda, t.m0, span).unwrap();
        let p2 = e.psi2.unwrap();
        for s in [&e.psi1, &p2] {
            assert!(hill_residual(s, &t, lambda).unwrap() < 1e-6);
        }
        let w0 = e.psi1.psi[0] * p2.dpsi[0] - e.psi1.dpsi[0] * p2.psi[0];
        for j in 0..p2.psi.len() {
            let wr = e.psi1.psi[j] * p2.dpsi[j] - e.psi1.dpsi[j] * p2.psi[j];
            assert!((wr - w0).abs() < 1e-8);
            let w = t.w_at(j, lambda).0;
            let (a, b) = (e.psi1.psi[j], p2.psi[j]);
            match e.kind {
                PairKind::Exponential { .. } => assert!((a * b - w).abs() < 1e-9),
                _ => assert!((a * a + b * b - w.abs()).abs() < 1e-9),
            }
        }
    }
    for &edge in &r {
        let s = band_edge_solution(&t, edge).unwrap();
        assert!(hill_residual(&s, &t, edge).unwrap() < 1e-6, "edge {edge}");
    }
}

#[test]
fn discriminant_crosses_two_only_at_edges() {
    let s = NeumannSpec::new(vec![1.0, 2.0]).unwrap();
    let p = neumann_profile(&s);
    let st = SeparationState { q: vec![1.5], sigma: vec![1.0], h: IntegralValues(vec![3.0]) };
    let t = kdv_trace_native(&p, &integrate(&p, &st, (0.0, 30.0), DX).unwrap()).unwrap();
    let roots = t.c.real_roots().unwrap();
    let grid: Vec<f64> = (0..121).map(|i| -1.0 + 4.0 * i as f64 / 120.0 + 1e-4).collect();
    let excess: Vec<f64> = grid.iter().map(|&l| floquet_discriminant(&t, l).unwrap().abs() - 2.0).collect();
    for k in 1..grid.len() {
        if excess[k].signum() != excess[k - 1].signum() {
            let near = roots.iter().any(|&r| r >= grid[k - 1] - EDGE_TOL && r <= grid[k] + EDGE_TOL);
            assert!(near, "sign change in ({}, {})", grid[k - 1], grid[k]);
        }
    }
}
