use crate::prelude::*;

use super::{neumann_profile, CartesianState, NeumannSpec};
use crate::benenti::{integrals_at, pi_factor};
use crate::defaults::ROOT_CLUSTER_TOL;
use crate::poly::{real_roots, RealPolynomial};
use crate::separation::{velocity_field, SeparationState};
use crate::{Error, Result};

/// Slack allowed on `aᵢ ≤ qᵢ ≤ aᵢ₊₁` before a point is rejected.
const INTERLACE_SLACK: f64 = 1e-12;

/// `Xᵢ = εᵢ·√(Π_j(aᵢ − qⱼ) / Π_{j≠i}(aᵢ − aⱼ))`
pub fn sphero_conical_to_cartesian(spec: &NeumannSpec, q: &[f64], eps: &[f64]) -> Result<Vec<f64>> {
    let a = spec.a();
    let n = spec.n();
    if q.len() != n {
        return Err(Error::Dimension { expected: n, got: q.len() });
    }
    if eps.len() != n + 1 {
        return Err(Error::Dimension { expected: n + 1, got: eps.len() });
    }
    for i in 0..n {
        let slack = INTERLACE_SLACK * a[i + 1].abs().max(1.0);
        if q[i] < a[i] - slack || q[i] > a[i + 1] + slack {
            return Err(Error::Interlacing(format!("q[{i}] = {} outside [{}, {}]", q[i], a[i], a[i + 1])));
        }
    }
    Ok((0..=n)
        .map(|i| {
            let num: f64 = q.iter().map(|&qj| a[i] - qj).product();
            let den = pi_factor(a, i);
            eps[i].signum() * (num / den).max(0.0).sqrt()
        })
        .collect())
}

/// `Σⱼ Xⱼ²·Π_{k≠j}(t − aₖ)`, whose roots are the sphero-conical coordinates.
fn coordinate_polynomial(a: &[f64], x: &[f64]) -> RealPolynomial {
    let mut acc = RealPolynomial::zero();
    for j in 0..a.len() {
        let others: Vec<f64> = a.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
        acc = &acc + &RealPolynomial::from_roots(&others, x[j] * x[j]);
    }
    acc
}

pub fn cartesian_to_sphero_conical(spec: &NeumannSpec, x: &[f64]) -> Result<Vec<f64>> {
    let a = spec.a();
    let n = spec.n();
    if x.len() != n + 1 {
        return Err(Error::Dimension { expected: n + 1, got: x.len() });
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if (norm2 - 1.0).abs() > 1e-8 {
        return Err(Error::Invalid(format!("|X|² = {norm2} is not 1")));
    }
    let poly = coordinate_polynomial(a, x);
    let roots = real_roots(&poly, ROOT_CLUSTER_TOL);
    let mut q = roots.expanded();
    if q.len() != n || poly.degree() != n {
        return Err(Error::RootCount { expected: n, found: q.len() });
    }
    // Each root is confined to [aᵢ, aᵢ₊₁]; finish with safeguarded Newton.
    for (i, qi) in q.iter_mut().enumerate() {
        let (mut lo, mut hi) = (a[i], a[i + 1]);
        let mut t = qi.clamp(lo, hi);
        let flo = poly.eval(lo);
        for _ in 0..60 {
            let (v, d) = poly.eval_with_derivative(t);
            if v == 0.0 {
                break;
            }
            if (v > 0.0) == (flo > 0.0) {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = if d != 0.0 { t - v / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * t.abs().max(1.0) {
                t = next;
                break;
            }
            t = next;
        }
        *qi = t;
    }
    Ok(q)
}

/// `q̇` from `(X, V)` by implicit differentiation of the coordinate polynomial.
pub fn sphero_conical_velocity(spec: &NeumannSpec, x: &[f64], v: &[f64], q: &[f64]) -> Vec<f64> {
    let a = spec.a();
    let poly = coordinate_polynomial(a, x);
    let dpoly = poly.derivative();
    q.iter()
        .map(|&qi| {
            let mut num = 0.0;
            for j in 0..a.len() {
                let others: f64 = a.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &ak)| qi - ak).product();
                num += 2.0 * x[j] * v[j] * others;
            }
            -num / dpoly.eval(qi)
        })
        .collect()
}

/// Separated initial data for the Neumann profile equivalent to `state`.
pub fn separation_state_from_cartesian(spec: &NeumannSpec, state: &CartesianState) -> Result<SeparationState> {
    let profile = neumann_profile(spec);
    let q = cartesian_to_sphero_conical(spec, &state.x)?;
    let qdot = sphero_conical_velocity(spec, &state.x, &state.v, &q);
    let mut p = vec![0.0; q.len()];
    let mut sigma = vec![1.0; q.len()];
    for i in 0..q.len() {
        let pi = pi_factor(&q, i);
        p[i] = qdot[i] * pi / profile.f.eval(q[i])?;
        if qdot[i] * pi < 0.0 {
            sigma[i] = -1.0;
        }
    }
    let h = integrals_at(&profile, &q, &p)?;
    Ok(SeparationState { q, sigma, h })
}

/// Cartesian point and velocity of a separated Neumann state, with octant
/// signs `eps`: `V_j = −½X_j·Σᵢ q̇ᵢ/(a_j − qᵢ)`. Requires `qᵢ ≠ a_j`.
pub fn cartesian_from_separation(spec: &NeumannSpec, state: &SeparationState, eps: &[f64]) -> Result<CartesianState> {
    let a = spec.a();
    let x = sphero_conical_to_cartesian(spec, &state.q, eps)?;
    let qdot = velocity_field(&neumann_profile(spec), state)?;
    let mut v = vec![0.0; x.len()];
    for j in 0..x.len() {
        let mut acc = 0.0;
        for (i, &qi) in state.q.iter().enumerate() {
            if a[j] == qi {
                return Err(Error::Pole { t: qi });
            }
            acc += qdot[i] / (a[j] - qi);
        }
        v[j] = -0.5 * x[j] * acc;
    }
    CartesianState::new(x, v)
}

/// Random admissible Neumann state: `qᵢ` uniform inside `(aᵢ, aᵢ₊₁)` away from
/// the ends, `pᵢ` uniform in `[−1, 1]`, integrals from `integrals_at`.
/// `uniform` must return samples in `[0, 1)`.
pub fn random_neumann_state(spec: &NeumannSpec, uniform: &mut dyn FnMut() -> f64) -> Result<SeparationState> {
    let a = spec.a();
    let n = spec.n();
    let profile = neumann_profile(spec);
    let q: Vec<f64> = (0..n).map(|i| a[i] + (a[i + 1] - a[i]) * (0.05 + 0.9 * uniform())).collect();
    let p: Vec<f64> = (0..n).map(|_| 2.0 * uniform() - 1.0).collect();
    let h = integrals_at(&profile, &q, &p)?;
    let mut sigma = vec![1.0; n];
    for i in 0..n {
        if profile.f.eval(q[i])? * p[i] < 0.0 {
            sigma[i] = -1.0;
        }
    }
    Ok(SeparationState { q, sigma, h })
}
