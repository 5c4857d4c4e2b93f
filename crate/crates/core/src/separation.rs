//! Integration of the separated equations
//!
//! ```text
//! (q̇ᵢ·Πᵢ)² = 2 f(qᵢ) R(qᵢ),   Πᵢ = Π_{s≠i}(qᵢ − q_s),
//! ```
//!
//! sampled on a uniform grid.
//!
//! A coordinate whose allowed interval `[lo, hi]` (consecutive roots of `f·R`)
//! is known moves as `qᵢ = mid + amp·sin θᵢ` with
//! `θ̇ᵢ = εᵢ·√(2Gᵢ(qᵢ))/Πᵢ`, `G = f·R / ((t − lo)(t − hi))`, which is smooth
//! through the turning points. A coordinate sitting on a multiple root is an
//! equilibrium and stays frozen. Without brackets the differentiated form
//! `q̈ᵢ = (P′(qᵢ)/Πᵢ − q̇ᵢΠ̇ᵢ)/Πᵢ` is integrated instead.

use crate::prelude::*;

use core::f64::consts::PI;

use crate::benenti::{allowed_product, integrals_at, momentum_from_energy, pi_factor, rhs_polynomial, IntegralValues, SeparableProfile};
use crate::defaults::{COLLISION_TOL, ROOT_CLUSTER_TOL, SEPARATION_ATOL, SEPARATION_RTOL};
use crate::fd;
use crate::ode::{initial_step, Dopri5, Stepper};
use crate::poly::{real_roots, RationalFunction, RealPolynomial, RootList};
use crate::{Error, Result};

/// Rounding-level negatives of `f·R` still count as allowed.
const ALLOWED_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationState {
    pub q: Vec<f64>,
    /// Sign of `q̇ᵢ·Πᵢ`, ±1.
    pub sigma: Vec<f64>,
    pub h: IntegralValues,
}

/// Uniformly sampled solution; per-coordinate series are indexed `[i][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x0: f64,
    pub dx: f64,
    pub q: Vec<Vec<f64>>,
    /// Velocities from the vector field at each sample.
    pub qdot: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
    pub h: IntegralValues,
    pub label: String,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn len(&self) -> usize {
        self.q.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_at(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn x_grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.x_at(k)).collect()
    }

    pub fn q_at(&self, k: usize) -> Vec<f64> {
        self.q.iter().map(|s| s[k]).collect()
    }

    pub fn qdot_at(&self, k: usize) -> Vec<f64> {
        self.qdot.iter().map(|s| s[k]).collect()
    }

    pub fn state_at(&self, k: usize) -> SeparationState {
        SeparationState { q: self.q_at(k), sigma: self.sigma.iter().map(|s| s[k]).collect(), h: self.h.clone() }
    }

    /// Same curve in the time `x' = factor·x` (factor > 0).
    pub fn rescale_time(&self, factor: f64) -> Self {
        let mut t = self.clone();
        t.x0 *= factor;
        t.dx *= factor;
        for s in &mut t.qdot {
            for v in s.iter_mut() {
                *v /= factor;
            }
        }
        t
    }

    /// Same curve in the coordinate `q' = q + delta`, relabelled with the
    /// integral values `h` that hold in the new frame.
    pub fn shift_coordinates(&self, delta: f64, h: IntegralValues, label: impl Into<String>) -> Self {
        let mut t = self.clone();
        for s in &mut t.q {
            for v in s.iter_mut() {
                *v += delta;
            }
        }
        t.h = h;
        t.label = label.into();
        t
    }
}

/// `q̇ᵢ = σᵢ·√(2 f(qᵢ) R(qᵢ)) / Πᵢ`
pub fn velocity_field(profile: &SeparableProfile, state: &SeparationState) -> Result<Vec<f64>> {
    let p = allowed_product(profile, &state.h);
    check_distinct(&state.q, 0.0)?;
    let mut v = Vec::with_capacity(state.q.len());
    for (i, &qi) in state.q.iter().enumerate() {
        let val = p.eval(qi)?;
        if val < -ALLOWED_SLACK {
            return Err(Error::Forbidden { index: i, ratio: val });
        }
        v.push(state.sigma[i].signum() * (2.0 * val.max(0.0)).sqrt() / pi_factor(&state.q, i));
    }
    Ok(v)
}

fn check_distinct(q: &[f64], x: f64) -> Result<()> {
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if (q[i] - q[j]).abs() <= COLLISION_TOL * q[i].abs().max(1.0) {
                return Err(Error::Collision { i, j, x });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Motion {
    Angle { mid: f64, amp: f64, eps: f64, g: RealPolynomial, den: RealPolynomial },
    Frozen(f64),
}

/// Allowed interval of `q` among the real roots of `num` (sign of `num/den`
/// decides), or a frozen coordinate on a multiple root. `None` when the
/// interval is unbounded.
fn bracket(p: &RationalFunction, roots: &RootList, q: f64, sigma: f64) -> Option<Motion> {
    let v = &roots.roots;
    let tol = 1e-10 * q.abs().max(1.0);
    let positive_on = |lo: f64, hi: f64| p.eval(0.5 * (lo + hi)).map(|s| s > 0.0).unwrap_or(false);
    let (lo, hi) = if let Some(j) = v.iter().position(|r| (r.value - q).abs() <= tol) {
        if v[j].multiplicity >= 2 {
            return Some(Motion::Frozen(v[j].value));
        }
        let below = (j > 0).then(|| v[j - 1].value).filter(|&lo| positive_on(lo, v[j].value));
        let above = v.get(j + 1).map(|r| r.value).filter(|&hi| positive_on(v[j].value, hi));
        match (below, above) {
            (Some(lo), _) if v[j].value - lo > 0.0 => (lo, v[j].value),
            (_, Some(hi)) => (v[j].value, hi),
            _ => return None,
        }
    } else {
        let j = v.iter().position(|r| r.value > q)?;
        if j == 0 {
            return None;
        }
        (v[j - 1].value, v[j].value)
    };
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Some(Motion::Frozen(0.5 * (lo + hi)));
    }
    let den = p.den.clone();
    let (dlo, dmid, dhi) = (den.eval(lo), den.eval(0.5 * (lo + hi)), den.eval(hi));
    if dlo * dmid <= 0.0 || dmid * dhi <= 0.0 {
        return None;
    }
    let g = -&p.num.deflate(lo).deflate(hi);
    Some(Motion::Angle { mid: 0.5 * (lo + hi), amp: 0.5 * (hi - lo), eps: sigma.signum(), g, den })
}

struct AngleField {
    motions: Vec<Motion>,
    /// State index of each angle coordinate.
    slot: Vec<Option<usize>>,
}

impl AngleField {
    fn positions(&self, y: &[f64]) -> Vec<f64> {
        self.motions
            .iter()
            .zip(&self.slot)
            .map(|(m, s)| match (m, s) {
                (Motion::Angle { mid, amp, .. }, Some(k)) => mid + amp * y[*k].sin(),
                (Motion::Frozen(v), _) => *v,
                _ => unreachable!(),
            })
            .collect()
    }

    fn rates(&self, x: f64, y: &[f64], d: &mut [f64]) -> Result<Vec<f64>> {
        let q = self.positions(y);
        check_distinct(&q, x)?;
        let mut qdot = vec![0.0; q.len()];
        for (i, (m, s)) in self.motions.iter().zip(&self.slot).enumerate() {
            if let (Motion::Angle { amp, eps, g, den, .. }, Some(k)) = (m, s) {
                let gv = g.eval(q[i]) / den.eval(q[i]);
                let th = eps * (2.0 * gv.max(0.0)).sqrt() / pi_factor(&q, i);
                d[*k] = th;
                qdot[i] = amp * y[*k].cos() * th;
            }
        }
        Ok(qdot)
    }
}

struct SecondOrderField {
    p: RationalFunction,
}

impl SecondOrderField {
    fn rates(&self, x: f64, y: &[f64], d: &mut [f64]) -> Result<()> {
        let n = y.len() / 2;
        let (q, v) = y.split_at(n);
        check_distinct(q, x)?;
        for i in 0..n {
            let pi = pi_factor(q, i);
            let mut log_rate = 0.0;
            for s in 0..n {
                if s != i {
                    log_rate += (v[i] - v[s]) / (q[i] - q[s]);
                }
            }
            let dp = self.p.eval_derivative(q[i])?;
            d[i] = v[i];
            d[n + i] = (dp / pi - v[i] * pi * log_rate) / pi;
        }
        Ok(())
    }
}

struct Recorder {
    q: Vec<Vec<f64>>,
    qdot: Vec<Vec<f64>>,
    sigma: Vec<Vec<f64>>,
    last: Vec<f64>,
}

impl Recorder {
    fn new(n: usize, count: usize, sigma0: &[f64]) -> Self {
        Self {
            q: vec![Vec::with_capacity(count); n],
            qdot: vec![Vec::with_capacity(count); n],
            sigma: vec![Vec::with_capacity(count); n],
            last: sigma0.iter().map(|s| s.signum()).collect(),
        }
    }

    /// A velocity that is exactly zero keeps the previous sign.
    fn push(&mut self, q: &[f64], v: &[f64]) {
        for i in 0..q.len() {
            let s = v[i] * pi_factor(q, i);
            if s != 0.0 {
                self.last[i] = s.signum();
            }
            self.q[i].push(q[i]);
            self.qdot[i].push(v[i]);
            self.sigma[i].push(self.last[i]);
        }
    }
}

/// Integrates the separated system from `state0` over `x_span` and samples it
/// every `dx`.
pub fn integrate(profile: &SeparableProfile, state0: &SeparationState, x_span: (f64, f64), dx: f64) -> Result<Trajectory> {
    let n = profile.n;
    if state0.q.len() != n || state0.sigma.len() != n {
        return Err(Error::Dimension { expected: n, got: state0.q.len() });
    }
    if state0.h.len() != n {
        return Err(Error::Dimension { expected: n, got: state0.h.len() });
    }
    let count = crate::systems::sample_count(x_span, dx)?;
    check_distinct(&state0.q, x_span.0)?;
    let p = allowed_product(profile, &state0.h);
    for (i, &qi) in state0.q.iter().enumerate() {
        let val = p.eval(qi)?;
        if val < -ALLOWED_SLACK {
            return Err(Error::Forbidden { index: i, ratio: val });
        }
    }
    let roots = if p.num.degree() >= 1 { real_roots(&p.num, ROOT_CLUSTER_TOL) } else { RootList::default() };
    let motions: Option<Vec<Motion>> = state0.q.iter().zip(&state0.sigma).map(|(&q, &s)| bracket(&p, &roots, q, s)).collect();

    let ode = Dopri5::new(SEPARATION_RTOL, SEPARATION_ATOL);
    let mut rec = Recorder::new(n, count, &state0.sigma);
    match motions {
        Some(motions) => {
            let mut slot = Vec::with_capacity(n);
            let mut y0 = Vec::new();
            for (m, &qi) in motions.iter().zip(&state0.q) {
                match m {
                    Motion::Angle { mid, amp, .. } => {
                        slot.push(Some(y0.len()));
                        y0.push(((qi - mid) / amp).clamp(-1.0, 1.0).asin());
                    }
                    Motion::Frozen(_) => slot.push(None),
                }
            }
            let field = AngleField { motions, slot };
            let mut scratch = vec![0.0; y0.len()];
            let v0 = field.rates(x_span.0, &y0, &mut scratch)?;
            rec.push(&field.positions(&y0), &v0);
            let mut st = Stepper::new(x_span.0, y0, initial_step(dx));
            let mut f = |x: f64, y: &[f64], d: &mut [f64]| field.rates(x, y, d).map(|_| ());
            for k in 1..count {
                ode.advance(&mut f, &mut |_| true, &mut st, x_span.0 + k as f64 * dx)?;
                for th in st.y.iter_mut() {
                    *th -= 2.0 * PI * (*th / (2.0 * PI)).round();
                }
                let v = field.rates(st.x, &st.y, &mut scratch)?;
                rec.push(&field.positions(&st.y), &v);
            }
        }
        None => {
            let field = SecondOrderField { p: p.clone() };
            let v0 = velocity_field(profile, state0)?;
            let mut y0 = state0.q.clone();
            y0.extend(&v0);
            rec.push(&state0.q, &v0);
            let mut st = Stepper::new(x_span.0, y0, initial_step(dx));
            let mut f = |x: f64, y: &[f64], d: &mut [f64]| field.rates(x, y, d);
            for k in 1..count {
                ode.advance(&mut f, &mut |_| true, &mut st, x_span.0 + k as f64 * dx)?;
                rec.push(&st.y[..n], &st.y[n..]);
            }
        }
    }
    Ok(Trajectory { x0: x_span.0, dx, q: rec.q, qdot: rec.qdot, sigma: rec.sigma, h: state0.h.clone(), label: profile.label.clone() })
}

/// `Σᵢ qᵢ` per sample.
pub fn trace_series(traj: &Trajectory) -> Vec<f64> {
    (0..traj.len()).map(|k| traj.q.iter().map(|s| s[k]).sum()).collect()
}

/// Largest `|½(q̇ᵢΠᵢ)² − f(qᵢ)R(qᵢ)|` over interior samples, `q̇` by 4th-order
/// central differences. This is the separated equation multiplied through by
/// `f`, which keeps it finite where a coordinate turns at a zero of `f`.
pub fn legendre_residual(profile: &SeparableProfile, traj: &Trajectory) -> Result<f64> {
    let m = traj.len();
    if m < 5 {
        return Err(Error::GridTooCoarse { needed: 5, have: m });
    }
    let r = rhs_polynomial(profile, &traj.h);
    let mut worst = 0.0f64;
    for k in 2..m - 2 {
        let q = traj.q_at(k);
        for i in 0..traj.n() {
            let v = fd::d1(&traj.q[i], k, traj.dx) * pi_factor(&q, i);
            let res = 0.5 * v * v - profile.f.eval(q[i])? * r.eval(q[i])?;
            worst = worst.max(res.abs());
        }
    }
    Ok(worst)
}

/// Per-sample `Ĩₖ − Hₖ` with momenta rebuilt by `momentum_from_energy`.
/// Fails with `Forbidden` if any sample leaves the allowed region.
pub fn integral_drift(profile: &SeparableProfile, traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![Vec::with_capacity(traj.len()); traj.n()];
    for k in 0..traj.len() {
        let s = traj.state_at(k);
        let p = momentum_from_energy(profile, &traj.h, &s.q, &s.sigma)?;
        let h = integrals_at(profile, &s.q, &p)?;
        for (j, (a, b)) in h.0.iter().zip(&traj.h.0).enumerate() {
            out[j].push(a - b);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{neumann_profile, NeumannSpec};

    fn n1() -> SeparableProfile {
        neumann_profile(&NeumannSpec::new(vec![1.0, 2.0]).unwrap())
    }

    #[test]
    fn velocity_examples() {
        let p = n1();
        let s = SeparationState { q: vec![1.9], sigma: vec![1.0], h: IntegralValues(vec![2.0]) };
        let v = velocity_field(&p, &s).unwrap();
        assert!((v[0] - 0.648f64.sqrt()).abs() < 1e-14);
        // Turning configuration: R(q) = 0 at q = 1.5 for H₀ = 1.5.
        let s = SeparationState { q: vec![1.5], sigma: vec![-1.0], h: IntegralValues(vec![1.5]) };
        assert_eq!(velocity_field(&p, &s).unwrap()[0], 0.0);
        let s = SeparationState { q: vec![1.5], sigma: vec![1.0], h: IntegralValues(vec![1.0]) };
        assert!(matches!(velocity_field(&p, &s), Err(Error::Forbidden { index: 0, .. })));
    }

    #[test]
    fn n1_oscillates_between_band_edges() {
        // Profile H₀ = Σa + 0 gives roots (0, 1, 2) of the spectral polynomial.
        let s = SeparationState { q: vec![1.5], sigma: vec![1.0], h: IntegralValues(vec![3.0]) };
        let t = integrate(&n1(), &s, (0.0, 20.0), 0.01).unwrap();
        let lo = t.q[0].iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = t.q[0].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo >= 1.0 - 1e-12 && hi <= 2.0 + 1e-12);
        assert!(lo - 1.0 < 1e-6 && 2.0 - hi < 1e-6, "{lo} {hi}");
        assert!(legendre_residual(&n1(), &t).unwrap() < 1e-6);
        assert_eq!(trace_series(&t), t.q[0]);
    }

    #[test]
    fn starts_from_turning_point() {
        let s = SeparationState { q: vec![2.0], sigma: vec![1.0], h: IntegralValues(vec![3.0]) };
        let t = integrate(&n1(), &s, (0.0, 1.0), 0.01).unwrap();
        assert!(t.q[0][10] < 2.0);
        assert!(t.qdot[0][10] < 0.0);
    }

    #[test]
    fn frozen_on_double_root() {
        // f·R = −4(t−1)(t−2)(t−1.5+…): choose U ≡ 0, f = (t−1)², H₀ = 1 → P = (t−1)².
        let f = RationalFunction::polynomial(RealPolynomial::from_roots(&[1.0, 1.0], 1.0));
        let p = SeparableProfile::new(1, f, RationalFunction::zero(), "sq").unwrap();
        let s = SeparationState { q: vec![1.0], sigma: vec![1.0], h: IntegralValues(vec![1.0]) };
        let t = integrate(&p, &s, (0.0, 2.0), 0.1).unwrap();
        assert!(t.q[0].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn unbracketed_profile_uses_second_order_form() {
        // f ≡ 1, U = −t²/2, H₀ = 1: P = t²/2 + 1 > 0 everywhere, no roots.
        let f = RationalFunction::polynomial(RealPolynomial::constant(1.0));
        let u = RationalFunction::polynomial(RealPolynomial::new(vec![-0.5, 0.0, 0.0]));
        let p = SeparableProfile::new(1, f, u, "free").unwrap();
        let s = SeparationState { q: vec![0.0], sigma: vec![1.0], h: IntegralValues(vec![1.0]) };
        let t = integrate(&p, &s, (0.0, 1.0), 0.01).unwrap();
        // q̇² = q² + 2 → q = √2·sinh(x)
        let last = *t.q[0].last().unwrap();
        assert!((last - 2f64.sqrt() * 1f64.sinh()).abs() < 1e-8, "{last}");
    }

    #[test]
    fn rescale_and_shift() {
        let s = SeparationState { q: vec![1.5], sigma: vec![1.0], h: IntegralValues(vec![3.0]) };
        let t = integrate(&n1(), &s, (0.0, 1.0), 0.1).unwrap();
        let r = t.rescale_time(2.0);
        assert_eq!(r.dx, 0.2);
        assert_eq!(r.qdot[0][3], t.qdot[0][3] / 2.0);
        let sh = t.shift_coordinates(-2.0, IntegralValues(vec![0.0]), "kdv");
        assert_eq!(sh.q[0][3], t.q[0][3] - 2.0);
    }
}
