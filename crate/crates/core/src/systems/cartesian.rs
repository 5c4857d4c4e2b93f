use crate::prelude::*;

use super::{cartesian_to_sphero_conical, separation_state_from_cartesian, NeumannSpec};
use crate::benenti::IntegralValues;
use crate::poly::RealPolynomial;
use crate::defaults::{CARTESIAN_ATOL, CARTESIAN_RTOL, CONSTRAINT_TOL};
use crate::ode::{initial_step, Dopri5, Stepper};
use crate::separation::{integrate, trace_series};
use crate::{Error, Result};

/// Point `X` on the unit sphere with tangent velocity `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl CartesianState {
    /// Checks `|X|² = 1` and `X·V = 0` to within 1e−10.
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::Dimension { expected: x.len(), got: v.len() });
        }
        let s = Self { x, v };
        let (norm, tang) = s.constraint_defect();
        if norm > 1e-10 || tang > 1e-10 {
            return Err(Error::Invalid(format!("state off the constraint: ||X|²−1| = {norm:e}, |X·V| = {tang:e}")));
        }
        Ok(s)
    }

    /// Integral values of the Neumann profile (κ = 1) in Cartesian form:
    /// `R(t) = Σₖ Fₖ·Π_{j≠k}(t − aⱼ)` with
    /// `Fₖ = Xₖ² + ½Σ_{j≠k} (XₖVⱼ − XⱼVₖ)²/(aₖ − aⱼ)`.
    /// Free of the `1/f` singularity of the momentum route at `Xⱼ = 0`.
    pub fn integrals(&self, spec: &NeumannSpec) -> IntegralValues {
        let a = spec.a();
        let n = spec.n();
        let mut r = RealPolynomial::zero();
        for k in 0..=n {
            let mut fk = self.x[k] * self.x[k];
            for j in 0..=n {
                if j != k {
                    let l = self.x[k] * self.v[j] - self.x[j] * self.v[k];
                    fk += 0.5 * l * l / (a[k] - a[j]);
                }
            }
            let others: Vec<f64> = (0..=n).filter(|&j| j != k).map(|j| a[j]).collect();
            r = &r + &RealPolynomial::from_roots(&others, fk);
        }
        let u = &RealPolynomial::monomial(-1.0, n) + &RealPolynomial::monomial(spec.sum(), n - 1);
        let h = &r + &u;
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = h.coeff(n - 1 - i);
        }
        IntegralValues(out)
    }

    fn constraint_defect(&self) -> (f64, f64) {
        let n2: f64 = self.x.iter().map(|v| v * v).sum();
        let xv: f64 = self.x.iter().zip(&self.v).map(|(a, b)| a * b).sum();
        ((n2 - 1.0).abs(), xv.abs())
    }

    /// `½|V|² + κ·X·AX`
    pub fn energy(&self, spec: &NeumannSpec, kappa: f64) -> f64 {
        let kin: f64 = self.v.iter().map(|v| v * v).sum::<f64>() * 0.5;
        let pot: f64 = self.x.iter().zip(spec.a()).map(|(x, a)| a * x * x).sum();
        kin + kappa * pot
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianTrajectory {
    pub x0: f64,
    pub dx: f64,
    pub states: Vec<CartesianState>,
}

impl CartesianTrajectory {
    pub fn x_at(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }
}

fn project(y: &mut [f64]) -> bool {
    let m = y.len() / 2;
    let (x, v) = y.split_at_mut(m);
    let n2: f64 = x.iter().map(|a| a * a).sum();
    let xv: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    if (n2 - 1.0).abs() > CONSTRAINT_TOL || xv.abs() > CONSTRAINT_TOL {
        return false;
    }
    let r = n2.sqrt();
    for a in x.iter_mut() {
        *a /= r;
    }
    let xv: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    for (b, a) in v.iter_mut().zip(x.iter()) {
        *b -= xv * a;
    }
    true
}

/// `Ẍ = −2κAX + λX` with `λ = 2κ(X·AX) − |V|²`, projected back onto the
/// constraint after every accepted step; a step whose constraint defect
/// exceeds 1e−8 is rejected and retried with a smaller step.
pub fn integrate_cartesian(
    spec: &NeumannSpec,
    state0: &CartesianState,
    x_span: (f64, f64),
    dx: f64,
    kappa: f64,
) -> Result<CartesianTrajectory> {
    let a = spec.a().to_vec();
    let m = a.len();
    if state0.x.len() != m {
        return Err(Error::Dimension { expected: m, got: state0.x.len() });
    }
    let count = sample_count(x_span, dx)?;
    let mut rhs = |_: f64, y: &[f64], d: &mut [f64]| {
        let (x, v) = y.split_at(m);
        let xax: f64 = x.iter().zip(&a).map(|(x, a)| a * x * x).sum();
        let vv: f64 = v.iter().map(|v| v * v).sum();
        let lam = 2.0 * kappa * xax - vv;
        for i in 0..m {
            d[i] = v[i];
            d[m + i] = -2.0 * kappa * a[i] * x[i] + lam * x[i];
        }
        Ok(())
    };
    let ode = Dopri5::new(CARTESIAN_RTOL, CARTESIAN_ATOL);
    let mut y0 = state0.x.clone();
    y0.extend(&state0.v);
    let mut st = Stepper::new(x_span.0, y0, initial_step(dx));
    let mut states = Vec::with_capacity(count);
    states.push(state0.clone());
    for k in 1..count {
        ode.advance(&mut rhs, &mut project, &mut st, x_span.0 + k as f64 * dx)?;
        states.push(CartesianState { x: st.y[..m].to_vec(), v: st.y[m..].to_vec() });
    }
    Ok(CartesianTrajectory { x0: x_span.0, dx, states })
}

pub(crate) fn sample_count(x_span: (f64, f64), dx: f64) -> Result<usize> {
    if !(dx > 0.0) || !(x_span.1 > x_span.0) {
        return Err(Error::Invalid(format!("bad grid: span {:?}, dx {dx}", x_span)));
    }
    Ok(((x_span.1 - x_span.0) / dx).round() as usize + 1)
}

const CALIBRATION_DX: f64 = 0.05;

fn mismatch(spec: &NeumannSpec, reference: &[f64], state: &CartesianState, span: f64, kappa: f64) -> Result<f64> {
    let cart = integrate_cartesian(spec, state, (0.0, span), CALIBRATION_DX, kappa)?;
    let mut acc = 0.0;
    for (s, r) in cart.states.iter().zip(reference) {
        let q = cartesian_to_sphero_conical(spec, &s.x)?;
        let d = q.iter().sum::<f64>() - r;
        acc += d * d;
    }
    Ok((acc / reference.len() as f64).sqrt())
}

/// Potential scale κ for which the Cartesian flow reproduces the separated
/// Neumann flow started from the same state: a coarse logarithmic scan of
/// `[0.1, 10]` followed by golden-section refinement of the RMS mismatch of
/// `Σqᵢ` over `[0, span]`.
pub fn calibrate_kappa(spec: &NeumannSpec, state: &CartesianState, span: f64) -> Result<f64> {
    let profile = super::neumann_profile(spec);
    let sep = integrate(&profile, &separation_state_from_cartesian(spec, state)?, (0.0, span), CALIBRATION_DX)?;
    let reference = trace_series(&sep);
    let cost = |k: f64| mismatch(spec, &reference, state, span, k);
    let grid: Vec<f64> = (0..=40).map(|i| 10f64.powf(-1.0 + i as f64 * 0.05)).collect();
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (i, &k) in grid.iter().enumerate() {
        let c = cost(k)?;
        if c < best_cost {
            best_cost = c;
            best = i;
        }
    }
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    for _ in 0..60 {
        if (hi - lo).abs() < 1e-9 {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = cost(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = cost(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}
