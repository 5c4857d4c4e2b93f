//! Dormand–Prince 5(4) adaptive integrator.

use crate::prelude::*;
use crate::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on a single step; `f64::INFINITY` for none.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }
}

/// Integration state carried between calls to [`Dopri5::advance`].
#[derive(Debug, Clone)]
pub struct Stepper {
    pub x: f64,
    pub y: Vec<f64>,
    /// Suggested next step magnitude.
    pub h: f64,
    k: [Vec<f64>; 7],
    fresh: bool,
}

impl Stepper {
    pub fn new(x: f64, y: Vec<f64>, h0: f64) -> Self {
        let n = y.len();
        Self { x, y, h: h0, k: core::array::from_fn(|_| vec![0.0; n]), fresh: true }
    }
}

impl Dopri5 {
    /// Integrates from `st.x` to exactly `x_end` (either direction).
    ///
    /// `project` runs on every trial step result; returning `false` rejects the
    /// step and halves the step size.
    pub fn advance<F, P>(&self, f: &mut F, project: &mut P, st: &mut Stepper, x_end: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
        P: FnMut(&mut [f64]) -> bool,
    {
        let dir = if x_end >= st.x { 1.0 } else { -1.0 };
        let n = st.y.len();
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        if st.fresh {
            f(st.x, &st.y, &mut st.k[0])?;
            st.fresh = false;
        }
        let mut steps = 0;
        while (x_end - st.x) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepUnderflow { x: st.x });
            }
            let remaining = (x_end - st.x).abs();
            let mut h = st.h.min(self.max_step).min(remaining);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let tiny = 1e-14 * st.x.abs().max(1.0);
            if h < tiny {
                if remaining < 4.0 * tiny {
                    st.x = x_end;
                    break;
                }
                return Err(Error::StepUnderflow { x: st.x });
            }
            let hs = h * dir;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s][j] * st.k[j][i];
                    }
                    ytmp[i] = st.y[i] + hs * acc;
                }
                f(st.x + C[s] * hs, &ytmp, &mut st.k[s])?;
            }
            // Stage 7 was evaluated at the fifth-order solution.
            ynew.copy_from_slice(&ytmp);
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for s in 0..7 {
                    e += E[s] * st.k[s][i];
                }
                e *= hs;
                let sc = self.atol + self.rtol * st.y[i].abs().max(ynew[i].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                st.h = h * 0.2;
                continue;
            }
            if err <= 1.0 {
                let accepted_x = if last { x_end } else { st.x + hs };
                let mut y_proj = ynew.clone();
                if !project(&mut y_proj) {
                    st.h = h * 0.5;
                    continue;
                }
                let projected = y_proj != ynew;
                st.y = y_proj;
                st.x = accepted_x;
                if projected {
                    f(st.x, &st.y, &mut st.k[0])?;
                } else {
                    st.k.swap(0, 6);
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    st.h = h * fac;
                } else {
                    st.h = st.h.max(h * fac.min(1.0));
                }
            } else {
                st.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        Ok(())
    }

    /// Plain driver without projection.
    pub fn integrate<F>(&self, mut f: F, x0: f64, y0: Vec<f64>, x1: f64) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let mut st = Stepper::new(x0, y0, initial_step(x1 - x0));
        self.advance(&mut f, &mut |_| true, &mut st, x1)?;
        Ok(st.y)
    }
}

/// Conservative first step for a span of length `span`.
pub fn initial_step(span: f64) -> f64 {
    (span.abs() * 1e-3).clamp(1e-8, 1e-2)
}
