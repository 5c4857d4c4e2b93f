//! Hill operators `ψ″ + ½(σ/m)ψ = 0`, `σ = λ − u + b`, built from a
//! [`KdvTrace`], their explicit eigenfunctions and band spectra.
//!
//! Spectrum means: λ for which a bounded non-zero solution exists. The bands
//! are `[r₁, r₂] ∪ … ∪ [r_{2N−1}, r_{2N}] ∪ [r_{2N+1}, ∞)` for the sorted roots
//! of `C`. Two independent checks are provided: the Floquet discriminant
//! for periodic traces and a renormalized growth exponent otherwise.

use crate::prelude::*;
use crate::defaults::{GROWTH_BAND_THRESHOLD, GROWTH_GAP_THRESHOLD, GROWTH_WINDOW, HILL_ATOL, HILL_RTOL};
use crate::fd;
use crate::kdv::{KdvTrace, SpectralPolynomial};
use crate::ode::{Dopri5, Stepper};
use crate::poly::RootList;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub roots: RootList,
    /// Closed intervals; the last one ends at `+∞`.
    pub bands: Vec<(f64, f64)>,
}

impl BandStructure {
    pub fn contains(&self, lambda: f64) -> bool {
        self.bands.iter().any(|&(lo, hi)| lo <= lambda && lambda <= hi)
    }
}

pub fn band_structure(c: &SpectralPolynomial) -> Result<BandStructure> {
    let r = c.real_roots()?;
    let mut bands: Vec<(f64, f64)> = r.chunks(2).filter(|p| p.len() == 2).map(|p| (p[0], p[1])).collect();
    bands.push((r[r.len() - 1], f64::INFINITY));
    Ok(BandStructure { roots: c.roots().clone(), bands })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Explicit,
    NumericIvp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillSolution {
    pub x0: f64,
    pub dx: f64,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub lambda: f64,
    pub construction: Construction,
}

impl HillSolution {
    pub fn x_grid(&self) -> Vec<f64> {
        (0..self.psi.len()).map(|j| self.x0 + j as f64 * self.dx).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn index_range(trace: &KdvTrace, interval: (f64, f64)) -> Result<(usize, usize)> {
    let m = trace.len() as f64;
    let ja = ((interval.0 - trace.x0) / trace.dx).round();
    let jb = ((interval.1 - trace.x0) / trace.dx).round();
    if !(ja >= 0.0 && jb < m && ja < jb) {
        return Err(Error::Invalid(format!("interval {:?} outside trace [{}, {}]", interval, trace.x0, trace.x_end())));
    }
    Ok((ja as usize, jb as usize))
}

/// `φ(x) = ∫_{x_a}^{x} ds / (2w(s; λ))` on the samples of `interval`, by
/// the end-corrected trapezoid rule (fourth order).
pub fn phi_primitive(trace: &KdvTrace, lambda: f64, interval: (f64, f64)) -> Result<Vec<f64>> {
    let (ja, jb) = index_range(trace, interval)?;
    let (w0, _) = trace.w_at(ja, lambda);
    let mut phi = Vec::with_capacity(jb - ja + 1);
    phi.push(0.0);
    let h = trace.dx;
    let g = |j: usize| -> Result<(f64, f64)> {
        let (w, dw) = trace.w_at(j, lambda);
        if w == 0.0 || w.signum() != w0.signum() {
            return Err(Error::SignChange { x: trace.x_at(j) });
        }
        Ok((0.5 / w, -0.5 * dw / (w * w)))
    };
    let mut prev = g(ja)?;
    for j in ja + 1..=jb {
        let next = g(j)?;
        let last = *phi.last().unwrap();
        phi.push(last + 0.5 * h * (prev.0 + next.0) + h * h / 12.0 * (prev.1 - next.1));
        prev = next;
    }
    Ok(phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKind {
    /// `−2C/m = k² > 0`: `√|w|·e^{±kφ}`.
    Exponential { k: f64 },
    /// `−2C/m = −κ² < 0`: `√|w|·cos κφ`, `√|w|·sin κφ`.
    Oscillatory { kappa: f64 },
    /// `C(λ) = 0`: the single solution `√|w|`.
    Edge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitPair {
    pub kind: PairKind,
    pub psi1: HillSolution,
    pub psi2: Option<HillSolution>,
}

/// Explicit solutions on an interval where `w(x; λ)` keeps its sign `s`.
/// With `v = |w|` and `φ_v = s·φ`: the exponential pair is `√v·e^{kφ_v}` and
/// `s·√v·e^{−kφ_v}`, so that `ψ₁ψ₂ = w`.
pub fn explicit_pair(trace: &KdvTrace, lambda: f64, m: f64, interval: (f64, f64)) -> Result<ExplicitPair> {
    if m == 0.0 {
        return Err(Error::Invalid("m must be nonzero".into()));
    }
    let phi = phi_primitive(trace, lambda, interval)?;
    let (ja, jb) = index_range(trace, interval)?;
    let s = trace.w_at(ja, lambda).0.signum();
    let cval = trace.c.eval(lambda) / trace.c.poly().leading();
    let k2 = -2.0 * cval / m;
    let zero_tol = 1e-12 * trace.c.poly().norm_inf() / trace.c.poly().leading();
    let kind = if cval.abs() <= zero_tol {
        PairKind::Edge
    } else if k2 > 0.0 {
        PairKind::Exponential { k: k2.sqrt() }
    } else {
        PairKind::Oscillatory { kappa: (-k2).sqrt() }
    };
    // ψ = √v·g(φ_v) ⇒ ψ′ = (v′·g + g′)/(2√v)
    let build = |g: &dyn Fn(f64) -> (f64, f64)| {
        let mut psi = Vec::with_capacity(jb - ja + 1);
        let mut dpsi = Vec::with_capacity(jb - ja + 1);
        for (o, j) in (ja..=jb).enumerate() {
            let (w, dw) = trace.w_at(j, lambda);
            let (v, dv) = (w.abs(), s * dw);
            let (gv, dg) = g(s * phi[o]);
            psi.push(v.sqrt() * gv);
            dpsi.push((dv * gv + dg) / (2.0 * v.sqrt()));
        }
        HillSolution { x0: trace.x_at(ja), dx: trace.dx, psi, dpsi, lambda, construction: Construction::Explicit }
    };
    let (psi1, psi2) = match kind {
        PairKind::Exponential { k } => (
            build(&|p| ((k * p).exp(), k * (k * p).exp())),
            Some(build(&|p| (s * (-k * p).exp(), -s * k * (-k * p).exp()))),
        ),
        PairKind::Oscillatory { kappa } => (
            build(&|p| ((kappa * p).cos(), -kappa * (kappa * p).sin())),
            Some(build(&|p| ((kappa * p).sin(), kappa * (kappa * p).cos()))),
        ),
        PairKind::Edge => (build(&|_| (1.0, 0.0)), None),
    };
    Ok(ExplicitPair { kind, psi1, psi2 })
}

/// Signed `√|w(x; λ)|` over the whole trace for λ at a root of `C`. The sign
/// flips whenever a coordinate turns at λ.
pub fn band_edge_solution(trace: &KdvTrace, lambda: f64) -> Result<HillSolution> {
    let r = trace.c.real_roots()?;
    let tol = 1e-8 * lambda.abs().max(1.0);
    let mut flips = Vec::new();
    let mut turning = None;
    for i in 0..trace.n() {
        let (lo, hi) = (r[2 * i + 1], r[2 * i + 2]);
        let dir = if (lambda - hi).abs() <= tol {
            1.0
        } else if (lambda - lo).abs() <= tol {
            -1.0
        } else {
            continue;
        };
        turning = Some((i, dir, 0.5 * (hi - lo)));
        let v = &trace.qdot[i];
        for j in 0..trace.len() - 1 {
            if dir * v[j] > 0.0 && dir * v[j + 1] <= 0.0 {
                flips.push(trace.x_at(j) + trace.dx * v[j] / (v[j] - v[j + 1]));
            }
        }
    }
    flips.sort_by(f64::total_cmp);
    let mut psi = Vec::with_capacity(trace.len());
    let mut sign = 1.0;
    let mut next = 0;
    for j in 0..trace.len() {
        let x = trace.x_at(j);
        while next < flips.len() && flips[next] < x {
            sign = -sign;
            next += 1;
        }
        psi.push(sign * trace.w_at(j, lambda).0.abs().sqrt());
    }
    // Near the turning coordinate qᵢ, write ψ = ±√|λ − qᵢ|·√|Wᵢ| and use
    // q̇ᵢ²Dᵢ² = −2C(qᵢ)/(m₀·lead), Dᵢ = Π_{j≠i}(qᵢ − qⱼ): both √|λ − qᵢ| and
    // its slope then come from q̇ᵢ, which passes through zero linearly.
    let deflated = trace.c.poly().deflate(lambda);
    let kappa = 2.0 / (trace.m0 * trace.c.poly().leading()).abs();
    let mut dpsi = Vec::with_capacity(trace.len());
    for j in 0..trace.len() {
        match turning {
            Some((i, dir, half)) if (lambda - trace.q[i][j]).abs() < half => {
                let (qi, vi) = (trace.q[i][j], trace.qdot[i][j]);
                let (mut big_w, mut dbig_w, mut d) = (1.0, 0.0, 1.0);
                for k in (0..trace.n()).filter(|&k| k != i) {
                    let f = lambda - trace.q[k][j];
                    dbig_w = dbig_w * f - trace.qdot[k][j] * big_w;
                    big_w *= f;
                    d *= qi - trace.q[k][j];
                }
                let root = (kappa * deflated.eval(qi)).abs().sqrt();
                let orient = psi[j].signum() * vi.signum();
                let gap = orient * vi * d.abs() / root;
                let dgap = -dir * orient * root / (2.0 * d.abs());
                let sw = big_w.abs().sqrt();
                psi[j] = gap * sw;
                dpsi.push(dgap * sw + gap * big_w.signum() * dbig_w / (2.0 * sw));
            }
            _ => {
                let (w, dw) = trace.w_at(j, lambda);
                dpsi.push(psi[j].signum() * w.signum() * dw / (2.0 * w.abs().sqrt()));
            }
        }
    }
    Ok(HillSolution { x0: trace.x0, dx: trace.dx, psi, dpsi, lambda, construction: Construction::Explicit })
}

/// `max |ψ″ + ½(σ/m₀)ψ| / (1 + max|ψ|)` over interior samples, with `ψ″`
/// the 4th-order derivative of the stored `ψ′`. The mismatch between `ψ′`
/// and the derivative of `ψ` enters the maximum as well.
pub fn hill_residual(sol: &HillSolution, trace: &KdvTrace, lambda: f64) -> Result<f64> {
    let m = sol.psi.len();
    if m < 5 {
        return Err(Error::GridTooCoarse { needed: 5, have: m });
    }
    let off = ((sol.x0 - trace.x0) / trace.dx).round();
    if off < 0.0 || off as usize + m > trace.len() || (sol.dx - trace.dx).abs() > 1e-12 * trace.dx {
        return Err(Error::Invalid("solution grid is not aligned with the trace".into()));
    }
    let off = off as usize;
    let b = trace.c.b();
    let scale = 1.0 + sol.max_abs();
    let mut worst = 0.0f64;
    for j in 2..m - 2 {
        let sigma = lambda - trace.u[off + j] + b;
        let r = fd::d1(&sol.dpsi, j, sol.dx) + 0.5 * sigma / trace.m0 * sol.psi[j];
        let slope = fd::d1(&sol.psi, j, sol.dx) - sol.dpsi[j];
        worst = worst.max(r.abs().max(slope.abs()) / scale);
    }
    Ok(worst)
}

/// Cubic Hermite interpolant of `u` from `u` and `u′ = −2Σq̇`.
fn u_interp(trace: &KdvTrace, x: f64) -> f64 {
    let last = trace.len() - 2;
    let t = (x - trace.x0) / trace.dx;
    let j = (t.floor().max(0.0) as usize).min(last);
    let s = t - j as f64;
    let h = trace.dx;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * trace.u[j]
        + (s3 - 2.0 * s2 + s) * h * trace.du(j)
        + (-2.0 * s3 + 3.0 * s2) * trace.u[j + 1]
        + (s3 - s2) * h * trace.du(j + 1)
}

/// Advances solutions stored as `[ψ, ψ′, ψ, ψ′, …]` from `xa` to `xb`,
/// stopping at every grid point so each step sees one interpolation cell.
/// `visit` is called at each grid point reached.
fn propagate(
    trace: &KdvTrace,
    lambda: f64,
    y: Vec<f64>,
    xa: f64,
    xb: f64,
    visit: &mut dyn FnMut(f64, &mut [f64]),
) -> Result<Vec<f64>> {
    if trace.len() < 2 {
        return Err(Error::GridTooCoarse { needed: 2, have: trace.len() });
    }
    let slack = 1e-9 * trace.dx;
    if xa < trace.x0 - slack || xb > trace.x_end() + slack || xb < xa {
        return Err(Error::Invalid(format!("propagation range [{xa}, {xb}] outside trace")));
    }
    let b = trace.c.b();
    let m0 = trace.m0;
    let mut f = |x: f64, y: &[f64], d: &mut [f64]| {
        let k = -0.5 * (lambda - u_interp(trace, x) + b) / m0;
        for p in 0..y.len() / 2 {
            d[2 * p] = y[2 * p + 1];
            d[2 * p + 1] = k * y[2 * p];
        }
        Ok(())
    };
    let ode = Dopri5::new(HILL_RTOL, HILL_ATOL);
    let mut st = Stepper::new(xa, y, trace.dx.min(xb - xa).max(1e-6) * 0.5);
    let mut j = ((xa - trace.x0) / trace.dx).floor() as usize + 1;
    loop {
        let target = trace.x_at(j).min(xb);
        if target > st.x {
            ode.advance(&mut f, &mut |_| true, &mut st, target)?;
        }
        if target >= xb {
            break;
        }
        visit(target, &mut st.y);
        j += 1;
    }
    Ok(st.y)
}

/// Numerical solution from `(ψ, ψ′)` at the start of `interval`, sampled on
/// the trace grid.
pub fn solve_ivp(trace: &KdvTrace, lambda: f64, psi0: f64, dpsi0: f64, interval: (f64, f64)) -> Result<HillSolution> {
    let (ja, jb) = index_range(trace, interval)?;
    let mut psi = vec![psi0];
    let mut dpsi = vec![dpsi0];
    let end = propagate(trace, lambda, vec![psi0, dpsi0], trace.x_at(ja), trace.x_at(jb), &mut |_, y| {
        psi.push(y[0]);
        dpsi.push(y[1]);
    })?;
    psi.push(end[0]);
    dpsi.push(end[1]);
    Ok(HillSolution { x0: trace.x_at(ja), dx: trace.dx, psi, dpsi, lambda, construction: Construction::NumericIvp })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period {
    pub start: f64,
    pub period: f64,
    pub cycles: usize,
}

/// Period of `u` from the maxima of `q₁` (sign changes + → − of `q̇₁`),
/// refined by Hermite interpolation of `q̇₁` and averaged; `u(x + T) = u(x)`
/// is then checked on every sample.
pub fn detect_period(trace: &KdvTrace) -> Result<Period> {
    let m = trace.len();
    if m < 8 || trace.n() == 0 {
        return Err(Error::GridTooCoarse { needed: 8, have: m });
    }
    let v = &trace.qdot[0];
    let a = fd::d1_full(v, trace.dx);
    let h = trace.dx;
    let mut times = Vec::new();
    for j in 0..m - 1 {
        if v[j] > 0.0 && v[j + 1] <= 0.0 {
            let herm = |s: f64| {
                let (s2, s3) = (s * s, s * s * s);
                (2.0 * s3 - 3.0 * s2 + 1.0) * v[j] + (s3 - 2.0 * s2 + s) * h * a[j] + (-2.0 * s3 + 3.0 * s2) * v[j + 1] + (s3 - s2) * h * a[j + 1]
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if herm(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            times.push(trace.x_at(j) + 0.5 * (lo + hi) * h);
        }
    }
    if times.len() < 2 {
        return Err(Error::Aperiodic(format!("{} maxima of q₁ in the trace", times.len())));
    }
    let cycles = times.len() - 1;
    let period = (times[cycles] - times[0]) / cycles as f64;
    let spread = times.windows(2).map(|w| (w[1] - w[0] - period).abs()).fold(0.0, f64::max);
    if spread > 1e-6 * period.max(1.0) {
        return Err(Error::Aperiodic(format!("maxima spacing varies by {spread:e}")));
    }
    let scale = trace.u.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut mismatch = 0.0f64;
    for j in 0..m {
        let x = trace.x_at(j) + period;
        if x > trace.x_end() {
            break;
        }
        mismatch = mismatch.max((u_interp(trace, x) - trace.u[j]).abs());
    }
    if mismatch > 1e-5 * scale {
        return Err(Error::Aperiodic(format!("u(x + T) − u(x) reaches {mismatch:e}")));
    }
    Ok(Period { start: times[0], period, cycles })
}

/// Trace of the monodromy matrix over `[start, start + period]`.
pub fn monodromy_trace(trace: &KdvTrace, lambda: f64, start: f64, period: f64) -> Result<f64> {
    let y = propagate(trace, lambda, vec![1.0, 0.0, 0.0, 1.0], start, start + period, &mut |_, _| {})?;
    Ok(y[0] + y[3])
}

/// `Δ(λ)`; `|Δ| ≤ 2` iff λ admits bounded solutions.
pub fn floquet_discriminant(trace: &KdvTrace, lambda: f64) -> Result<f64> {
    let p = detect_period(trace)?;
    monodromy_trace(trace, lambda, p.start, p.period)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub exponent: f64,
    /// Exponent below the band threshold: no measurable growth.
    pub bounded: bool,
}

/// Least-squares slope of `log‖Φ(x)‖` for the fundamental matrix over
/// `[x₀, x₀ + window]`, renormalizing every unit of `x`.
pub fn growth_exponent(trace: &KdvTrace, lambda: f64, window: f64) -> Result<Growth> {
    let xa = trace.x0;
    let xb = xa + window;
    let mut log_acc = 0.0;
    let mut pts = Vec::new();
    let mut mark = xa + 1.0;
    propagate(trace, lambda, vec![1.0, 0.0, 0.0, 1.0], xa, xb, &mut |x, y| {
        if x >= mark {
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            log_acc += norm.ln();
            pts.push((x, log_acc));
            y.iter_mut().for_each(|v| *v /= norm);
            mark += 1.0;
        }
    })?;
    if pts.len() < 2 {
        return Err(Error::Invalid(format!("growth window {window} shorter than two units")));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let exponent = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(Growth { exponent, bounded: exponent < GROWTH_BAND_THRESHOLD })
}

/// `√(−2C(λ)/m₀)·⟨1/(2|w|)⟩` over `[x₀, x₀ + window]`, the growth rate of the
/// explicit exponential solution when `w(·; λ)` keeps its sign.
pub fn predicted_gap_exponent(trace: &KdvTrace, lambda: f64, window: f64) -> Result<f64> {
    let c = trace.c.eval(lambda) / trace.c.poly().leading();
    let k2 = -2.0 * c / trace.m0;
    if !(k2 > 0.0) {
        return Err(Error::Invalid(format!("C({lambda}) does not give a real exponent")));
    }
    let phi = phi_primitive(trace, lambda, (trace.x0, trace.x0 + window))?;
    let span = (phi.len() - 1) as f64 * trace.dx;
    Ok(k2.sqrt() * phi.last().unwrap().abs() / span)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralClass {
    In,
    Out,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Floquet,
    Growth,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub lambda: f64,
    pub class: SpectralClass,
    pub method: Method,
    /// `Δ(λ)` or the growth exponent.
    pub value: f64,
    /// Band membership from the roots of `C`.
    pub expected: bool,
}

impl Classification {
    /// Indeterminate points agree vacuously.
    pub fn agrees(&self) -> bool {
        match self.class {
            SpectralClass::Indeterminate => true,
            SpectralClass::In => self.expected,
            SpectralClass::Out => !self.expected,
        }
    }
}

/// Per-trace state shared by all λ; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub period: Option<Period>,
    pub bands: BandStructure,
    pub edge_tol: f64,
    pub window: f64,
}

impl Classifier {
    pub fn new(trace: &KdvTrace, edge_tol: f64) -> Result<Self> {
        let bands = band_structure(&trace.c)?;
        let period = detect_period(trace).ok();
        let window = GROWTH_WINDOW.min(trace.x_end() - trace.x0);
        Ok(Self { period, bands, edge_tol, window })
    }

    pub fn classify(&self, trace: &KdvTrace, lambda: f64) -> Result<Classification> {
        let expected = self.bands.contains(lambda);
        let near_edge = self.bands.roots.roots.iter().any(|r| (r.value - lambda).abs() <= self.edge_tol);
        if near_edge {
            return Ok(Classification { lambda, class: SpectralClass::Indeterminate, method: Method::Edge, value: 0.0, expected });
        }
        let (class, method, value) = match self.period {
            Some(p) => {
                let d = monodromy_trace(trace, lambda, p.start, p.period)?;
                (if d.abs() <= 2.0 { SpectralClass::In } else { SpectralClass::Out }, Method::Floquet, d)
            }
            None => {
                let g = growth_exponent(trace, lambda, self.window)?;
                let class = if g.bounded {
                    SpectralClass::In
                } else if g.exponent > GROWTH_GAP_THRESHOLD {
                    SpectralClass::Out
                } else {
                    SpectralClass::Indeterminate
                };
                (class, Method::Growth, g.exponent)
            }
        };
        Ok(Classification { lambda, class, method, value, expected })
    }
}

pub fn classify_spectrum(trace: &KdvTrace, lambda_grid: &[f64], edge_tol: f64) -> Result<Vec<Classification>> {
    if lambda_grid.is_empty() {
        return Ok(Vec::new());
    }
    let c = Classifier::new(trace, edge_tol)?;
    lambda_grid.iter().map(|&l| c.classify(trace, l)).collect()
}
