//! Stationary KdV layer.
//!
//! For a trajectory `q(x)` the monic polynomial `w(x; μ) = Π(μ − qᵢ(x))`
//! satisfies, identically in `μ`,
//!
//! ```text
//! C(μ) = m₀(w″w − ½w′²) + (μ − 2w₁ + b)·w²,
//! ```
//!
//! where `C` is monic of degree `2N+1` with `t^{2N}` coefficient `b`, and the
//! time is scaled so that `(q̇ᵢΠᵢ)² = −2C(qᵢ)/m₀`. Then `u = 2w₁` is a
//! stationary KdV potential.

use crate::prelude::*;

use core::f64::consts::PI;

use crate::benenti::{allowed_product, IntegralValues, SeparableProfile};
use crate::defaults::ROOT_CLUSTER_TOL;
use crate::fd;
use crate::poly::{elementary_symmetric, real_roots, RealPolynomial, RootList};
use crate::separation::Trajectory;
use crate::systems::{normalize_to_kdv, NeumannSpec};
use crate::{Error, Result};

/// `C(t)` of degree `2N+1` with positive leading coefficient, and its roots.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPolynomial {
    c: RealPolynomial,
    roots: RootList,
}

impl SpectralPolynomial {
    pub fn new(c: RealPolynomial) -> Result<Self> {
        let d = c.degree();
        if d % 2 == 0 || c.is_zero() {
            return Err(Error::Degree { expected: d + 1, got: d });
        }
        if c.leading() <= 0.0 {
            return Err(Error::Invalid(format!("leading coefficient {} is not positive", c.leading())));
        }
        let roots = real_roots(&c, ROOT_CLUSTER_TOL);
        Ok(Self { c, roots })
    }

    pub fn poly(&self) -> &RealPolynomial {
        &self.c
    }

    pub fn roots(&self) -> &RootList {
        &self.roots
    }

    pub fn n(&self) -> usize {
        (self.c.degree() - 1) / 2
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c.eval(t)
    }

    /// `t^{2N}` coefficient divided by the leading one.
    pub fn b(&self) -> f64 {
        self.c.coeff(self.c.degree() - 1) / self.c.leading()
    }

    /// Sorted roots with multiplicity; `NonRealRoots` unless all are real.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        if !self.roots.all_real() {
            return Err(Error::NonRealRoots { count: self.roots.nonreal });
        }
        let r = self.roots.expanded();
        if r.len() != self.c.degree() {
            return Err(Error::RootCount { expected: self.c.degree(), found: r.len() });
        }
        Ok(r)
    }
}

/// `C(t) = ½(tᴺ + H₀tᴺ⁻¹ + … + H_{N−1})·Π(t − aₛ)`.
///
/// The integral values here are those of the reduced Neumann form, whose
/// potential lacks the `tᴺ⁻¹Σa` term; see [`reduced_integrals`].
pub fn spectral_from_neumann(spec: &NeumannSpec, h: &IntegralValues) -> Result<SpectralPolynomial> {
    let s = SpectralPolynomial::new(neumann_spectral_coefficients(spec, h)?)?;
    s.real_roots()?;
    Ok(s)
}

/// The polynomial of [`spectral_from_neumann`] without the reality check.
pub fn neumann_spectral_coefficients(spec: &NeumannSpec, h: &IntegralValues) -> Result<RealPolynomial> {
    let n = spec.n();
    if h.len() != n {
        return Err(Error::Dimension { expected: n, got: h.len() });
    }
    let mut head = vec![1.0];
    head.extend(&h.0);
    Ok(&RealPolynomial::new(head) * &RealPolynomial::from_roots(spec.a(), 0.5))
}

/// Neumann-profile integral values (potential `−tᴺ + tᴺ⁻¹Σa`) converted to
/// the reduced form used by [`spectral_from_neumann`]: `H₀ ↦ H₀ − Σa`.
pub fn reduced_integrals(spec: &NeumannSpec, h: &IntegralValues) -> IntegralValues {
    let mut out = h.clone();
    if let Some(h0) = out.0.first_mut() {
        *h0 -= spec.sum();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interlacing {
    pub holds: bool,
    /// `min(qᵢ − r_{2i}, r_{2i+1} − qᵢ)`, negative when violated.
    pub margins: Vec<f64>,
}

/// `r_{2i} ≤ qᵢ ≤ r_{2i+1}` for the sorted roots `r₁ ≤ … ≤ r_{2N+1}`.
pub fn interlacing_check(c: &SpectralPolynomial, q: &[f64]) -> Result<Interlacing> {
    let r = c.real_roots()?;
    let n = c.n();
    if q.len() != n {
        return Err(Error::Dimension { expected: n, got: q.len() });
    }
    let margins: Vec<f64> = q.iter().enumerate().map(|(i, &qi)| (qi - r[2 * i + 1]).min(r[2 * i + 2] - qi)).collect();
    Ok(Interlacing { holds: margins.iter().all(|&m| m >= 0.0), margins })
}

/// `w(x; μ)`, `u = 2w₁` and the underlying coordinates on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvTrace {
    pub x0: f64,
    pub dx: f64,
    /// `w[k][j]` is `w_{k+1}` at sample `j`.
    pub w: Vec<Vec<f64>>,
    pub u: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub qdot: Vec<Vec<f64>>,
    pub m0: f64,
    pub c: SpectralPolynomial,
}

impl KdvTrace {
    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn x_at(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x_at(self.len().saturating_sub(1))
    }

    /// `u′ = −2Σq̇ᵢ` from the stored velocities.
    pub fn du(&self, j: usize) -> f64 {
        -2.0 * self.qdot.iter().map(|s| s[j]).sum::<f64>()
    }

    /// `w(x_j; λ)` and its `x`-derivative.
    pub fn w_at(&self, j: usize, lambda: f64) -> (f64, f64) {
        let n = self.n();
        let mut w = 1.0;
        let mut dw = 0.0;
        for i in 0..n {
            let f = lambda - self.q[i][j];
            dw = dw * f - self.qdot[i][j] * w;
            w *= f;
        }
        (w, dw)
    }
}

/// `wₖ = elementary_symmetric(q)ₖ`, `u = 2w₁`; `c` must be monic in the
/// trajectory's coordinate and time.
pub fn kdv_trace(traj: &Trajectory, m0: f64, c: SpectralPolynomial) -> KdvTrace {
    let n = traj.n();
    let m = traj.len();
    let mut w = vec![Vec::with_capacity(m); n];
    let mut u = Vec::with_capacity(m);
    for j in 0..m {
        let e = elementary_symmetric(&traj.q_at(j));
        u.push(2.0 * e[0]);
        for (k, v) in e.into_iter().enumerate() {
            w[k].push(v);
        }
    }
    KdvTrace { x0: traj.x0, dx: traj.dx, w, u, q: traj.q.clone(), qdot: traj.qdot.clone(), m0, c }
}

/// Trace of a trajectory of `profile` whose product `f·R` is a polynomial of
/// odd degree: time rescaled by `√scale` from [`normalize_to_kdv`], coordinates
/// kept, `C` the monic `C_norm(t − shift)`.
pub fn kdv_trace_native(profile: &SeparableProfile, traj: &Trajectory) -> Result<KdvTrace> {
    let product = allowed_product(profile, &traj.h)
        .as_polynomial()
        .ok_or_else(|| Error::Invalid("f·R is not a polynomial".into()))?;
    let norm = normalize_to_kdv(&product)?;
    let c = SpectralPolynomial::new(norm.c_native())?;
    Ok(kdv_trace(&traj.rescale_time(norm.time_factor()), norm.m0, c))
}

/// `2N+4` Chebyshev points on `[r₁ − 1, r_{2N+1} + 1]`.
pub fn default_mu_grid(c: &SpectralPolynomial) -> Vec<f64> {
    let v = c.roots().values();
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (-1.0, 1.0) };
    let k = 2 * c.n() + 4;
    (0..k)
        .map(|i| {
            let t = ((2 * i + 1) as f64 * PI / (2 * k) as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

/// Max over interior samples and `mu_grid` of `|LHS − RHS| / max(1, |C(μ)|)`.
pub fn base1_residual(trace: &KdvTrace, mu_grid: &[f64]) -> Result<f64> {
    let m = trace.len();
    if m < 5 {
        return Err(Error::GridTooCoarse { needed: 5, have: m });
    }
    let n = trace.n();
    let b = trace.c.b();
    let lead = trace.c.poly().leading();
    let mut worst = 0.0f64;
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for j in 2..m - 2 {
        for k in 0..n {
            d1[k] = fd::d1(&trace.w[k], j, trace.dx);
            d2[k] = fd::d2(&trace.w[k], j, trace.dx);
        }
        let w1 = trace.w[0][j];
        for &mu in mu_grid {
            let (mut w, mut wp, mut wpp) = (1.0, 0.0, 0.0);
            for k in 0..n {
                w = w * mu + trace.w[k][j];
                wp = wp * mu + d1[k];
                wpp = wpp * mu + d2[k];
            }
            let lhs = trace.c.eval(mu) / lead;
            let rhs = trace.m0 * (wpp * w - 0.5 * wp * wp) + (mu - 2.0 * w1 + b) * w * w;
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    /// Coefficient of `u′`; `None` when `u′ ≡ 0`.
    pub c: Option<f64>,
    pub residual: f64,
}

/// Least-squares `c` in `−½u‴ + (3/2)uu′ + c·u′ = 0` and the post-fit max residual.
pub fn stationarity_check_n1(trace: &KdvTrace) -> Result<Stationarity> {
    stationarity_of(&trace.u, trace.dx, trace.n())
}

fn stationarity_of(u: &[f64], dx: f64, n: usize) -> Result<Stationarity> {
    if n != 1 {
        return Err(Error::Dimension { expected: 1, got: n });
    }
    let m = u.len();
    if m < 7 {
        return Err(Error::GridTooCoarse { needed: 7, have: m });
    }
    let rows: Vec<(f64, f64)> = (3..m - 3)
        .map(|j| {
            let up = fd::d1(u, j, dx);
            (-0.5 * fd::d3(u, j, dx) + 1.5 * u[j] * up, up)
        })
        .collect();
    let num: f64 = rows.iter().map(|(r, up)| r * up).sum();
    let den: f64 = rows.iter().map(|(_, up)| up * up).sum();
    let scale = u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let c = (den.sqrt() > 1e-12 * scale * (rows.len() as f64).sqrt()).then(|| -num / den);
    let residual = rows.iter().map(|(r, up)| (r + c.unwrap_or(0.0) * up).abs()).fold(0.0, f64::max);
    Ok(Stationarity { c, residual })
}
