//! Benenti systems as data `(N, f, U)` in diagonal coordinates.
//!
//! With `Π_i = Π_{s≠i}(qᵢ − q_s)` and the Stäckel matrix `Sᵢⱼ = qᵢ^{N−j}`, the
//! integrals are defined by
//!
//! ```text
//! Σₖ Ĩₖ qᵢ^{N−1−k} = ½ f(qᵢ) pᵢ² + U(qᵢ),
//! ```
//!
//! so `Ĩ₀ = Σᵢ (½ f(qᵢ) pᵢ² + U(qᵢ)) / Πᵢ` is the Hamiltonian and on a common
//! level set `½ f(qᵢ) pᵢ² = R(qᵢ)` with `R = −U + H₀tᴺ⁻¹ + … + H_{N−1}`.

use crate::prelude::*;
use crate::poly::{stackel_solve, RationalFunction, RealPolynomial};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableProfile {
    pub n: usize,
    pub f: RationalFunction,
    pub u: RationalFunction,
    pub label: String,
}

/// Values `H₀ … H_{N−1}` of the commuting integrals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegralValues(pub Vec<f64>);

impl IntegralValues {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `H₀tᴺ⁻¹ + … + H_{N−1}`
    pub fn polynomial(&self) -> RealPolynomial {
        RealPolynomial::new(self.0.clone())
    }
}

impl SeparableProfile {
    pub fn new(n: usize, f: RationalFunction, u: RationalFunction, label: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("profile dimension must be positive".into()));
        }
        if f.num.is_zero() {
            return Err(Error::Invalid("metric profile f vanishes identically".into()));
        }
        Ok(Self { n, f, u, label: label.into() })
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::Dimension { expected: self.n, got });
        }
        Ok(())
    }
}

/// `Π_{s≠i}(qᵢ − q_s)`
pub fn pi_factor(q: &[f64], i: usize) -> f64 {
    q.iter().enumerate().filter(|&(s, _)| s != i).map(|(_, &qs)| q[i] - qs).product()
}

pub fn integrals_at(profile: &SeparableProfile, q: &[f64], p: &[f64]) -> Result<IntegralValues> {
    profile.check_dim(q.len())?;
    profile.check_dim(p.len())?;
    let mut rhs = Vec::with_capacity(q.len());
    for (&qi, &pi) in q.iter().zip(p) {
        rhs.push(0.5 * profile.f.eval(qi)? * pi * pi + profile.u.eval(qi)?);
    }
    Ok(IntegralValues(stackel_solve(q, &rhs)?))
}

/// `R(t) = −U(t) + H₀tᴺ⁻¹ + … + H_{N−1}`
pub fn rhs_polynomial(profile: &SeparableProfile, h: &IntegralValues) -> RationalFunction {
    profile.u.scale(-1.0).add_poly(&h.polynomial())
}

/// `f·R`, whose sign decides where each coordinate may move.
pub fn allowed_product(profile: &SeparableProfile, h: &IntegralValues) -> RationalFunction {
    profile.f.mul(&rhs_polynomial(profile, h))
}

/// Rounding-level negatives of `R/f` are treated as turning points.
const FORBIDDEN_SLACK: f64 = 1e-12;

pub fn momentum_from_energy(profile: &SeparableProfile, h: &IntegralValues, q: &[f64], signs: &[f64]) -> Result<Vec<f64>> {
    profile.check_dim(q.len())?;
    profile.check_dim(signs.len())?;
    let r = rhs_polynomial(profile, h);
    let mut p = vec![0.0; q.len()];
    for (i, &qi) in q.iter().enumerate() {
        let fi = profile.f.eval(qi)?;
        if fi == 0.0 {
            return Err(Error::Pole { t: qi });
        }
        let ratio = r.eval(qi)? / fi;
        if ratio < -FORBIDDEN_SLACK {
            return Err(Error::Forbidden { index: i, ratio });
        }
        p[i] = signs[i].signum() * (2.0 * ratio.max(0.0)).sqrt();
    }
    Ok(p)
}

/// Coefficients `U₀ … U_{N−1}` with `Σₖ Uₖ qᵢ^{N−1−k} = U(qᵢ)`.
pub fn potential_coefficients(u: &RationalFunction, q: &[f64]) -> Result<Vec<f64>> {
    let rhs = q.iter().map(|&t| u.eval(t)).collect::<Result<Vec<_>>>()?;
    stackel_solve(q, &rhs)
}

/// `|{Ĩₖ, Ĩₗ}|` by central differences with step `h`.
pub fn poisson_residual(profile: &SeparableProfile, q: &[f64], p: &[f64], k: usize, l: usize, h: f64) -> Result<f64> {
    profile.check_dim(q.len())?;
    if k >= profile.n || l >= profile.n {
        return Err(Error::Invalid(format!("integral index out of range: {k}, {l}")));
    }
    if k == l {
        return Ok(0.0);
    }
    let n = q.len();
    let mut bracket = 0.0;
    let mut qq = q.to_vec();
    let mut pp = p.to_vec();
    for i in 0..n {
        qq[i] = q[i] + h;
        let a = integrals_at(profile, &qq, p)?;
        qq[i] = q[i] - h;
        let b = integrals_at(profile, &qq, p)?;
        qq[i] = q[i];
        pp[i] = p[i] + h;
        let c = integrals_at(profile, q, &pp)?;
        pp[i] = p[i] - h;
        let d = integrals_at(profile, q, &pp)?;
        pp[i] = p[i];
        let dq = |m: usize| (a.0[m] - b.0[m]) / (2.0 * h);
        let dp = |m: usize| (c.0[m] - d.0[m]) / (2.0 * h);
        bracket += dq(k) * dp(l) - dp(k) * dq(l);
    }
    Ok(bracket.abs())
}

/// Profile describing `L_new = c₁L + c₂`: `f_new(s) = c₁^{N+1} f((s − c₂)/c₁)`,
/// `U_new(s) = U((s − c₂)/c₁)`.
pub fn affine_reparam(profile: &SeparableProfile, c1: f64, c2: f64) -> Result<SeparableProfile> {
    if c1 == 0.0 {
        return Err(Error::Invalid("affine reparametrisation needs c1 != 0".into()));
    }
    let (a, b) = (1.0 / c1, -c2 / c1);
    let f = profile.f.compose_affine(a, b).scale(c1.powi(profile.n as i32 + 1));
    let u = profile.u.compose_affine(a, b);
    Ok(SeparableProfile { n: profile.n, f, u, label: profile.label.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{neumann_profile, NeumannSpec};

    fn poly(c: &[f64]) -> RationalFunction {
        RationalFunction::polynomial(RealPolynomial::new(c.to_vec()))
    }

    fn neumann(a: &[f64]) -> SeparableProfile {
        neumann_profile(&NeumannSpec::new(a.to_vec()).unwrap())
    }

    #[test]
    fn integrals_n1_neumann() {
        // ½·f(1.5)·1² + U(1.5) = ½ + 1.5
        let h = integrals_at(&neumann(&[1.0, 2.0]), &[1.5], &[1.0]).unwrap();
        assert!((h.0[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn integrals_homogeneous_and_flat() {
        let flat = SeparableProfile::new(2, poly(&[1.0]), poly(&[]), "flat").unwrap();
        assert_eq!(integrals_at(&flat, &[1.0, 2.0], &[0.0, 0.0]).unwrap().0, vec![0.0, 0.0]);
        let h = integrals_at(&flat, &[1.0, 2.0], &[2.0f64.sqrt(), 2.0]).unwrap();
        assert!((h.0[0] - 1.0).abs() < 1e-14 && h.0[1].abs() < 1e-14, "{h:?}");
    }

    #[test]
    fn rhs_examples() {
        let p = neumann(&[1.0, 2.0]);
        let r = rhs_polynomial(&p, &IntegralValues(vec![0.0]));
        assert_eq!(r.num.coeffs(), &[1.0, -3.0]);
        let r = rhs_polynomial(&p, &IntegralValues(vec![1.0]));
        assert_eq!(r.num.coeffs(), &[1.0, -2.0]);
        let z = SeparableProfile::new(2, poly(&[1.0]), poly(&[]), "z").unwrap();
        assert!(rhs_polynomial(&z, &IntegralValues(vec![0.0, 0.0])).num.is_zero());
    }

    #[test]
    fn momentum_examples() {
        let p = neumann(&[1.0, 2.0]);
        let h1 = IntegralValues(vec![1.0]);
        assert!(matches!(momentum_from_energy(&p, &h1, &[1.5], &[1.0]), Err(Error::Forbidden { index: 0, .. })));
        assert!(matches!(momentum_from_energy(&p, &h1, &[1.9], &[1.0]), Err(Error::Forbidden { index: 0, .. })));
        let m = momentum_from_energy(&p, &IntegralValues(vec![2.0]), &[1.9], &[1.0]).unwrap();
        assert!((m[0] - 5.0f64.sqrt()).abs() < 1e-12);
        let turning = momentum_from_energy(&p, &IntegralValues(vec![1.5]), &[1.5], &[-1.0]).unwrap();
        assert_eq!(turning[0].abs(), 0.0);
        assert!(matches!(momentum_from_energy(&p, &h1, &[1.0], &[1.0]), Err(Error::Pole { .. })));
    }

    #[test]
    fn potential_coefficient_examples() {
        assert_eq!(potential_coefficients(&poly(&[2.0, 1.0]), &[3.0]).unwrap(), vec![7.0]);
        let c = potential_coefficients(&poly(&[1.0, 0.0, 0.0]), &[0.0, 1.0]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15 && c[1].abs() < 1e-15);
        let c = potential_coefficients(&poly(&[4.5]), &[0.3, 1.1, 2.9]).unwrap();
        assert!(c[0].abs() < 1e-13 && c[1].abs() < 1e-13 && (c[2] - 4.5).abs() < 1e-13);
    }

    #[test]
    fn poisson_examples() {
        let p2 = neumann(&[1.0, 2.0, 3.0]);
        let q = [1.5, 2.5];
        let p = [0.3, -0.2];
        assert_eq!(poisson_residual(&p2, &q, &p, 1, 1, 1e-4).unwrap(), 0.0);
        assert!(poisson_residual(&p2, &q, &p, 0, 1, 1e-4).unwrap() < 1e-6);
        let p1 = neumann(&[1.0, 2.0]);
        assert_eq!(poisson_residual(&p1, &[1.5], &[0.7], 0, 0, 1e-4).unwrap(), 0.0);
        let cubic = SeparableProfile::new(2, poly(&[1.0]), poly(&[1.0, 0.0, 0.0, 0.0]), "c").unwrap();
        assert!(poisson_residual(&cubic, &q, &p, 0, 1, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn affine_examples() {
        let p = neumann(&[1.0, 2.0]);
        assert_eq!(affine_reparam(&p, 1.0, 0.0).unwrap(), p);
        let one = SeparableProfile::new(1, poly(&[1.0]), poly(&[1.0, 0.0]), "x").unwrap();
        let s = affine_reparam(&one, 2.0, 0.0).unwrap();
        assert_eq!(s.f.eval(0.3).unwrap(), 4.0);
        let s = affine_reparam(&one, 1.0, 5.0).unwrap();
        assert_eq!(s.u.num.coeffs(), &[1.0, -5.0]);
    }
}
