//! Named profiles (Neumann, ellipsoid, geodesically equivalent metric,
//! stationary KdV), sphero-conical coordinates, the Cartesian Neumann
//! integrator used as an oracle, and profile matching.

use crate::prelude::*;
use crate::benenti::SeparableProfile;
use crate::poly::{RationalFunction, RealPolynomial};
use crate::{Error, Result};

mod cartesian;
mod coords;
mod matching;

pub(crate) use cartesian::sample_count;
pub use cartesian::{calibrate_kappa, integrate_cartesian, CartesianState, CartesianTrajectory};
pub use coords::{
    cartesian_from_separation, cartesian_to_sphero_conical, random_neumann_state, separation_state_from_cartesian, sphero_conical_to_cartesian,
    sphero_conical_velocity,
};
pub use matching::{match_product, match_profiles, normalize_to_kdv, KdvNormalization, MatchOutcome};

/// Parameters `0 < a₁ < … < a_{N+1}` of the Neumann potential `Σ aᵢXᵢ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSpec {
    a: Vec<f64>,
}

impl NeumannSpec {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::Invalid("Neumann system needs at least two parameters".into()));
        }
        if a[0] <= 0.0 || !a.iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid("Neumann parameters must be positive and finite".into()));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("Neumann parameters must be strictly increasing".into()));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Degrees of freedom `N = len(a) − 1`.
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    pub fn sum(&self) -> f64 {
        self.a.iter().sum()
    }
}

/// `f(t) = −4Π(t − aⱼ)`, `U(t) = −tᴺ + tᴺ⁻¹Σaⱼ`.
pub fn neumann_profile(spec: &NeumannSpec) -> SeparableProfile {
    let n = spec.n();
    let f = RealPolynomial::from_roots(spec.a(), -4.0);
    let u = &RealPolynomial::monomial(-1.0, n) + &RealPolynomial::monomial(spec.sum(), n - 1);
    SeparableProfile { n, f: RationalFunction::polynomial(f), u: RationalFunction::polynomial(u), label: "neumann".into() }
}

/// `f(t) = −4Π(t − aⱼ)/t`, `U ≡ 0`.
pub fn ellipsoid_profile(spec: &NeumannSpec) -> SeparableProfile {
    let f = RationalFunction { num: RealPolynomial::from_roots(spec.a(), -4.0), den: RealPolynomial::monomial(1.0, 1) };
    SeparableProfile { n: spec.n(), f, u: RationalFunction::zero(), label: "ellipsoid".into() }
}

/// `f(t) = −4t·Π(t − āₛ)·Πāₛ` with `āₛ = 1/aₛ`, `U ≡ 0`.
pub fn equiv_metric_profile(spec: &NeumannSpec) -> SeparableProfile {
    let abar: Vec<f64> = spec.a().iter().map(|a| 1.0 / a).collect();
    let prod: f64 = abar.iter().product();
    let mut roots = vec![0.0];
    roots.extend(&abar);
    let f = RealPolynomial::from_roots(&roots, -4.0 * prod);
    SeparableProfile { n: spec.n(), f: RationalFunction::polynomial(f), u: RationalFunction::zero(), label: "ellipsoid-equiv".into() }
}

/// `f ≡ 1`, `U(t) = (t^{2N+1} + Σ_{i=2}^{N+1} cᵢ t^{2N+1−i}) / m₀`, with
/// `c = [c₂, …, c_{N+1}]`.
pub fn kdv_profile(c: &[f64], m0: f64, n: usize) -> Result<SeparableProfile> {
    if m0 == 0.0 || !m0.is_finite() {
        return Err(Error::Invalid("m0 must be nonzero".into()));
    }
    if n == 0 || c.len() != n {
        return Err(Error::Dimension { expected: n, got: c.len() });
    }
    let mut coeffs = vec![0.0; 2 * n + 2];
    coeffs[0] = 1.0;
    coeffs[2..n + 2].copy_from_slice(c);
    let u = RealPolynomial::new(coeffs).scale(1.0 / m0);
    Ok(SeparableProfile {
        n,
        f: RationalFunction::polynomial(RealPolynomial::constant(1.0)),
        u: RationalFunction::polynomial(u),
        label: "kdv".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(NeumannSpec::new(vec![2.0, 1.0]).is_err());
        assert!(NeumannSpec::new(vec![0.0, 1.0]).is_err());
        assert!(NeumannSpec::new(vec![1.0]).is_err());
        assert_eq!(NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap().n(), 2);
    }

    #[test]
    fn neumann_profiles() {
        let p = neumann_profile(&NeumannSpec::new(vec![1.0, 2.0]).unwrap());
        assert_eq!(p.f.num.coeffs(), &[-4.0, 12.0, -8.0]);
        assert_eq!(p.u.num.coeffs(), &[-1.0, 3.0]);
        assert_eq!(p.f.eval(1.5).unwrap(), 1.0);
        let p = neumann_profile(&NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!(p.f.num.coeffs(), &[-4.0, 24.0, -44.0, 24.0]);
        assert_eq!(p.u.num.coeffs(), &[-1.0, 6.0, 0.0]);
    }

    #[test]
    fn ellipsoid_and_equivalent() {
        let spec = NeumannSpec::new(vec![1.0, 2.0]).unwrap();
        let e = ellipsoid_profile(&spec);
        assert!((e.f.eval(1.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(e.u.num.is_zero());
        let g = equiv_metric_profile(&spec);
        let direct = |t: f64| -2.0 * t * (t - 1.0) * (t - 0.5);
        for t in [0.2, 0.75, 1.4] {
            assert!((g.f.eval(t).unwrap() - direct(t)).abs() < 1e-14);
        }
        assert!(g.u.num.is_zero());
    }

    #[test]
    fn kdv_profiles() {
        assert_eq!(kdv_profile(&[0.0], 1.0, 1).unwrap().u.num.coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(kdv_profile(&[-3.0], 1.0, 1).unwrap().u.num.coeffs(), &[1.0, 0.0, -3.0, 0.0]);
        assert_eq!(kdv_profile(&[1.0, 2.0], 1.0, 2).unwrap().u.num.coeffs(), &[1.0, 0.0, 1.0, 2.0, 0.0, 0.0]);
        assert!(kdv_profile(&[1.0], 0.0, 1).is_err());
        assert!(kdv_profile(&[1.0], 1.0, 2).is_err());
    }
}
