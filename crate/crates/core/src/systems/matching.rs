use crate::prelude::*;

use super::kdv_profile;
use crate::benenti::{allowed_product, IntegralValues, SeparableProfile};
use crate::poly::{RationalFunction, RealPolynomial};
use crate::{Error, Result};

/// Relative size below which remainders and excess coefficients vanish.
const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MatchOutcome {
    /// Integral values of the second profile on the shared trajectories.
    Matched(IntegralValues),
    /// `P/f₂ + U₂` is not a polynomial of degree ≤ N−1.
    Mismatch {
        remainder_norm: f64,
        degree_excess: usize,
        excess_norm: f64,
    },
}

/// Finds `H₂` with `f₂·(−U₂ + H₂-poly) = P`, i.e. checks that `P/f₂ + U₂` is a
/// polynomial of degree at most `N − 1`.
pub fn match_product(product: &RationalFunction, p2: &SeparableProfile) -> MatchOutcome {
    let n = p2.n;
    let (f, u) = (&p2.f, &p2.u);
    // P/f₂ + U₂ = (P.num·f.den·u.den + u.num·P.den·f.num) / (P.den·f.num·u.den)
    let num = &(&(&product.num * &f.den) * &u.den) + &(&(&u.num * &product.den) * &f.num);
    let den = &(&product.den * &f.num) * &u.den;
    let scale = num.norm_inf().max(den.norm_inf()).max(f64::MIN_POSITIVE);
    let (q, r) = num.div_rem(&den);
    let remainder_norm = r.norm_inf() / scale;
    let qc = q.coeffs();
    let excess = qc.len().saturating_sub(n);
    let excess_norm = qc[..excess].iter().fold(0.0f64, |m, c| m.max(c.abs())) / scale;
    let degree_excess = qc[..excess].iter().position(|c| c.abs() > MATCH_TOL * scale).map_or(0, |i| excess - i);
    if remainder_norm > MATCH_TOL || degree_excess > 0 {
        return MatchOutcome::Mismatch { remainder_norm, degree_excess, excess_norm };
    }
    let mut h = vec![0.0; n];
    let tail = &qc[excess..];
    h[n - tail.len()..].copy_from_slice(tail);
    MatchOutcome::Matched(IntegralValues(h))
}

/// Lemma-2 matching: trajectories of `p1` on the level `H1` are trajectories
/// of `p2` on the returned level when `f₁R₁ = f₂R₂`.
pub fn match_profiles(p1: &SeparableProfile, h1: &IntegralValues, p2: &SeparableProfile) -> Result<MatchOutcome> {
    if p1.n != p2.n {
        return Err(Error::Dimension { expected: p1.n, got: p2.n });
    }
    if h1.len() != p1.n {
        return Err(Error::Dimension { expected: p1.n, got: h1.len() });
    }
    Ok(match_product(&allowed_product(p1, h1), p2))
}

/// Stationary-KdV form of a product `P = f·R` of degree `2N+1`.
///
/// With `x' = √scale·x`, `t' = t − shift` the separated equations become
/// those of the returned profile, whose spectral polynomial `C` is monic with
/// vanishing `t'^{2N}` coefficient and `P(t) = −(scale/m₀)·C(t − shift)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvNormalization {
    pub profile: SeparableProfile,
    pub h: IntegralValues,
    pub scale: f64,
    pub shift: f64,
    pub m0: f64,
    /// `C` in the normalized coordinate.
    pub c: RealPolynomial,
}

impl KdvNormalization {
    /// `C` expressed in the original coordinate: `C(t − shift)`, monic.
    pub fn c_native(&self) -> RealPolynomial {
        self.c.shift(-self.shift)
    }

    /// Factor applied to `x`.
    pub fn time_factor(&self) -> f64 {
        self.scale.sqrt()
    }
}

pub fn normalize_to_kdv(product: &RealPolynomial) -> Result<KdvNormalization> {
    let deg = product.degree();
    if deg < 3 || deg % 2 == 0 {
        return Err(Error::Degree { expected: 2 * (deg / 2) + 1, got: deg });
    }
    let n = (deg - 1) / 2;
    let lead = product.leading();
    let scale = lead.abs();
    let m0 = -lead.signum();
    let monic = product.monic();
    let shift = -monic.coeffs()[1] / deg as f64;
    let mut c = monic.shift(shift);
    // The shift annihilates the second coefficient up to rounding.
    let mut coeffs = c.coeffs().to_vec();
    coeffs[1] = 0.0;
    c = RealPolynomial::new(coeffs);
    let cc = c.coeffs();
    let params: Vec<f64> = cc[2..n + 2].to_vec();
    let h: Vec<f64> = (0..n).map(|k| -cc[n + 2 + k] / m0).collect();
    let profile = kdv_profile(&params, m0, n)?;
    Ok(KdvNormalization { profile, h: IntegralValues(h), scale, shift, m0, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benenti::rhs_polynomial;
    use crate::systems::{neumann_profile, NeumannSpec};

    #[test]
    fn self_match_is_identity() {
        let p = neumann_profile(&NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap());
        let h = IntegralValues(vec![0.7, -1.3]);
        match match_profiles(&p, &h, &p).unwrap() {
            MatchOutcome::Matched(g) => {
                assert!((g.0[0] - 0.7).abs() < 1e-12 && (g.0[1] + 1.3).abs() < 1e-12, "{g:?}");
            }
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn neumann_against_flat_cubic() {
        let p = neumann_profile(&NeumannSpec::new(vec![1.0, 2.0]).unwrap());
        let h = IntegralValues(vec![0.0]);
        let prod = allowed_product(&p, &h).as_polynomial().unwrap();
        assert_eq!(prod.coeffs(), &[-4.0, 24.0, -44.0, 24.0]);
        let target = SeparableProfile::new(
            1,
            RationalFunction::polynomial(RealPolynomial::constant(1.0)),
            RationalFunction::polynomial(RealPolynomial::new(vec![4.0, -24.0, 44.0, 0.0])),
            "flat",
        )
        .unwrap();
        assert_eq!(match_profiles(&p, &h, &target).unwrap(), MatchOutcome::Matched(IntegralValues(vec![24.0])));
        let mut bad = target.clone();
        bad.u = RationalFunction::polynomial(RealPolynomial::new(vec![4.0, -24.0, 40.0, 0.0]));
        match match_profiles(&p, &h, &bad).unwrap() {
            MatchOutcome::Mismatch { degree_excess, excess_norm, .. } => {
                assert_eq!(degree_excess, 1);
                assert!(excess_norm > 0.0);
            }
            m => panic!("{m:?}"),
        }
        assert!(match_profiles(&p, &h, &neumann_profile(&NeumannSpec::new(vec![1.0, 2.0, 3.0]).unwrap())).is_err());
    }

    #[test]
    fn normalization_of_neumann_product() {
        let prod = RealPolynomial::new(vec![-4.0, 24.0, -44.0, 24.0]);
        let k = normalize_to_kdv(&prod).unwrap();
        assert_eq!(k.scale, 4.0);
        assert_eq!(k.shift, 2.0);
        assert_eq!(k.m0, 1.0);
        assert_eq!(k.c.coeffs(), &[1.0, 0.0, -1.0, 0.0]);
        assert_eq!(k.h.0, vec![0.0]);
        assert_eq!(k.c_native().coeffs(), &[1.0, -6.0, 11.0, -6.0]);
        // The normalized profile reproduces P(t + shift)/scale.
        let r = rhs_polynomial(&k.profile, &k.h).as_polynomial().unwrap();
        let expect = prod.shift(k.shift).scale(1.0 / k.scale);
        assert!((&r - &expect).norm_inf() < 1e-12);
    }

    #[test]
    fn normalization_trivial_and_degree() {
        let c = RealPolynomial::new(vec![-1.0, 0.0, 2.0, 3.0]);
        let k = normalize_to_kdv(&c).unwrap();
        assert_eq!((k.scale, k.shift), (1.0, 0.0));
        assert_eq!(k.c.leading(), 1.0);
        assert!(normalize_to_kdv(&RealPolynomial::new(vec![1.0, 0.0, 0.0])).is_err());
    }
}
