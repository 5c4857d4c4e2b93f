//! Dense real polynomials (descending coefficients), rational functions,
//! real-root extraction and the Vandermonde/Stäckel solve.

use crate::prelude::*;

use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

mod eig;
mod roots;
mod stackel;

pub use roots::{real_roots, Root, RootList};
pub use stackel::{elementary_symmetric, stackel_solve, vandermonde_condition};

/// Polynomial with `coeffs[0]` the leading coefficient. The empty vector is
/// the zero polynomial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial, stripping exact leading zeros.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let lead = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
        Self { coeffs: coeffs[lead..].to_vec() }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c·tᵏ`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[0] = c;
        Self::new(coeffs)
    }

    /// `scale·Π(t − rᵢ)`
    pub fn from_roots(roots: &[f64], scale: f64) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            c.push(0.0);
            for k in (1..c.len()).rev() {
                c[k] -= r * c[k - 1];
            }
        }
        if scale != 1.0 {
            for v in &mut c {
                *v *= scale;
            }
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Coefficient of `tᵏ`.
    pub fn coeff(&self, k: usize) -> f64 {
        if k >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[self.coeffs.len() - 1 - k]
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in &self.coeffs {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(self.coeffs[..n].iter().enumerate().map(|(i, &c)| c * (n - i) as f64).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        self.scale(1.0 / self.leading())
    }

    /// Max-norm of the coefficient vector.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `Σ|cₖ|·|t|ᵏ`, the natural rounding scale of `eval(t)`.
    pub fn abs_eval(&self, t: f64) -> f64 {
        let t = t.abs();
        self.coeffs.iter().fold(0.0, |acc, &c| acc * t + c.abs())
    }

    /// `p(a·t + b)`
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        let lin = Self::new(vec![a, b]);
        let mut out = Self::zero();
        for &c in &self.coeffs {
            out = &(&out * &lin) + &Self::constant(c);
        }
        out
    }

    /// `p(t + s)`
    pub fn shift(&self, s: f64) -> Self {
        self.compose_affine(1.0, s)
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dl = d.coeffs.len();
        let nq = r.len() - dl + 1;
        let mut q = vec![0.0; nq];
        for i in 0..nq {
            let f = r[i] / d.coeffs[0];
            q[i] = f;
            for j in 0..dl {
                r[i + j] -= f * d.coeffs[j];
            }
            r[i] = 0.0;
        }
        (Self::new(q), Self::new(r[nq..].to_vec()))
    }

    /// Synthetic division by `(t − r)`, discarding the remainder.
    pub fn deflate(&self, r: f64) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        let mut acc = 0.0;
        for &c in &self.coeffs[..self.coeffs.len() - 1] {
            acc = acc * r + c;
            out.push(acc);
        }
        Self::new(out)
    }

    /// Drops leading coefficients below `rel_tol·‖p‖∞`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.norm_inf();
        let lead = self.coeffs.iter().position(|c| c.abs() > cut).unwrap_or(self.coeffs.len());
        Self::new(self.coeffs[lead..].to_vec())
    }
}

impl Add for &RealPolynomial {
    type Output = RealPolynomial;
    fn add(self, rhs: Self) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut c = vec![0.0; n];
        for (i, v) in self.coeffs.iter().rev().enumerate() {
            c[n - 1 - i] += v;
        }
        for (i, v) in rhs.coeffs.iter().rev().enumerate() {
            c[n - 1 - i] += v;
        }
        RealPolynomial::new(c)
    }
}

impl Sub for &RealPolynomial {
    type Output = RealPolynomial;
    fn sub(self, rhs: Self) -> RealPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &RealPolynomial {
    type Output = RealPolynomial;
    fn neg(self) -> RealPolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &RealPolynomial {
    type Output = RealPolynomial;
    fn mul(self, rhs: Self) -> RealPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RealPolynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPolynomial::new(c)
    }
}

/// `num/den` with a nonzero denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: RealPolynomial,
    pub den: RealPolynomial,
}

impl RationalFunction {
    pub fn new(num: RealPolynomial, den: RealPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(p: RealPolynomial) -> Self {
        Self { num: p, den: RealPolynomial::constant(1.0) }
    }

    pub fn zero() -> Self {
        Self::polynomial(RealPolynomial::zero())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Numerator with the constant denominator folded in, if there is one.
    pub fn as_polynomial(&self) -> Option<RealPolynomial> {
        self.is_polynomial().then(|| self.num.scale(1.0 / self.den.leading()))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let d = self.den.eval(t);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Pole { t });
        }
        Ok(self.num.eval(t) / d)
    }

    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self { num, den: &self.den * &self.den }
    }

    pub fn eval_derivative(&self, t: f64) -> Result<f64> {
        let (n, dn) = self.num.eval_with_derivative(t);
        let (d, dd) = self.den.eval_with_derivative(t);
        if d == 0.0 {
            return Err(Error::Pole { t });
        }
        Ok((dn * d - n * dd) / (d * d))
    }

    pub fn mul_poly(&self, p: &RealPolynomial) -> Self {
        Self { num: &self.num * p, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn add_poly(&self, p: &RealPolynomial) -> Self {
        Self { num: &self.num + &(p * &self.den), den: self.den.clone() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { num: self.num.scale(s), den: self.den.clone() }
    }

    /// `r(a·t + b)`
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        Self { num: self.num.compose_affine(a, b), den: self.den.compose_affine(a, b) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    #[test]
    fn eval_examples() {
        let cubic = p(&[1.0, -6.0, 11.0, -6.0]);
        assert_eq!(cubic.eval(1.0), 0.0);
        assert_eq!(cubic.eval(0.0), -6.0);
        let f = RationalFunction::polynomial(RealPolynomial::from_roots(&[1.0, 2.0], -4.0));
        assert_eq!(f.eval(1.5).unwrap(), 1.0);
    }

    #[test]
    fn rational_pole() {
        let r = RationalFunction::new(p(&[1.0]), p(&[1.0, 0.0])).unwrap();
        assert_eq!(r.eval(0.0), Err(Error::Pole { t: 0.0 }));
        assert_eq!(r.eval(2.0).unwrap(), 0.5);
    }

    #[test]
    fn from_roots_examples() {
        assert_eq!(RealPolynomial::from_roots(&[], 1.0).coeffs(), &[1.0]);
        assert_eq!(RealPolynomial::from_roots(&[1.0, 2.0, 3.0], 1.0).coeffs(), &[1.0, -6.0, 11.0, -6.0]);
        assert_eq!(RealPolynomial::from_roots(&[0.0, 1.0, 2.0], 0.5).coeffs(), &[0.5, -1.5, 1.0, 0.0]);
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1.0, 2.0]);
        let b = p(&[1.0, -2.0]);
        assert_eq!((&a * &b).coeffs(), &[1.0, 0.0, -4.0]);
        assert_eq!((&a - &a).coeffs(), &[] as &[f64]);
        assert_eq!((&a + &p(&[3.0, 0.0, 0.0])).coeffs(), &[3.0, 1.0, 2.0]);
        assert_eq!(p(&[1.0, 0.0, -4.0]).derivative().coeffs(), &[2.0, 0.0]);
        assert_eq!(p(&[0.0, 0.0, 5.0]).degree(), 0);
    }

    #[test]
    fn division_and_deflation() {
        let num = RealPolynomial::from_roots(&[1.0, 2.0, 3.0], 2.0);
        let (q, r) = num.div_rem(&p(&[1.0, -2.0]));
        assert!(r.norm_inf() < 1e-14);
        assert_eq!(q.coeffs(), RealPolynomial::from_roots(&[1.0, 3.0], 2.0).coeffs());
        assert_eq!(num.deflate(3.0).coeffs(), RealPolynomial::from_roots(&[1.0, 2.0], 2.0).coeffs());
        let (_, r) = p(&[1.0, 0.0, 1.0]).div_rem(&p(&[1.0, 0.0]));
        assert_eq!(r.coeffs(), &[1.0]);
    }

    #[test]
    fn shift_matches_direct_expansion() {
        // −4(t−1)(t−2)(t−3) at t+2 is −4(t+1)t(t−1) = −4t³ + 4t.
        let m = RealPolynomial::from_roots(&[1.0, 2.0, 3.0], -4.0);
        assert_eq!(m.shift(2.0).coeffs(), &[-4.0, 0.0, 4.0, 0.0]);
        let q = p(&[2.0, -1.0, 3.0]);
        let c = q.compose_affine(3.0, -1.0);
        for t in [-2.0, 0.3, 4.0] {
            assert!((c.eval(t) - q.eval(3.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_derivative() {
        let r = RationalFunction::new(p(&[1.0, 0.0, 1.0]), p(&[1.0, 0.0])).unwrap();
        // (t² + 1)/t, derivative 1 − 1/t²
        for t in [0.5, 2.0, -3.0] {
            let d = r.derivative().eval(t).unwrap();
            assert!((d - (1.0 - 1.0 / (t * t))).abs() < 1e-13);
            assert!((r.eval_derivative(t).unwrap() - d).abs() < 1e-13);
        }
    }
}
