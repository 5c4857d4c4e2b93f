use crate::prelude::*;
use crate::{Error, Result};

/// Condition numbers above this are rejected by [`stackel_solve`].
pub const MAX_CONDITION: f64 = 1e12;

/// `(w₁, …, w_N)` with `Π(λ − qᵢ) = λᴺ + w₁λᴺ⁻¹ + … + w_N`.
pub fn elementary_symmetric(q: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in q {
        c.push(0.0);
        for k in (1..c.len()).rev() {
            c[k] -= r * c[k - 1];
        }
    }
    c.remove(0);
    c
}

fn vandermonde(q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        let mut v = 1.0;
        for j in (0..n).rev() {
            s[i * n + j] = v;
            v *= q[i];
        }
    }
    s
}

struct Lu {
    n: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<f64>, n: usize) -> Option<Self> {
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().partial_cmp(&a[j * n + k].abs()).unwrap())?;
            if a[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
                piv.swap(p, k);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(Self { n, a, piv })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

fn norm1(a: &[f64], n: usize) -> f64 {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// 1-norm condition number of the Stäckel matrix `Sᵢⱼ = qᵢ^{N−j}`.
pub fn vandermonde_condition(q: &[f64]) -> f64 {
    let n = q.len();
    let s = vandermonde(q);
    let Some(lu) = Lu::new(s.clone(), n) else { return f64::INFINITY };
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for (i, v) in lu.solve(&e).into_iter().enumerate() {
            inv[i * n + j] = v;
        }
    }
    norm1(&s, n) * norm1(&inv, n)
}

/// Solves `S(q)·I = rhs` with `Sᵢⱼ = qᵢ^{N−j}`, i.e. finds the coefficients of
/// the degree-(N−1) polynomial interpolating `(qᵢ, rhsᵢ)`.
pub fn stackel_solve(q: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = q.len();
    if rhs.len() != n {
        return Err(Error::Dimension { expected: n, got: rhs.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let s = vandermonde(q);
    let lu = Lu::new(s, n).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    if n > 1 {
        let cond = vandermonde_condition(q);
        if !(cond <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition: cond });
        }
    }
    Ok(lu.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RealPolynomial;

    #[test]
    fn symmetric_functions() {
        assert_eq!(elementary_symmetric(&[2.5]), vec![-2.5]);
        assert_eq!(elementary_symmetric(&[1.0, 2.0, 3.0]), vec![-6.0, 11.0, -6.0]);
        assert_eq!(elementary_symmetric(&[1.5, 2.5]), vec![-4.0, 3.75]);
        assert_eq!(&RealPolynomial::from_roots(&[1.0, 4.0], 1.0).coeffs()[1..], &elementary_symmetric(&[1.0, 4.0])[..]);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(stackel_solve(&[0.7], &[3.0]).unwrap(), vec![3.0]);
        let i = stackel_solve(&[1.0, 2.0], &[1.0, 3.0]).unwrap();
        assert!((i[0] - 2.0).abs() < 1e-15 && (i[1] + 1.0).abs() < 1e-15);
        assert_eq!(stackel_solve(&[0.0, 1.0], &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn coincident_rejected() {
        assert!(matches!(stackel_solve(&[1.0, 1.0], &[0.0, 1.0]), Err(Error::IllConditioned { .. })));
        assert!(matches!(stackel_solve(&[1.0, 1.0 + 1e-14], &[0.0, 1.0]), Err(Error::IllConditioned { .. })));
    }
}
