//! Fourth-order finite-difference stencils on uniform grids.
//!
//! Interior formulas are centred; `*_full` variants close the ends with
//! one-sided stencils of the same order.

use crate::prelude::*;

/// Centred first derivative at interior index `k` (needs `2 ≤ k < len−2`).
#[inline]
pub fn d1(f: &[f64], k: usize, h: f64) -> f64 {
    (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h)
}

/// Centred second derivative at interior index `k`.
#[inline]
pub fn d2(f: &[f64], k: usize, h: f64) -> f64 {
    (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) / (12.0 * h * h)
}

/// Centred third derivative at index `k` (needs `3 ≤ k < len−3`).
#[inline]
pub fn d3(f: &[f64], k: usize, h: f64) -> f64 {
    (f[k - 3] - 8.0 * f[k - 2] + 13.0 * f[k - 1] - 13.0 * f[k + 1] + 8.0 * f[k + 2] - f[k + 3]) / (8.0 * h * h * h)
}

/// First derivative at every sample; needs at least 5 samples.
pub fn d1_full(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        return out;
    }
    for k in 2..n - 2 {
        out[k] = d1(f, k, h);
    }
    let fwd = |i: usize, s: f64| {
        let g = |j: usize| f[(i as isize + s as isize * j as isize) as usize];
        s * (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h)
    };
    // Second sample from a skewed five-point stencil.
    let skew = |i: usize, s: f64| {
        let g = |j: isize| f[(i as isize + s as isize * j) as usize];
        s * (-3.0 * g(-1) - 10.0 * g(0) + 18.0 * g(1) - 6.0 * g(2) + g(3)) / (12.0 * h)
    };
    out[0] = fwd(0, 1.0);
    out[1] = skew(1, 1.0);
    out[n - 1] = fwd(n - 1, -1.0);
    out[n - 2] = skew(n - 2, -1.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let h = 0.1;
        let p = |x: f64| 3.0 * x.powi(4) - 2.0 * x.powi(3) + x - 5.0;
        let f: Vec<f64> = (0..12).map(|k| p(k as f64 * h)).collect();
        let x = 5.0 * h;
        let dp = 12.0 * x.powi(3) - 6.0 * x * x + 1.0;
        let ddp = 36.0 * x * x - 12.0 * x;
        let dddp = 72.0 * x - 12.0;
        assert!((d1(&f, 5, h) - dp).abs() < 1e-11);
        assert!((d2(&f, 5, h) - ddp).abs() < 1e-9);
        assert!((d3(&f, 5, h) - dddp).abs() < 1e-7);
        let full = d1_full(&f, h);
        for (k, v) in full.iter().enumerate() {
            let x = k as f64 * h;
            assert!((v - (12.0 * x.powi(3) - 6.0 * x * x + 1.0)).abs() < 1e-10, "{k}");
        }
    }
}
