use crate::prelude::*;

use super::eig::companion_eigenvalues;
use super::RealPolynomial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

/// Sorted distinct real roots with multiplicities, plus the number of
/// non-real roots that were discarded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootList {
    pub roots: Vec<Root>,
    pub nonreal: usize,
}

impl RootList {
    pub fn all_real(&self) -> bool {
        self.nonreal == 0
    }

    pub fn real_count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Values repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots.iter().flat_map(|r| core::iter::repeat(r.value).take(r.multiplicity)).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

struct Cluster {
    re: f64,
    im: f64,
    size: usize,
}

impl Cluster {
    fn scale(&self) -> f64 {
        1.0f64.max((self.re * self.re + self.im * self.im).sqrt())
    }
}

/// Real roots of `p` by companion-matrix eigenvalues, a guarded Newton
/// polish, and clustering of roots closer than `cluster_tol`.
///
/// Eigenvalues of an m-fold root scatter by roughly `ε^{1/m}`; groups of
/// non-real eigenvalues that straddle the real axis are merged into one
/// real multiple root when `p` and its first m−1 derivatives vanish at the
/// group mean.
pub fn real_roots(p: &RealPolynomial, cluster_tol: f64) -> RootList {
    if p.degree() == 0 {
        return RootList::default();
    }
    let c = p.coeffs();
    let mut zeros = 0;
    let mut end = c.len();
    while end > 1 && c[end - 1] == 0.0 {
        zeros += 1;
        end -= 1;
    }
    let lead = c[0];
    let monic: Vec<f64> = c[1..end].iter().map(|v| v / lead).collect();
    let eig = companion_eigenvalues(&monic);

    let mut clusters: Vec<Cluster> = eig
        .into_iter()
        .map(|(re, im)| {
            let mut re = re;
            if im == 0.0 {
                let (v, d) = p.eval_with_derivative(re);
                if d != 0.0 {
                    let cand = re - v / d;
                    if p.eval(cand).abs() < v.abs() {
                        re = cand;
                    }
                }
            }
            Cluster { re, im, size: 1 }
        })
        .collect();
    if zeros > 0 {
        clusters.push(Cluster { re: 0.0, im: 0.0, size: zeros });
    }

    merge(&mut clusters, |a, b| {
        let d = ((a.re - b.re).powi(2) + (a.im - b.im).powi(2)).sqrt();
        d <= cluster_tol * a.scale().max(b.scale())
    });

    // Second tier: split multiple roots whose eigenvalues left the real axis.
    let wide = cluster_tol.sqrt().max(1e-4);
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (a, b) = (&clusters[i], &clusters[j]);
                let nonreal = !is_real(a, cluster_tol) || !is_real(b, cluster_tol);
                let d = ((a.re - b.re).powi(2) + (a.im - b.im).powi(2)).sqrt();
                if !nonreal || d > wide * a.scale().max(b.scale()) {
                    continue;
                }
                // Gather every cluster within reach of the pair.
                let centre = (a.re, a.im);
                let group: Vec<usize> = (0..clusters.len())
                    .filter(|&k| {
                        let c = &clusters[k];
                        ((c.re - centre.0).powi(2) + (c.im - centre.1).powi(2)).sqrt()
                            <= 2.0 * wide * c.scale().max(a.scale())
                    })
                    .collect();
                let size: usize = group.iter().map(|&k| clusters[k].size).sum();
                let re = group.iter().map(|&k| clusters[k].re * clusters[k].size as f64).sum::<f64>() / size as f64;
                let im = group.iter().map(|&k| clusters[k].im * clusters[k].size as f64).sum::<f64>() / size as f64;
                if im.abs() > cluster_tol * 1.0f64.max(re.abs()) || !is_multiple_root(p, re, size) {
                    continue;
                }
                let mut keep = Vec::with_capacity(clusters.len());
                for (k, c) in clusters.drain(..).enumerate() {
                    if !group.contains(&k) {
                        keep.push(c);
                    }
                }
                keep.push(Cluster { re, im: 0.0, size });
                clusters = keep;
                merged = true;
                break 'outer;
            }
        }
        if !merged {
            break;
        }
    }

    let mut out = RootList::default();
    for c in clusters {
        if is_real(&c, cluster_tol) {
            out.roots.push(Root { value: c.re, multiplicity: c.size });
        } else {
            out.nonreal += c.size;
        }
    }
    out.roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(core::cmp::Ordering::Equal));
    out
}

fn is_real(c: &Cluster, tol: f64) -> bool {
    c.im.abs() <= tol * 1.0f64.max(c.re.abs())
}

fn is_multiple_root(p: &RealPolynomial, t: f64, m: usize) -> bool {
    let mut d = p.clone();
    for _ in 0..m {
        let v = d.eval(t).abs();
        let scale = d.abs_eval(t).max(f64::MIN_POSITIVE);
        if v > 1e-12 * scale {
            return false;
        }
        d = d.derivative();
    }
    true
}

/// Single-linkage merge with size-weighted centroids.
fn merge(clusters: &mut Vec<Cluster>, close: impl Fn(&Cluster, &Cluster) -> bool) {
    loop {
        let mut hit = None;
        'scan: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if close(&clusters[i], &clusters[j]) {
                    hit = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((i, j)) = hit else { break };
        let b = clusters.swap_remove(j);
        let a = &mut clusters[i];
        let n = (a.size + b.size) as f64;
        a.re = (a.re * a.size as f64 + b.re * b.size as f64) / n;
        a.im = (a.im * a.size as f64 + b.im * b.size as f64) / n;
        a.size += b.size;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(p: &RealPolynomial, expect: &[(f64, usize)]) {
        let r = real_roots(p, 1e-7);
        assert_eq!(r.roots.len(), expect.len(), "{r:?}");
        for (got, (v, m)) in r.roots.iter().zip(expect) {
            assert!((got.value - v).abs() < 1e-10, "{r:?}");
            assert_eq!(got.multiplicity, *m, "{r:?}");
        }
    }

    #[test]
    fn simple_cubic() {
        check(&RealPolynomial::from_roots(&[1.0, 2.0, 3.0], 1.0), &[(1.0, 1), (2.0, 1), (3.0, 1)]);
    }

    #[test]
    fn triple_zero() {
        check(&RealPolynomial::monomial(1.0, 3), &[(0.0, 3)]);
    }

    #[test]
    fn half_scaled_cubic() {
        let p = RealPolynomial::new(vec![0.5, -1.5, 1.0, 0.0]);
        check(&p, &[(0.0, 1), (1.0, 1), (2.0, 1)]);
    }

    #[test]
    fn double_root_with_others() {
        let p = RealPolynomial::from_roots(&[0.0, 0.0, 1.0, 2.0, 3.0], 0.5);
        check(&p, &[(0.0, 2), (1.0, 1), (2.0, 1), (3.0, 1)]);
        let p = RealPolynomial::from_roots(&[1.3, 1.3, -0.7], 2.0);
        let r = real_roots(&p, 1e-7);
        assert_eq!(r.roots.len(), 2, "{r:?}");
        assert_eq!(r.roots[1].multiplicity, 2);
        assert!((r.roots[1].value - 1.3).abs() < 1e-8);
    }

    #[test]
    fn shifted_triple_root() {
        let p = RealPolynomial::from_roots(&[1.0, 1.0, 1.0, 4.0], 1.0);
        let r = real_roots(&p, 1e-7);
        assert!(r.all_real(), "{r:?}");
        assert_eq!(r.roots.len(), 2, "{r:?}");
        assert_eq!(r.roots[0].multiplicity, 3);
        assert!((r.roots[0].value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonreal_counted() {
        let p = RealPolynomial::new(vec![1.0, 0.0, 1.0, 0.0]); // t(t² + 1)
        let r = real_roots(&p, 1e-7);
        assert_eq!(r.nonreal, 2);
        assert_eq!(r.roots, vec![Root { value: 0.0, multiplicity: 1 }]);
        // Close complex pair is not mistaken for a double root.
        let p = RealPolynomial::new(vec![1.0, -2.0, 1.0 + 1e-10]);
        assert_eq!(real_roots(&p, 1e-7).nonreal, 2);
    }
}
