//! Eigenvalues of a real upper-Hessenberg matrix: balancing followed by the
//! shifted double-step QR iteration.

use crate::prelude::*;

struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    #[inline]
    fn g(&self, i: isize, j: isize) -> f64 {
        self.a[i as usize * self.n + j as usize]
    }
    #[inline]
    fn s(&mut self, i: isize, j: isize, v: f64) {
        self.a[i as usize * self.n + j as usize] = v;
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn balance(m: &mut Mat) {
    const RADIX: f64 = 2.0;
    let n = m.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += m.a[j * n + i].abs();
                    r += m.a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        m.a[i * n + j] *= g;
                    }
                    for j in 0..n {
                        m.a[j * n + i] *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues `(re, im)` of the companion matrix of the monic polynomial
/// `tⁿ + c₁tⁿ⁻¹ + … + cₙ`, given `c = [c₁, …, cₙ]`.
pub(crate) fn companion_eigenvalues(c: &[f64]) -> Vec<(f64, f64)> {
    let n = c.len();
    if n == 0 {
        return Vec::new();
    }
    let mut m = Mat { n, a: vec![0.0; n * n] };
    for j in 0..n {
        m.a[j] = -c[j];
    }
    for i in 1..n {
        m.a[i * n + i - 1] = 1.0;
    }
    balance(&mut m);
    hqr(&mut m)
}

#[allow(unused_assignments)]
fn hqr(m: &mut Mat) -> Vec<(f64, f64)> {
    let n = m.n as isize;
    let mut wr = vec![0.0; m.n];
    let mut wi = vec![0.0; m.n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += m.g(i, j).abs();
        }
    }
    let mut nn = n - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                s = m.g(l - 1, l - 1).abs() + m.g(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if m.g(l, l - 1).abs() <= eps * s {
                    m.s(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            x = m.g(nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
            } else {
                y = m.g(nn - 1, nn - 1);
                w = m.g(nn, nn - 1) * m.g(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    let (a, b) = ((nn - 1) as usize, nn as usize);
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[a] = x + z;
                        wr[b] = x + z;
                        if z != 0.0 {
                            wr[b] = x - w / z;
                        }
                        wi[a] = 0.0;
                        wi[b] = 0.0;
                    } else {
                        wr[a] = x + p;
                        wr[b] = x + p;
                        wi[a] = z;
                        wi[b] = -z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        // Give up on this block; report the diagonal.
                        for i in l..=nn {
                            wr[i as usize] = m.g(i, i) + t;
                            wi[i as usize] = 0.0;
                        }
                        nn = l - 1;
                        break;
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 0..=nn {
                            let v = m.g(i, i) - x;
                            m.s(i, i, v);
                        }
                        s = m.g(nn, nn - 1).abs() + m.g(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut mm = nn - 2;
                    while mm >= l {
                        z = m.g(mm, mm);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / m.g(mm + 1, mm) + m.g(mm, mm + 1);
                        q = m.g(mm + 1, mm + 1) - z - r - s;
                        r = m.g(mm + 2, mm + 1);
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if mm == l {
                            break;
                        }
                        let u = m.g(mm, mm - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (m.g(mm - 1, mm - 1).abs() + z.abs() + m.g(mm + 1, mm + 1).abs());
                        if u <= eps * v {
                            break;
                        }
                        mm -= 1;
                    }
                    for i in mm..nn - 1 {
                        m.s(i + 2, i, 0.0);
                        if i != mm {
                            m.s(i + 2, i - 1, 0.0);
                        }
                    }
                    let mut k = mm;
                    while k < nn {
                        if k != mm {
                            p = m.g(k, k - 1);
                            q = m.g(k + 1, k - 1);
                            r = 0.0;
                            if k + 1 != nn {
                                r = m.g(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == mm {
                                if l != mm {
                                    let v = -m.g(k, k - 1);
                                    m.s(k, k - 1, v);
                                }
                            } else {
                                m.s(k, k - 1, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = m.g(k, j) + q * m.g(k + 1, j);
                                if k + 1 != nn {
                                    p += r * m.g(k + 2, j);
                                    let v = m.g(k + 2, j) - p * z;
                                    m.s(k + 2, j, v);
                                }
                                let v = m.g(k + 1, j) - p * y;
                                m.s(k + 1, j, v);
                                let v = m.g(k, j) - p * x;
                                m.s(k, j, v);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * m.g(i, k) + y * m.g(i, k + 1);
                                if k + 1 != nn {
                                    p += z * m.g(i, k + 2);
                                    let v = m.g(i, k + 2) - p * r;
                                    m.s(i, k + 2, v);
                                }
                                let v = m.g(i, k + 1) - p * q;
                                m.s(i, k + 1, v);
                                let v = m.g(i, k) - p;
                                m.s(i, k, v);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    wr.into_iter().zip(wi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(c: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = companion_eigenvalues(c).into_iter().map(|z| z.0).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn cubic_with_known_roots() {
        let v = sorted_re(&[-6.0, 11.0, -6.0]);
        for (a, b) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn complex_pair() {
        // t² + 1
        let e = companion_eigenvalues(&[0.0, 1.0]);
        assert!(e.iter().all(|z| z.0.abs() < 1e-14 && (z.1.abs() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn degree_nine() {
        let roots: Vec<f64> = (1..=9).map(|k| k as f64 - 4.5).collect();
        let p = crate::poly::RealPolynomial::from_roots(&roots, 1.0);
        let v = sorted_re(&p.coeffs()[1..]);
        for (a, b) in v.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-9, "{v:?}");
        }
    }
}
