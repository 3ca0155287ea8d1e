//! Real roots of low-degree polynomials through companion-matrix eigenvalues.
//!
//! The companion matrix is balanced and reduced with the Francis
//! double-shift QR iteration; it is already upper Hessenberg, so no
//! reduction step is needed.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

/// Relative residual bound a returned root must meet.
pub const ROOT_RESIDUAL: f64 = 1e-9;

/// Evaluates a polynomial given highest degree first.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// `sum |c_i| |x|^i`, the natural scale for a residual at `x`.
pub fn residual_scale(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().fold(0.0, |acc, &c| acc * ax + c.abs())
}

fn derivative(coeffs: &[f64], x: f64) -> f64 {
    let n = coeffs.len() - 1;
    coeffs[..n].iter().enumerate().fold(0.0, |acc, (i, &c)| acc * x + c * (n - i) as f64)
}

/// All real roots of `coeffs` (highest degree first), in ascending order.
///
/// Vanishing leading coefficients lower the degree. Every root is polished by
/// Newton steps and kept only if its residual is below
/// `ROOT_RESIDUAL * residual_scale`.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let start = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len());
    let p = &coeffs[start..];
    let mut roots = Vec::new();
    match p.len() {
        0 | 1 => return roots,
        2 => roots.push(-p[1] / p[0]),
        _ => {
            let n = p.len() - 1;
            // rescale the variable so the roots are of order one
            let ratio = (p[n].abs() / p[0].abs()).max(f64::MIN_POSITIVE);
            let scale = if p[n] == 0.0 { 1.0 } else { 2f64.powi((ratio.log2() / n as f64).round() as i32) };
            let monic: Vec<f64> =
                (0..=n).map(|i| p[i] / (p[0] * scale.powi(i as i32))).collect();
            let mut companion = alloc::vec![alloc::vec![0.0; n + 1]; n + 1];
            for j in 1..=n {
                companion[1][j] = -monic[j];
            }
            for i in 2..=n {
                companion[i][i - 1] = 1.0;
            }
            balance(&mut companion);
            for (re, im) in hessenberg_eigenvalues(&mut companion) {
                let tol = 1e-6 * (1.0 + re.abs());
                if im.abs() <= tol {
                    roots.push(polish(p, re * scale));
                }
            }
        }
    }
    roots.retain(|&r| r.is_finite() && horner(p, r).abs() <= ROOT_RESIDUAL * residual_scale(p, r));
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    roots
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Matrices here are 1-based, `a[0]` is unused.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len() - 1;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in (1..=n).filter(|&j| j != i) {
                c += a[j][i].abs();
                r += a[i][j].abs();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 1..=n {
                    a[i][j] /= f;
                }
                for row in a.iter_mut().skip(1) {
                    row[i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues `(re, im)` of a 1-based upper Hessenberg matrix, destroying
/// it in the process. Blocks that fail to converge are dropped.
fn hessenberg_eigenvalues(a: &mut [Vec<f64>]) -> Vec<(f64, f64)> {
    let n = a.len() - 1;
    let mut out = Vec::with_capacity(n);
    let mut norm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            norm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut shift = 0.0;
    let (mut p, mut q, mut r);
    while nn >= 1 {
        let mut its = 0;
        loop {
            // look for a negligible subdiagonal element
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = norm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                out.push((x + shift, 0.0));
                nn -= 1;
                break;
            }
            let mut y = a[nn - 1][nn - 1];
            let mut w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                let pp = 0.5 * (y - x);
                let qq = pp * pp + w;
                let z = qq.abs().sqrt();
                x += shift;
                if qq >= 0.0 {
                    let z = pp + z.copysign(pp);
                    let second = if z != 0.0 { x - w / z } else { x + z };
                    out.push((x + z, 0.0));
                    out.push((second, 0.0));
                } else {
                    out.push((x + pp, z));
                    out.push((x + pp, -z));
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return out;
            }
            if its == 10 || its == 20 {
                // exceptional shift
                shift += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            for k in m..nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[k][k - 1] = -a[k][k - 1];
                    }
                } else {
                    a[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pj = a[k][j] + q * a[k + 1][j];
                    if k != nn - 1 {
                        pj += r * a[k + 2][j];
                        a[k + 2][j] -= pj * z;
                    }
                    a[k + 1][j] -= pj * y;
                    a[k][j] -= pj * x;
                }
                for i in l..=nn.min(k + 3) {
                    let mut pi = x * a[i][k] + y * a[i][k + 1];
                    if k != nn - 1 {
                        pi += z * a[i][k + 2];
                        a[i][k + 2] -= pi * r;
                    }
                    a[i][k + 1] -= pi * q;
                    a[i][k] -= pi;
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    out
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    let mut res = horner(p, x).abs();
    for _ in 0..4 {
        let d = derivative(p, x);
        if d == 0.0 {
            break;
        }
        let next = x - horner(p, x) / d;
        let next_res = horner(p, next).abs();
        if !(next_res < res) {
            break;
        }
        x = next;
        res = next_res;
    }
    x
}
