//! Slow, independent reference implementations for tests.
//!
//! Everything here works on plain `Vec<f64>` and shares no code with
//! `normvar-core`: OLS through the normal equations with an explicit
//! Gauss-Jordan inverse, Student-t tail probabilities by quadrature, polynomial
//! roots by Durand-Kerner iteration, and textbook statistics.

#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

use std::f64::consts::PI;

pub type Matrix = Vec<Vec<f64>>;

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            for j in 0..p {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[piv][col] == 0.0 {
            return None;
        }
        aug.swap(col, piv);
        let d = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `Γ((ν+1)/2) / (√(νπ) Γ(ν/2))` for integer `ν`, via exact half-integer recursion.
pub fn t_density_constant(dof: u32) -> f64 {
    // ratio(ν) = Γ((ν+1)/2) / Γ(ν/2); ratio(1) = 1/√π, ratio(2) = √π/2,
    // ratio(ν+2) = ratio(ν) · ((ν+1)/2) / (ν/2).
    let mut r = if dof % 2 == 1 { 1.0 / PI.sqrt() } else { PI.sqrt() / 2.0 };
    let mut v = if dof % 2 == 1 { 1 } else { 2 };
    while v < dof {
        r *= (v as f64 + 1.0) / v as f64;
        v += 2;
    }
    r / (dof as f64 * PI).sqrt()
}

pub fn t_density(x: f64, dof: u32) -> f64 {
    let nu = dof as f64;
    t_density_constant(dof) * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Two-sided Student-t p-value `1 − 2∫₀^|t| f(x) dx` by quadrature.
pub fn t_two_sided_p(t: f64, dof: u32) -> f64 {
    let x = t.abs();
    if x == 0.0 {
        return 1.0;
    }
    // Split the range so the adaptive rule sees the peak at full resolution.
    let mut acc = 0.0;
    let mut lo = 0.0;
    let mut hi = x.min(1.0);
    loop {
        acc += integrate(&|u| t_density(u, dof), lo, hi, 1e-14);
        if hi >= x {
            break;
        }
        lo = hi;
        hi = (hi * 2.0).min(x);
    }
    (1.0 - 2.0 * acc).max(0.0)
}

/// Reference OLS: coefficients `(Z'Z)^-1 Z'Y`, SEs, t statistics and p-values.
#[derive(Debug, Clone)]
pub struct OlsOracle {
    /// `b[j][z]`: regressor `j` in equation `z`.
    pub b: Matrix,
    pub se: Matrix,
    pub t: Matrix,
    pub p: Matrix,
    pub dof: u32,
}

pub fn ols_normal_equations(y: &Matrix, z: &Matrix) -> Option<OlsOracle> {
    let n = y.len();
    let k = y[0].len();
    let m = z[0].len();
    let zt = transpose(z);
    let inv = gauss_jordan_inverse(&matmul(&zt, z))?;
    let b = matmul(&inv, &matmul(&zt, y));
    let fitted = matmul(z, &b);
    let dof = (n - m) as u32;
    let mut se = vec![vec![0.0; k]; m];
    let mut t = vec![vec![0.0; k]; m];
    let mut p = vec![vec![0.0; k]; m];
    for eq in 0..k {
        let ssr: f64 = (0..n).map(|i| (y[i][eq] - fitted[i][eq]).powi(2)).sum();
        let s2 = ssr / dof as f64;
        for j in 0..m {
            se[j][eq] = (s2 * inv[j][j]).sqrt();
            t[j][eq] = b[j][eq] / se[j][eq];
            p[j][eq] = t_two_sided_p(t[j][eq], dof);
        }
    }
    Some(OlsOracle { b, se, t, p, dof })
}

/// Lagged design for a `T × k` series: rows `[1, x_{t-1}, …, x_{t-p}]`.
pub fn lag_design(data: &Matrix, p: usize) -> (Matrix, Matrix) {
    let mut y = Vec::new();
    let mut z = Vec::new();
    for t in p..data.len() {
        y.push(data[t].clone());
        let mut row = vec![1.0];
        for lag in 1..=p {
            row.extend_from_slice(&data[t - lag]);
        }
        z.push(row);
    }
    (y, z)
}

/// Complex number as `(re, im)`.
pub type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Roots of the monic polynomial `x^n + c[n-1] x^(n-1) + … + c[0]` (Durand-Kerner).
pub fn monic_roots(c: &[f64]) -> Vec<C64> {
    let n = c.len();
    let eval = |x: C64| {
        let mut acc: C64 = (1.0, 0.0);
        for i in (0..n).rev() {
            acc = cmul(acc, x);
            acc.0 += c[i];
        }
        acc
    };
    let mut roots: Vec<C64> = (0..n)
        .map(|i| {
            let ang = 2.0 * PI * i as f64 / n as f64 + 0.4;
            (0.9 * ang.cos(), 0.9 * ang.sin())
        })
        .collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den: C64 = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = cmul(den, (roots[i].0 - roots[j].0, roots[i].1 - roots[j].1));
                }
            }
            let step = cdiv(eval(roots[i]), den);
            roots[i] = (roots[i].0 - step.0, roots[i].1 - step.1);
            delta = delta.max(step.0.hypot(step.1));
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Polynomial product on coefficient vectors (lowest degree first).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Largest-modulus root of `det(λ² I − Π₁ λ − Π₂)` for 2 × 2 lag matrices.
pub fn var2x2_lag2_radius(p1: &Matrix, p2: &Matrix) -> f64 {
    // Entry (i, j) of λ²I − Π₁λ − Π₂, lowest degree first.
    let e = |i: usize, j: usize| -> Vec<f64> {
        let id = if i == j { 1.0 } else { 0.0 };
        vec![-p2[i][j], -p1[i][j], id]
    };
    let a = poly_mul(&e(0, 0), &e(1, 1));
    let b = poly_mul(&e(0, 1), &e(1, 0));
    let det: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    // det is monic of degree 4.
    monic_roots(&det[..4]).iter().map(|r| r.0.hypot(r.1)).fold(0.0, f64::max)
}

/// Pearson correlation via the raw-moment formula.
pub fn pearson_textbook(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

/// The three-step index recipe computed column by column over the full range.
pub fn index_by_steps(series: &[Vec<Option<f64>>]) -> Vec<Option<f64>> {
    let len = series.iter().map(Vec::len).max().unwrap_or(0);
    let scaled: Vec<Vec<Option<f64>>> = series
        .iter()
        .map(|s| {
            let vals: Vec<f64> = s.iter().flatten().copied().collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            s.iter().map(|v| v.map(|x| x / sd)).collect()
        })
        .collect();
    let avg: Vec<Option<f64>> = (0..len)
        .map(|t| {
            let col: Vec<f64> = scaled.iter().filter_map(|s| s.get(t).copied().flatten()).collect();
            (!col.is_empty()).then(|| col.iter().sum::<f64>() / col.len() as f64)
        })
        .collect();
    let defined: Vec<f64> = avg.iter().flatten().copied().collect();
    let m = defined.iter().sum::<f64>() / defined.len() as f64;
    avg.iter().map(|v| v.map(|x| x / m * 100.0)).collect()
}

/// Arg-max of `f` on the grid `lo, lo + step, …, hi`.
pub fn grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * step)
        .map(|x| (x, f(x)))
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_constant_matches_known_values() {
        // ν = 1 is Cauchy: 1/π. ν = 2: 1/(2√2).
        assert!((t_density_constant(1) - 1.0 / PI).abs() < 1e-15);
        assert!((t_density_constant(2) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((t_density_constant(3) - 2.0 / (PI * 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn cauchy_tail_by_quadrature() {
        for t in [0.5f64, 1.0, 3.0, 40.0] {
            let want = 1.0 - 2.0 / PI * t.atan();
            assert!((t_two_sided_p(t, 1) - want).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn inverse_of_known_matrix() {
        let a = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = gauss_jordan_inverse(&a).unwrap();
        let want = [[0.6, -0.7], [-0.2, 0.4]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - want[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn roots_of_quadratic() {
        // x² − 3x + 2 = (x − 1)(x − 2)
        let mut r: Vec<f64> = monic_roots(&[2.0, -3.0]).iter().map(|z| z.0).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_finds_parabola_peak() {
        let (x, _) = grid_argmax(|x| -(x - 0.25).powi(2), -1.0, 1.0, 1e-3);
        assert!((x - 0.25).abs() < 1e-9);
    }
}
