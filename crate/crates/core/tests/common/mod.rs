//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use monotone_minplus::matrix::IntMatrix;
use monotone_minplus::segments::{shift_window, Lines};

pub fn naive_product(a: &IntMatrix, b: &IntMatrix) -> Vec<Vec<i64>> {
    (0..a.rows())
        .map(|i| {
            (0..b.cols())
                .map(|j| (0..a.cols()).map(|k| a.get(i, k) + b.get(k, j)).min().expect("inner dim"))
                .collect()
        })
        .collect()
}

pub fn naive_conv(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len();
    (0..2 * n - 1)
        .map(|k| {
            (0..n)
                .filter(|&i| k >= i && k - i < n)
                .map(|i| a[i] + b[k - i])
                .min()
                .expect("nonempty diagonal")
        })
        .collect()
}

/// `(i, j)` has some `k` with `A_ik + B_kj = C_ij`.
pub fn witness_ij(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix) -> Vec<Vec<bool>> {
    (0..a.rows())
        .map(|i| {
            (0..b.cols())
                .map(|j| (0..a.cols()).any(|k| a.get(i, k) + b.get(k, j) == c.get(i, j)))
                .collect()
        })
        .collect()
}

/// `(i, k)` has some `j` with `A_ik + B_kj = C_ij`.
pub fn witness_ik(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix) -> Vec<Vec<bool>> {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|k| (0..b.cols()).any(|j| a.get(i, k) + b.get(k, j) == c.get(i, j)))
                .collect()
        })
        .collect()
}

pub fn witness_k(a: &[i64], b: &[i64], c: &[i64]) -> Vec<bool> {
    let n = a.len();
    (0..2 * n - 1)
        .map(|k| (0..n).any(|i| k >= i && k - i < n && a[i] + b[k - i] == c[k]))
        .collect()
}

/// `(X, Y, Z)` at one level and modulus, by scanning every position of
/// every line.
pub fn xyz<L: Lines + ?Sized>(lines: &L, q: u64, level: u32) -> (u64, u64, u64) {
    let (mut x, mut y, mut z) = (0, 0, 0);
    let w = shift_window(level);
    let q = q as i64;
    for l in 0..lines.line_count() {
        let win = lines.window(l);
        let mut prev: Option<(i64, i64)> = None;
        for p in win.start..=win.end {
            let (u, v) = lines.keys(l, p);
            let key = (u.div_euclid(1 << level), v.div_euclid(1 << level));
            if prev == Some(key) {
                continue;
            }
            prev = Some(key);
            let d = lines.delta(l, p);
            for s in -w..=w {
                if (d - s) % q == 0 {
                    y += 1;
                    if d == s {
                        z += 1;
                    } else {
                        x += 1;
                    }
                }
            }
        }
    }
    (x, y, z)
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

/// Product of two cyclic polynomials of length `q` by the double loop.
pub fn cyclic_schoolbook(u: &[u64], v: &[u64], p: u64) -> Vec<u64> {
    let q = u.len();
    let mut out = vec![0u64; q];
    for (i, &x) in u.iter().enumerate() {
        for (j, &y) in v.iter().enumerate() {
            let r = (i + j) % q;
            out[r] = (out[r] + mulmod(x, y, p)) % p;
        }
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
