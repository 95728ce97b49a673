//! Dense least squares via Householder QR, sized for the handful-of-columns
//! systems the fits produce.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Solves `min ||A x - b||` for a column-major `A` (m rows, n cols, m >= n).
/// Returns `(x, residual_norm, condition_estimate)`.
pub fn lstsq(a_cols: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = a_cols.len();
    let m = b.len();
    debug_assert!(m >= n && a_cols.iter().all(|c| c.len() == m));

    // Column scaling keeps the condition estimate meaningful when basis
    // terms differ by many orders of magnitude.
    let mut scale = vec![0.0f64; n];
    let mut a = vec![0.0f64; m * n]; // column major
    for j in 0..n {
        let norm = math::sqrt(a_cols[j].iter().map(|x| x * x).sum());
        scale[j] = if norm > 0.0 { norm } else { 1.0 };
        for i in 0..m {
            a[j * m + i] = a_cols[j][i] / scale[j];
        }
    }
    let mut rhs = b.to_vec();

    // Householder QR, applying reflectors to the right-hand side as we go.
    for k in 0..n {
        let col = &a[k * m + k..(k + 1) * m];
        let mut norm = 0.0;
        for &x in col {
            norm += x * x;
        }
        let norm = math::sqrt(norm);
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k * m + k] >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0f64; m - k];
        v[0] = a[k * m + k] - alpha;
        for i in 1..m - k {
            v[i] = a[k * m + k + i];
        }
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        a[k * m + k] = alpha;
        for i in 1..m - k {
            a[k * m + k + i] = 0.0;
        }
        for j in k + 1..n {
            let mut dot = 0.0;
            for i in 0..m - k {
                dot += v[i] * a[j * m + k + i];
            }
            let beta = 2.0 * dot / vnorm_sq;
            for i in 0..m - k {
                a[j * m + k + i] -= beta * v[i];
            }
        }
        let mut dot = 0.0;
        for i in 0..m - k {
            dot += v[i] * rhs[k + i];
        }
        let beta = 2.0 * dot / vnorm_sq;
        for i in 0..m - k {
            rhs[k + i] -= beta * v[i];
        }
    }

    // Back substitution on the n x n triangle.
    let mut x = vec![0.0f64; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= a[j * m + k] * x[j];
        }
        let d = a[k * m + k];
        x[k] = if d.abs() > 0.0 { s / d } else { 0.0 };
    }

    let mut residual = 0.0;
    for i in n..m {
        residual += rhs[i] * rhs[i];
    }
    let residual = math::sqrt(residual);

    // Condition of the scaled R factor from its extreme diagonal entries --
    // crude but adequate for flagging rank deficiency.
    let mut dmax = 0.0f64;
    let mut dmin = f64::INFINITY;
    for k in 0..n {
        let d = a[k * m + k].abs();
        dmax = dmax.max(d);
        dmin = dmin.min(d);
    }
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };

    for j in 0..n {
        x[j] /= scale[j];
    }
    (x, residual, cond)
}

/// Solves the square system `A x = b` (row-major, n x n) by partial-pivot
/// elimination; returns `None` when singular to working precision.
pub fn solve_square(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[i * n + k].abs() > m[piv * n + k].abs() {
                piv = i;
            }
        }
        if m[piv * n + k].abs() < 1e-300 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in k + 1..n {
            let factor = m[i * n + k] / m[k * n + k];
            for j in k..n {
                m[i * n + j] -= factor * m[k * n + j];
            }
            x[i] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        for j in k + 1..n {
            x[k] -= m[k * n + j] * x[j];
        }
        x[k] /= m[k * n + k];
    }
    Some(x)
}
