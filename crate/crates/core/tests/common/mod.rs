#![allow(dead_code)]

use wigner_core::{builtin_law, sample_wigner, Complex64, HermitianMatrix, SeedSpec};

pub fn gue(n: usize, master: u64, trial: u64) -> HermitianMatrix {
    let off = builtin_law("gauss_half").unwrap();
    let diag = builtin_law("gauss_one").unwrap();
    sample_wigner(n, &off, &diag, SeedSpec::new(master, trial)).unwrap()
}

fn dense(h: &HermitianMatrix) -> Vec<Vec<Complex64>> {
    h.rows()
}

/// Householder reduction to tridiagonal form, written from scratch on
/// row-major storage. Returns the diagonal and the moduli of the
/// off-diagonal (the spectrum depends only on those).
pub fn householder_tridiagonal(h: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.n();
    let mut a = dense(h);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[i][k]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vn;
        }
        // A <- P A P with P = I - 2 v v*, acting on indices k+1..n
        for col in 0..n {
            let s: Complex64 = (0..v.len()).map(|r| v[r].conj() * a[k + 1 + r][col]).sum();
            for r in 0..v.len() {
                a[k + 1 + r][col] -= 2.0 * v[r] * s;
            }
        }
        for row in 0..n {
            let s: Complex64 = (0..v.len()).map(|c| a[row][k + 1 + c] * v[c]).sum();
            for c in 0..v.len() {
                a[row][k + 1 + c] -= 2.0 * s * v[c].conj();
            }
        }
    }
    let d = (0..n).map(|i| a[i][i].re).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[i + 1][i].norm()).collect();
    (d, e)
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 {
            f64::EPSILON * (e[i - 1].abs() + 1.0)
        } else {
            q
        };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues by bisection on the Sturm count, ascending.
pub fn sturm_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let radius = (0..n)
        .map(|i| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { e[i].abs() } else { 0.0 };
            d[i].abs() + left + right
        })
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(d, e, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let t = a[col][c];
                a[r][c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// `(H - z)^{-1}(j, j)` through the elimination oracle.
pub fn oracle_green_diag(h: &HermitianMatrix, j: usize, z: Complex64) -> Complex64 {
    let n = h.n();
    let mut a = h.rows();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= z;
    }
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    e[j] = Complex64::new(1.0, 0.0);
    gauss_solve(a, e)[j]
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
