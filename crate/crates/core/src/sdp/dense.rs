//! Small dense real kernels on row-major square matrices.

pub type Mat = Vec<f64>;

pub fn zeros(n: usize) -> Mat {
    vec![0.0; n * n]
}

pub fn identity(n: usize, scale: f64) -> Mat {
    let mut m = zeros(n);
    for i in 0..n {
        m[i * n + i] = scale;
    }
    m
}

pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Mat {
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let (crow, brow) = (&mut c[i * n..(i + 1) * n], &b[k * n..(k + 1) * n]);
            for (cj, bj) in crow.iter_mut().zip(brow) {
                *cj += aik * bj;
            }
        }
    }
    c
}

pub fn transpose(a: &[f64], n: usize) -> Mat {
    let mut t = zeros(n);
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// a·b·aᵀ
pub fn congruence(a: &[f64], b: &[f64], n: usize) -> Mat {
    matmul(&matmul(a, b, n), &transpose(a, n), n)
}

pub fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower Cholesky factor, or None when the matrix is not numerically positive definite.
pub fn cholesky(a: &[f64], n: usize) -> Option<Mat> {
    let mut l = zeros(n);
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

pub fn lower_inverse(l: &[f64], n: usize) -> Mat {
    let mut inv = zeros(n);
    for j in 0..n {
        inv[j * n + j] = 1.0 / l[j * n + j];
        for i in j + 1..n {
            let mut s = 0.0;
            for k in j..i {
                s -= l[i * n + k] * inv[k * n + j];
            }
            inv[i * n + j] = s / l[i * n + i];
        }
    }
    inv
}

/// Solves L Lᵀ x = b in place.
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// One-sided Jacobi SVD: returns (singular values, V) with B V = U diag(s).
pub fn svd_right(b: &[f64], n: usize) -> (Vec<f64>, Mat) {
    // Work on columns of B; rotations applied on the right.
    let mut a = b.to_vec();
    let mut v = identity(n, 1.0);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    let x = a[k * n + p];
                    let y = a[k * n + q];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let x = a[k * n + p];
                    let y = a[k * n + q];
                    a[k * n + p] = c * x - s * y;
                    a[k * n + q] = s * x + c * y;
                    let x = v[k * n + p];
                    let y = v[k * n + q];
                    v[k * n + p] = c * x - s * y;
                    v[k * n + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s = (0..n).map(|j| (0..n).map(|k| a[k * n + j] * a[k * n + j]).sum::<f64>().sqrt()).collect();
    (s, v)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eig(a: &[f64], n: usize) -> f64 {
    crate::numerics::symmetric_min_eig(a, n)
}
