//! Dense complex matrices and the handful of operations the quantum side needs.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Entrywise Hermiticity tolerance for a matrix flagged Hermitian.
    pub const HERMITIAN_FLAG: f64 = 1e-12;
    /// Hermiticity accepted on input to the eigensolver.
    pub const HERMITIAN_INPUT: f64 = 1e-10;
    /// Reconstruction residual of an eigendecomposition.
    pub const RECONSTRUCTION: f64 = 1e-10;
    /// Probability and POVM validation.
    pub const PROBABILITY: f64 = 1e-9;
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::new(2, 2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Re Tr(A† B), the real Frobenius inner product.
    pub fn inner_re(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(self)?.eigenvalues[0])
    }

    fn try_zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in elementwise operation"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_zip(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_zip(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

/// Kronecker product; block (i, j) of the result is `a[i][j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Traces out `side` of a bipartite operator on C^dA ⊗ C^dB.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), side: Side) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows != da * db {
        return Err(Error::Dimension(format!(
            "partial trace over {da}x{db} needs a square matrix of size {}, got {}x{}",
            da * db,
            m.rows,
            m.cols
        )));
    }
    Ok(match side {
        Side::B => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Side::A => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    })
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit-norm columns matching `eigenvalues`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl Spectrum {
    pub fn max(&self) -> (f64, &[C64]) {
        let k = self.eigenvalues.len() - 1;
        (self.eigenvalues[k], &self.eigenvectors[k])
    }

    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * *lam;
                }
            }
        }
        out
    }

    /// Σ f(λ) |v⟩⟨v|
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a real symmetric `n x n` row-major matrix by cyclic Jacobi.
/// Returns eigenvalues ascending and the matching eigenvectors as columns of a row-major matrix.
pub fn symmetric_eig(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _sweep in 0..100 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[p * n + q];
                    let app = m[p * n + p];
                    let aqq = m[q * n + q];
                    // Negligible against both the diagonal pair and the whole matrix.
                    if apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() || apq.abs() <= 1e-18 * scale {
                        m[p * n + q] = 0.0;
                        m[q * n + p] = 0.0;
                        continue;
                    }
                    rotated = true;
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = m[k * n + p];
                        let akq = m[k * n + q];
                        m[k * n + p] = c * akp - s * akq;
                        m[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = m[p * n + k];
                        let aqk = m[q * n + k];
                        m[p * n + k] = c * apk - s * aqk;
                        m[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + col] = v[k * n + src];
        }
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a real symmetric matrix, without eigenvectors.
///
/// Householder reduction to tridiagonal form, then Sturm-sequence bisection.
pub fn symmetric_min_eig(a: &[f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return f64::INFINITY;
    }
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let norm = (k + 1..n).map(|i| m[i * n + k] * m[i * n + k]).sum::<f64>().sqrt();
        let x0 = m[(k + 1) * n + k];
        if norm <= 1e-300 || k + 2 == n {
            off[k] = x0;
            continue;
        }
        let alpha = if x0 > 0.0 { -norm } else { norm };
        for i in k + 1..n {
            v[i] = m[i * n + k];
        }
        v[k + 1] -= alpha;
        let vn = (k + 1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        (k + 1..n).for_each(|i| v[i] /= vn);
        // A ← A − 2(v wᵀ + w vᵀ) with w = A v − (vᵀ A v) v on the trailing block.
        for i in k + 1..n {
            p[i] = (k + 1..n).map(|j| m[i * n + j] * v[j]).sum();
        }
        let kk: f64 = (k + 1..n).map(|i| v[i] * p[i]).sum();
        (k + 1..n).for_each(|i| p[i] -= kk * v[i]);
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] -= 2.0 * (v[i] * p[j] + p[i] * v[j]);
            }
        }
        off[k] = alpha;
    }
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    // Number of eigenvalues below x.
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
            q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1e-300);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = |i: usize| {
        (if i > 0 { off[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { off[i].abs() } else { 0.0 })
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + 1e-300;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending.
///
/// Works on the real embedding [[Re, -Im], [Im, Re]], whose spectrum is the
/// Hermitian one with every eigenvalue doubled, then picks one complex
/// eigenvector out of each doubled pair.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("eigensolver needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let herr = a.hermiticity_error();
    if herr > tol::HERMITIAN_INPUT * a.max_abs().max(1.0) {
        return Err(Error::Validation(format!("matrix is not Hermitian (deviation {herr:.3e})")));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![], eigenvectors: vec![] });
    }
    let h = a.hermitian_part();
    let m = 2 * n;
    let mut e = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            e[i * m + j] = z.re;
            e[i * m + j + n] = -z.im;
            e[(i + n) * m + j] = z.im;
            e[(i + n) * m + j + n] = z.re;
        }
    }
    let (vals, vecs) = symmetric_eig(&e, m);
    let scale = vals.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let candidate = |col: usize| -> Vec<C64> {
        (0..n).map(|k| C64::new(vecs[k * m + col], vecs[(k + n) * m + col])).collect()
    };

    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < m && chosen.len() < n {
        let mut end = start + 1;
        while end < m && vals[end] - vals[end - 1] <= 1e-12 * scale {
            end += 1;
        }
        let mut pool: Vec<Vec<C64>> = (start..end).map(candidate).collect();
        loop {
            if chosen.len() == n {
                break;
            }
            let mut best: Option<(usize, f64, Vec<C64>)> = None;
            for (idx, c) in pool.iter().enumerate() {
                let mut r = c.clone();
                for _ in 0..2 {
                    for q in &chosen {
                        let p = cdot(q, &r);
                        for k in 0..n {
                            r[k] -= q[k] * p;
                        }
                    }
                }
                let nr = cnorm(&r);
                if best.as_ref().is_none_or(|b| nr > b.1) {
                    best = Some((idx, nr, r));
                }
            }
            match best {
                Some((idx, nr, r)) if nr > 0.3 => {
                    chosen.push(r.into_iter().map(|z| z / nr).collect());
                    pool.swap_remove(idx);
                }
                _ => break,
            }
        }
        start = end;
    }
    // Completion fallback for pathological rounding; never expected in practice.
    let mut basis = 0;
    while chosen.len() < n && basis < n {
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[basis] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &chosen {
                let p = cdot(q, &r);
                for k in 0..n {
                    r[k] -= q[k] * p;
                }
            }
        }
        let nr = cnorm(&r);
        if nr > 0.3 {
            chosen.push(r.into_iter().map(|z| z / nr).collect());
        }
        basis += 1;
    }
    let mut pairs: Vec<(f64, Vec<C64>)> = chosen
        .into_iter()
        .map(|v| {
            let hv = h.matvec(&v);
            (cdot(&v, &hv).re, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Spectrum {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
    })
}

/// Haar-random unit vector from normalized complex Gaussians.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let nv = cnorm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// Haar-random pure density matrix, deterministic in `seed`.
pub fn random_pure_state(d: usize, seed: u64) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::outer(&random_unit_vector(d, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn min_eig_matches_full_spectrum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for n in 1..20 {
            let mut a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if n % 3 == 0 {
                // Repeated eigenvalues.
                a = vec![0.0; n * n];
                (0..n).for_each(|i| a[i * n + i] = if i % 2 == 0 { -1.0 } else { 2.0 });
            }
            let full = symmetric_eig(&a, n).0[0];
            let fast = symmetric_min_eig(&a, n);
            assert!((full - fast).abs() < 1e-12, "n = {n}: {full} vs {fast}");
        }
    }

    #[test]
    fn kron_identity() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_projectors() {
        let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_xx_flips_both() {
        let xx = kron(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_x());
        let out = xx.matvec(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(out, vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let sigma = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let pt = partial_trace(&kron(&rho, &sigma), (2, 2), Side::B).unwrap();
        assert!(pt.max_abs_diff(&rho) < 1e-15);
        let pt = partial_trace(&kron(&rho, &sigma), (2, 2), Side::A).unwrap();
        assert!(pt.max_abs_diff(&sigma) < 1e-15);
    }

    #[test]
    fn partial_trace_identity() {
        let pt = partial_trace(&ComplexMatrix::identity(4), (2, 2), Side::B).unwrap();
        assert_eq!(pt, ComplexMatrix::identity(2).scale(2.0));
    }

    #[test]
    fn partial_trace_bell_state() {
        // |Φ+⟩⟨Φ+| has entries 1/2 at (00,00), (00,11), (11,00), (11,11); tracing A leaves I/2.
        let s = 0.5f64.sqrt();
        let phi = ComplexMatrix::outer(&[c(s), c(0.0), c(0.0), c(s)]);
        let pt = partial_trace(&phi, (2, 2), Side::A).unwrap();
        assert!(pt.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_wrong_size() {
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(3), (2, 2), Side::A),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn eig_diagonal() {
        let s = hermitian_eig(&ComplexMatrix::diag(&[3.0, 1.0])).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let s = hermitian_eig(&ComplexMatrix::pauli_x()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let minus = s.eigenvectors[0].clone();
        // |−⟩ up to phase: components of equal modulus and opposite sign.
        assert!((minus[0].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((minus[0] + minus[1]).norm() < 1e-12);
        let plus = s.eigenvectors[1].clone();
        assert!((plus[0] - plus[1]).norm() < 1e-12);
    }

    #[test]
    fn eig_qubit_state() {
        let rho = &ComplexMatrix::identity(2) + &ComplexMatrix::pauli_z().scale(0.6);
        let s = hermitian_eig(&rho.scale(0.5)).unwrap();
        assert!((s.eigenvalues[0] - 0.2).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn eig_complex_degenerate() {
        let y = ComplexMatrix::pauli_y();
        let a = kron(&y, &ComplexMatrix::identity(3));
        let s = hermitian_eig(&a).unwrap();
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-12);
        assert_eq!(s.eigenvalues.len(), 6);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::Validation(_))));
    }

    #[test]
    fn random_state_is_pure_and_deterministic() {
        let rho = random_pure_state(3, 42);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((&rho * &rho).max_abs_diff(&rho) < 1e-10);
        assert_eq!(rho, random_pure_state(3, 42));
        assert_ne!(rho, random_pure_state(3, 43));
    }

    #[test]
    fn haar_mean_is_maximally_mixed() {
        let mut acc = ComplexMatrix::zeros(2, 2);
        let n = 10_000;
        for seed in 0..n {
            acc = &acc + &random_pure_state(2, seed);
        }
        let mean = acc.scale(1.0 / n as f64);
        assert!(mean.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 0.02);
    }
}
