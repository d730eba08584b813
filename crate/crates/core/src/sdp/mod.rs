//! Semidefinite programs in primal standard form.
//!
//! maximize ⟨C, X⟩ subject to ⟨A_k, X⟩ = b_k, ⟨G_l, X⟩ ≤ h_l, X ⪰ 0,
//! where X is block diagonal with real symmetric, complex Hermitian and
//! nonnegative-diagonal blocks. ⟨A, X⟩ is Re Tr(A X).
//!
//! The solver is an infeasible primal-dual interior-point method with
//! Nesterov-Todd scaling and Mehrotra's predictor-corrector. Complex blocks
//! are embedded as real symmetric blocks of twice the size.

pub(crate) mod dense;

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use dense::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Real symmetric positive semidefinite.
    Real,
    /// Complex Hermitian positive semidefinite.
    Complex,
    /// Diagonal with nonnegative entries.
    Nonnegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub size: usize,
    pub kind: BlockKind,
}

/// A Hermitian coefficient matrix restricted to one block.
///
/// Entry `(i, j, v)` with `i <= j` places `v` at `(i, j)` and its conjugate at
/// `(j, i)`. Repeated positions add up.
#[derive(Debug, Clone, PartialEq)]
pub struct Coeff {
    pub block: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl Coeff {
    pub fn new(block: usize) -> Self {
        Coeff { block, entries: Vec::new() }
    }

    pub fn entry(block: usize, i: usize, j: usize, v: C64) -> Self {
        let mut c = Coeff::new(block);
        c.push(i, j, v);
        c
    }

    pub fn real(block: usize, i: usize, j: usize, v: f64) -> Self {
        Self::entry(block, i, j, C64::new(v, 0.0))
    }

    /// Adds `v` at `(i, j)` and `conj(v)` at `(j, i)`, in either orientation.
    pub fn push(&mut self, i: usize, j: usize, v: C64) {
        if i <= j {
            self.entries.push((i, j, v));
        } else {
            self.entries.push((j, i, v.conj()));
        }
    }

    pub fn scaled_identity(block: usize, n: usize, s: f64) -> Self {
        Coeff { block, entries: (0..n).map(|i| (i, i, C64::new(s, 0.0))).collect() }
    }

    /// Upper triangle of a Hermitian matrix; the lower triangle is ignored.
    pub fn from_dense(block: usize, m: &ComplexMatrix) -> Self {
        let mut c = Coeff::new(block);
        for i in 0..m.rows() {
            for j in i..m.cols() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    c.entries.push((i, j, v));
                }
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<Coeff>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<Coeff>, rhs: f64) -> Self {
        LinearConstraint { terms, rhs }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<Block>,
    pub objective: Vec<Coeff>,
    pub equalities: Vec<LinearConstraint>,
    /// Constraints of the form ⟨G, X⟩ ≤ h.
    pub inequalities: Vec<LinearConstraint>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, size: usize, kind: BlockKind) -> usize {
        self.blocks.push(Block { size, kind });
        self.blocks.len() - 1
    }

    pub fn add_equality(&mut self, terms: Vec<Coeff>, rhs: f64) {
        self.equalities.push(LinearConstraint::new(terms, rhs));
    }

    pub fn add_inequality(&mut self, terms: Vec<Coeff>, rhs: f64) {
        self.inequalities.push(LinearConstraint::new(terms, rhs));
    }

    /// Entrywise Σ_k s_k X_k = R for n×n blocks, as real equalities.
    pub fn add_matrix_equality(&mut self, terms: &[(usize, f64)], rhs: &ComplexMatrix) {
        let n = rhs.rows();
        let im = C64::new(0.0, 1.0);
        for i in 0..n {
            for j in i..n {
                let re = terms.iter().map(|&(b, s)| Coeff::real(b, i, j, s)).collect();
                if i == j {
                    self.add_equality(re, rhs[(i, i)].re);
                } else {
                    self.add_equality(re, 2.0 * rhs[(i, j)].re);
                    let imag: Vec<Coeff> = terms
                        .iter()
                        .filter(|&&(b, _)| self.blocks[b].kind == BlockKind::Complex)
                        .map(|&(b, s)| Coeff::entry(b, i, j, im.scale(s)))
                        .collect();
                    if !imag.is_empty() {
                        self.add_equality(imag, 2.0 * rhs[(i, j)].im);
                    }
                }
            }
        }
    }

    fn check_coeff(&self, c: &Coeff, what: &str) -> Result<()> {
        let b = self
            .blocks
            .get(c.block)
            .ok_or_else(|| Error::Dimension(format!("{what}: block {} does not exist", c.block)))?;
        for &(i, j, v) in &c.entries {
            if i > j || j >= b.size {
                return Err(Error::Dimension(format!("{what}: entry ({i},{j}) outside block of size {}", b.size)));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Validation(format!("{what}: non-finite coefficient")));
            }
            let imag_ok = match b.kind {
                BlockKind::Complex => i != j || v.im.abs() <= 1e-12,
                _ => v.im.abs() <= 1e-12,
            };
            if !imag_ok {
                return Err(Error::Validation(format!("{what}: coefficient matrix is not Hermitian at ({i},{j})")));
            }
            if b.kind == BlockKind::Nonnegative && i != j {
                return Err(Error::Dimension(format!("{what}: off-diagonal entry in a diagonal block")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.iter().any(|b| b.size == 0) {
            return Err(Error::Dimension("empty block".into()));
        }
        for c in &self.objective {
            self.check_coeff(c, "objective")?;
        }
        for (k, con) in self.equalities.iter().chain(&self.inequalities).enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::Validation(format!("constraint {k}: non-finite right-hand side")));
            }
            for c in &con.terms {
                self.check_coeff(c, &format!("constraint {k}"))?;
            }
        }
        Ok(())
    }

    /// Re Tr(C X) summed over blocks.
    pub fn eval(&self, terms: &[Coeff], x: &[ComplexMatrix]) -> f64 {
        terms
            .iter()
            .map(|c| {
                c.entries
                    .iter()
                    .map(|&(i, j, v)| {
                        if i == j {
                            (v * x[c.block][(i, i)]).re
                        } else {
                            2.0 * (v * x[c.block][(j, i)]).re
                        }
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    /// Plain-text dump of the problem as given (before real embedding).
    ///
    /// Lines are `k block i j re im`, with k = 0 for the objective, then the
    /// equalities and inequalities numbered from 1 in that order.
    pub fn dump(&self) -> String {
        let mut s = String::from("# maximize <C,X> s.t. <A_k,X> = b_k, <G_l,X> <= h_l, X psd\n");
        let kinds: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let tag = match b.kind {
                    BlockKind::Real => "r",
                    BlockKind::Complex => "c",
                    BlockKind::Nonnegative => "d",
                };
                format!("{}{tag}", b.size)
            })
            .collect();
        let _ = writeln!(s, "blocks {}", kinds.join(" "));
        let _ = writeln!(s, "equalities {}", self.equalities.len());
        let _ = writeln!(s, "inequalities {}", self.inequalities.len());
        let rhs: Vec<String> = self.equalities.iter().chain(&self.inequalities).map(|c| format!("{}", c.rhs)).collect();
        let _ = writeln!(s, "rhs {}", rhs.join(" "));
        let all = std::iter::once(&self.objective).chain(self.equalities.iter().chain(&self.inequalities).map(|c| &c.terms));
        for (k, terms) in all.enumerate() {
            for c in terms {
                for &(i, j, v) in &c.entries {
                    let _ = writeln!(s, "{k} {} {i} {j} {} {}", c.block, v.re, v.im);
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
            SdpStatus::MaxIter => "max_iter",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    /// Looser tolerance accepted when progress stalls or the iteration cap is hit.
    pub accept_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-8, accept_tol: 1e-7, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal blocks, in the problem's block order.
    pub blocks: Vec<ComplexMatrix>,
    /// Dual multipliers: equalities first, then inequalities.
    pub y: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
}

/// Feasibility of a returned point, recomputed from the problem data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub objective: f64,
    pub max_equality_violation: f64,
    pub max_inequality_violation: f64,
    pub min_eigenvalue: f64,
}

impl Verification {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_equality_violation <= tol && self.max_inequality_violation <= tol && self.min_eigenvalue >= -tol
    }
}

pub fn verify(p: &SdpProblem, x: &[ComplexMatrix]) -> Result<Verification> {
    if x.len() != p.blocks.len() || x.iter().zip(&p.blocks).any(|(m, b)| m.rows() != b.size || m.cols() != b.size) {
        return Err(Error::Dimension("block shapes do not match the problem".into()));
    }
    let eq = p.equalities.iter().map(|c| (p.eval(&c.terms, x) - c.rhs).abs()).fold(0.0, f64::max);
    let ineq = p.inequalities.iter().map(|c| (p.eval(&c.terms, x) - c.rhs).max(0.0)).fold(0.0, f64::max);
    let mut min_eig = f64::INFINITY;
    for (m, b) in x.iter().zip(&p.blocks) {
        let e = match b.kind {
            BlockKind::Nonnegative => (0..b.size).map(|i| m[(i, i)].re).fold(f64::INFINITY, f64::min),
            _ => m.hermitian_part().min_eigenvalue()?,
        };
        min_eig = min_eig.min(e);
    }
    Ok(Verification {
        objective: p.eval(&p.objective, x),
        max_equality_violation: eq,
        max_inequality_violation: ineq,
        min_eigenvalue: min_eig,
    })
}

// ---------------------------------------------------------------------------
// Real embedded form.

#[derive(Debug, Clone, Copy)]
enum Cone {
    Psd(usize),
    Nonneg(usize),
}

impl Cone {
    fn order(self) -> usize {
        match self {
            Cone::Psd(s) | Cone::Nonneg(s) => s,
        }
    }
    fn len(self) -> usize {
        match self {
            Cone::Psd(s) => s * s,
            Cone::Nonneg(k) => k,
        }
    }
}

/// Coefficients on one cone with both orientations listed for off-diagonal entries.
#[derive(Debug, Clone)]
struct Sparse {
    cone: usize,
    entries: Vec<(usize, usize, f64)>,
}

type Blocks = Vec<Vec<f64>>;

struct Embedded {
    cones: Vec<Cone>,
    c: Vec<Sparse>,
    a: Vec<Vec<Sparse>>,
    b: Vec<f64>,
}

fn embed_coeff(p: &SdpProblem, c: &Coeff, out: &mut Vec<Sparse>) {
    let n = p.blocks[c.block].size;
    let mut e = Vec::new();
    let mut put = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            e.push((i, j, v));
            if i != j {
                e.push((j, i, v));
            }
        }
    };
    for &(i, j, v) in &c.entries {
        match p.blocks[c.block].kind {
            BlockKind::Real | BlockKind::Nonnegative => put(i, j, v.re),
            BlockKind::Complex => {
                if i == j {
                    put(i, i, 0.5 * v.re);
                    put(n + i, n + i, 0.5 * v.re);
                } else {
                    put(i, j, 0.5 * v.re);
                    put(n + i, n + j, 0.5 * v.re);
                    put(i, n + j, -0.5 * v.im);
                    put(j, n + i, 0.5 * v.im);
                }
            }
        }
    }
    if let Some(s) = out.iter_mut().find(|s| s.cone == c.block) {
        s.entries.extend(e);
    } else if !e.is_empty() {
        out.push(Sparse { cone: c.block, entries: e });
    }
}

fn merge(entries: &mut Vec<(usize, usize, f64)>) {
    entries.sort_by_key(|&(i, j, _)| (i, j));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
    for &(i, j, v) in entries.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|e| e.2 != 0.0);
    *entries = out;
}

fn embed(p: &SdpProblem) -> Embedded {
    let mut cones: Vec<Cone> = p
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Real => Cone::Psd(b.size),
            BlockKind::Complex => Cone::Psd(2 * b.size),
            BlockKind::Nonnegative => Cone::Nonneg(b.size),
        })
        .collect();
    let slack = cones.len();
    if !p.inequalities.is_empty() {
        cones.push(Cone::Nonneg(p.inequalities.len()));
    }
    let convert = |terms: &[Coeff]| {
        let mut out = Vec::new();
        for c in terms {
            embed_coeff(p, c, &mut out);
        }
        for s in out.iter_mut() {
            merge(&mut s.entries);
        }
        out.retain(|s| !s.entries.is_empty());
        out
    };
    let c = convert(&p.objective);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for con in &p.equalities {
        a.push(convert(&con.terms));
        b.push(con.rhs);
    }
    for (l, con) in p.inequalities.iter().enumerate() {
        let mut row = convert(&con.terms);
        row.push(Sparse { cone: slack, entries: vec![(l, l, 1.0)] });
        a.push(row);
        b.push(con.rhs);
    }
    Embedded { cones, c, a, b }
}

impl Embedded {
    fn zeros(&self) -> Blocks {
        self.cones.iter().map(|c| vec![0.0; c.len()]).collect()
    }

    fn index(&self, cone: usize, i: usize, j: usize) -> usize {
        match self.cones[cone] {
            Cone::Psd(s) => i * s + j,
            Cone::Nonneg(_) => i,
        }
    }

    fn apply_one(&self, row: &[Sparse], x: &Blocks) -> f64 {
        row.iter()
            .map(|s| s.entries.iter().map(|&(i, j, v)| v * x[s.cone][self.index(s.cone, i, j)]).sum::<f64>())
            .sum()
    }

    fn apply(&self, x: &Blocks) -> Vec<f64> {
        self.a.iter().map(|row| self.apply_one(row, x)).collect()
    }

    fn add_to(&self, row: &[Sparse], alpha: f64, out: &mut Blocks) {
        for s in row {
            for &(i, j, v) in &s.entries {
                let k = self.index(s.cone, i, j);
                out[s.cone][k] += alpha * v;
            }
        }
    }

    fn adjoint(&self, y: &[f64]) -> Blocks {
        let mut out = self.zeros();
        for (row, &yk) in self.a.iter().zip(y) {
            if yk != 0.0 {
                self.add_to(row, yk, &mut out);
            }
        }
        out
    }

    fn dense_c(&self) -> Blocks {
        let mut out = self.zeros();
        self.add_to(&self.c, 1.0, &mut out);
        out
    }

    /// Symmetric-vectorized row, for the dependency check.
    fn svec(&self, row: &[Sparse], offsets: &[usize], total: usize) -> Vec<f64> {
        let mut v = vec![0.0; total];
        for s in row {
            match self.cones[s.cone] {
                Cone::Psd(n) => {
                    for &(i, j, a) in &s.entries {
                        if i <= j {
                            let k = offsets[s.cone] + i * n + j - i * (i + 1) / 2;
                            v[k] += if i == j { a } else { a * std::f64::consts::SQRT_2 };
                        }
                    }
                }
                Cone::Nonneg(_) => {
                    for &(i, _, a) in &s.entries {
                        v[offsets[s.cone] + i] += a;
                    }
                }
            }
        }
        v
    }

    /// Drops linearly dependent rows. Returns the kept row indices, or None
    /// when a dependent row contradicts the others.
    fn independent_rows(&self) -> Option<Vec<usize>> {
        let mut offsets = Vec::new();
        let mut total = 0;
        for c in &self.cones {
            offsets.push(total);
            total += match *c {
                Cone::Psd(s) => s * (s + 1) / 2,
                Cone::Nonneg(k) => k,
            };
        }
        let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut kept = Vec::new();
        for (k, row) in self.a.iter().enumerate() {
            let mut v = self.svec(row, &offsets, total);
            let mut beta = self.b[k];
            let n0 = dense::norm(&v);
            if n0 == 0.0 {
                if beta.abs() > 1e-9 {
                    return None;
                }
                continue;
            }
            for _ in 0..2 {
                for (q, bq) in &basis {
                    let c = dense::dot(q, &v);
                    if c != 0.0 {
                        v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                        beta -= c * bq;
                    }
                }
            }
            let n1 = dense::norm(&v);
            if n1 <= 1e-9 * n0 {
                if beta.abs() > 1e-7 * (1.0 + self.b[k].abs()) * n0.max(1.0) / n0.min(1.0) {
                    return None;
                }
                continue;
            }
            v.iter_mut().for_each(|x| *x /= n1);
            basis.push((v, beta / n1));
            kept.push(k);
        }
        Some(kept)
    }
}

/// Nesterov-Todd scaling of one cone.
enum Scaling {
    Psd { g: Mat, ginv: Mat, w: Mat, sv: Vec<f64>, lx: Mat, lz: Mat },
    Nonneg { w: Vec<f64> },
}

fn scaling(cone: Cone, x: &[f64], z: &[f64]) -> Option<Scaling> {
    match cone {
        Cone::Psd(s) => {
            let lx = dense::cholesky(x, s)?;
            let lz = dense::cholesky(z, s)?;
            let b = dense::matmul(&dense::transpose(&lz, s), &lx, s);
            let (sv, v) = dense::svd_right(&b, s);
            if sv.iter().any(|&x| !(x > 0.0)) {
                return None;
            }
            let mut g = dense::matmul(&lx, &v, s);
            for i in 0..s {
                for j in 0..s {
                    g[i * s + j] /= sv[j].sqrt();
                }
            }
            let mut ginv = dense::matmul(&dense::transpose(&v, s), &dense::lower_inverse(&lx, s), s);
            for i in 0..s {
                for j in 0..s {
                    ginv[i * s + j] *= sv[i].sqrt();
                }
            }
            let mut w = dense::matmul(&g, &dense::transpose(&g, s), s);
            dense::symmetrize(&mut w, s);
            Some(Scaling::Psd { g, ginv, w, sv, lx, lz })
        }
        Cone::Nonneg(_) => {
            if x.iter().chain(z).any(|&v| !(v > 0.0)) {
                return None;
            }
            Some(Scaling::Nonneg { w: x.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect() })
        }
    }
}

/// W·K·W for one cone.
fn w_apply(sc: &Scaling, k: &[f64], s: usize) -> Vec<f64> {
    match sc {
        Scaling::Psd { w, .. } => {
            let mut r = dense::matmul(&dense::matmul(w, k, s), w, s);
            dense::symmetrize(&mut r, s);
            r
        }
        Scaling::Nonneg { w } => k.iter().zip(w).map(|(a, b)| a * b * b).collect(),
    }
}

/// Largest step in [0, 1] keeping x + α·dx inside the cone, damped by `tau`.
fn max_step(cone: Cone, sc: &Scaling, x: &[f64], dx: &[f64], primal: bool, tau: f64) -> f64 {
    let alpha = match (cone, sc) {
        (Cone::Psd(s), Scaling::Psd { lx, lz, .. }) => {
            let l = if primal { lx } else { lz };
            let li = dense::lower_inverse(l, s);
            let mut t = dense::congruence(&li, dx, s);
            dense::symmetrize(&mut t, s);
            let lam = dense::min_eig(&t, s);
            if lam < 0.0 {
                -1.0 / lam
            } else {
                f64::INFINITY
            }
        }
        _ => x
            .iter()
            .zip(dx)
            .filter(|(_, d)| **d < 0.0)
            .map(|(v, d)| -v / d)
            .fold(f64::INFINITY, f64::min),
    };
    (tau * alpha).min(1.0)
}

fn blocks_dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| dense::dot(x, y)).sum()
}

fn blocks_norm(a: &Blocks) -> f64 {
    blocks_dot(a, a).sqrt()
}

fn axpy(y: &mut Blocks, alpha: f64, x: &Blocks) {
    for (yb, xb) in y.iter_mut().zip(x) {
        yb.iter_mut().zip(xb).for_each(|(a, b)| *a += alpha * b);
    }
}

/// Schur complement M_ij = ⟨A_i, W A_j W⟩.
fn schur(e: &Embedded, scalings: &[Scaling]) -> Mat {
    let m = e.a.len();
    let mut mat = vec![0.0; m * m];
    for (cone_idx, &cone) in e.cones.iter().enumerate() {
        let touching: Vec<(usize, &Vec<(usize, usize, f64)>)> = e
            .a
            .iter()
            .enumerate()
            .filter_map(|(k, row)| row.iter().find(|s| s.cone == cone_idx).map(|s| (k, &s.entries)))
            .collect();
        match (&scalings[cone_idx], cone) {
            (Scaling::Psd { w, .. }, Cone::Psd(s)) => {
                for (pj, &(j, ej)) in touching.iter().enumerate() {
                    if ej.len() > s {
                        let mut aj = vec![0.0; s * s];
                        for &(r, c, v) in ej {
                            aj[r * s + c] += v;
                        }
                        let bj = dense::matmul(&dense::matmul(w, &aj, s), w, s);
                        for &(i, ei) in &touching[..=pj] {
                            let v: f64 = ei.iter().map(|&(p, q, a)| a * bj[p * s + q]).sum();
                            mat[i * m + j] += v;
                        }
                    } else {
                        for &(i, ei) in &touching[..=pj] {
                            let mut v = 0.0;
                            for &(p, q, a) in ei {
                                for &(r, c, b) in ej {
                                    v += a * b * w[q * s + r] * w[c * s + p];
                                }
                            }
                            mat[i * m + j] += v;
                        }
                    }
                }
            }
            (Scaling::Nonneg { w }, _) => {
                for (pj, &(j, ej)) in touching.iter().enumerate() {
                    for &(i, ei) in &touching[..=pj] {
                        let mut v = 0.0;
                        for &(p, _, a) in ei {
                            for &(r, _, b) in ej {
                                if p == r {
                                    v += a * b * w[p] * w[p];
                                }
                            }
                        }
                        mat[i * m + j] += v;
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    for i in 0..m {
        for j in 0..i {
            mat[i * m + j] = mat[j * m + i];
        }
    }
    mat
}

struct Direction {
    dx: Blocks,
    dy: Vec<f64>,
    dz: Blocks,
}

struct Best {
    merit: f64,
    x: Blocks,
    y: Vec<f64>,
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    gap: f64,
}

struct Newton<'a> {
    e: &'a Embedded,
    scalings: &'a [Scaling],
    chol: &'a Mat,
    schur: &'a Mat,
    rp: &'a [f64],
    rd: &'a Blocks,
}

impl Newton<'_> {
    /// Solves A(ΔX) = rp, Aᵀ(Δy) − ΔZ = Rd, ΔX + W ΔZ W = R.
    fn solve(&self, r: Blocks) -> Direction {
        let e = self.e;
        let m = e.a.len();
        let mut t = r.clone();
        for (k, cone) in e.cones.iter().enumerate() {
            let wrw = w_apply(&self.scalings[k], &self.rd[k], cone.order());
            t[k].iter_mut().zip(&wrw).for_each(|(a, b)| *a += b);
        }
        let rhs: Vec<f64> = e.apply(&t).iter().zip(self.rp).map(|(a, b)| a - b).collect();
        let mut dy = rhs.clone();
        if m > 0 {
            dense::cholesky_solve(self.chol, m, &mut dy);
            // A few rounds of iterative refinement against the unregularized system.
            for _ in 0..3 {
                let mut res = rhs.clone();
                for i in 0..m {
                    let row = &self.schur[i * m..(i + 1) * m];
                    res[i] -= row.iter().zip(&dy).map(|(a, b)| a * b).sum::<f64>();
                }
                if dense::norm(&res) <= 1e-15 * (1.0 + dense::norm(&rhs)) {
                    break;
                }
                dense::cholesky_solve(self.chol, m, &mut res);
                dy.iter_mut().zip(&res).for_each(|(a, b)| *a += b);
            }
        }
        let mut dz = e.adjoint(&dy);
        axpy(&mut dz, -1.0, self.rd);
        let mut dx = r;
        for (k, cone) in e.cones.iter().enumerate() {
            let wzw = w_apply(&self.scalings[k], &dz[k], cone.order());
            dx[k].iter_mut().zip(&wzw).for_each(|(a, b)| *a -= b);
            if let Cone::Psd(s) = cone {
                dense::symmetrize(&mut dx[k], *s);
                dense::symmetrize(&mut dz[k], *s);
            }
        }
        Direction { dx, dy, dz }
    }
}

/// Right-hand side R of the complementarity equation for the corrector.
fn corrector_rhs(e: &Embedded, scalings: &[Scaling], x: &Blocks, z: &Blocks, aff: &Direction, sigma_mu: f64) -> Blocks {
    let mut out = Vec::with_capacity(e.cones.len());
    for (k, &cone) in e.cones.iter().enumerate() {
        match (&scalings[k], cone) {
            (Scaling::Psd { g, ginv, sv, .. }, Cone::Psd(s)) => {
                let dxs = dense::congruence(ginv, &aff.dx[k], s);
                let dzs = dense::matmul(&dense::matmul(&dense::transpose(g, s), &aff.dz[k], s), g, s);
                let mut prod = dense::matmul(&dxs, &dzs, s);
                dense::symmetrize(&mut prod, s);
                let mut rt = vec![0.0; s * s];
                for i in 0..s {
                    for j in 0..s {
                        let mut v = -prod[i * s + j];
                        if i == j {
                            v += sigma_mu - sv[i] * sv[i];
                        }
                        rt[i * s + j] = 2.0 * v / (sv[i] + sv[j]);
                    }
                }
                let mut r = dense::congruence(g, &rt, s);
                dense::symmetrize(&mut r, s);
                out.push(r);
            }
            (Scaling::Nonneg { .. }, Cone::Nonneg(n)) => {
                out.push(
                    (0..n)
                        .map(|i| (sigma_mu - x[k][i] * z[k][i] - aff.dx[k][i] * aff.dz[k][i]) / z[k][i])
                        .collect(),
                );
            }
            _ => unreachable!(),
        }
    }
    out
}

fn extract(p: &SdpProblem, x: &Blocks) -> Vec<ComplexMatrix> {
    p.blocks
        .iter()
        .zip(x)
        .map(|(b, v)| {
            let n = b.size;
            match b.kind {
                BlockKind::Real => ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j], 0.0)),
                BlockKind::Nonnegative => {
                    ComplexMatrix::from_fn(n, n, |i, j| C64::new(if i == j { v[i] } else { 0.0 }, 0.0))
                }
                BlockKind::Complex => {
                    let s = 2 * n;
                    ComplexMatrix::from_fn(n, n, |i, j| {
                        C64::new(
                            0.5 * (v[i * s + j] + v[(n + i) * s + n + j]),
                            0.5 * (v[(n + i) * s + j] - v[i * s + n + j]),
                        )
                    })
                }
            }
        })
        .collect()
}

pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &SdpOptions::default())
}

pub fn solve_with(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let full = embed(p);
    let m_all = full.a.len();
    let empty = |status| SdpSolution {
        status,
        blocks: p.blocks.iter().map(|b| ComplexMatrix::zeros(b.size, b.size)).collect(),
        y: vec![0.0; m_all],
        primal_value: f64::NAN,
        dual_value: f64::NAN,
        iterations: 0,
        primal_infeasibility: f64::NAN,
        dual_infeasibility: f64::NAN,
        relative_gap: f64::NAN,
    };
    let Some(kept) = full.independent_rows() else {
        return Ok(empty(SdpStatus::Infeasible));
    };
    let e = Embedded {
        cones: full.cones.clone(),
        c: full.c.clone(),
        a: kept.iter().map(|&k| full.a[k].clone()).collect(),
        b: kept.iter().map(|&k| full.b[k]).collect(),
    };
    let m = e.a.len();
    let c_dense = e.dense_c();
    let n_total: usize = e.cones.iter().map(|c| c.order()).sum();
    let norm_b = dense::norm(&e.b);
    let norm_c = blocks_norm(&c_dense);

    // Starting point.
    let row_norms: Vec<f64> = e
        .a
        .iter()
        .map(|row| row.iter().flat_map(|s| s.entries.iter().map(|t| t.2 * t.2)).sum::<f64>().sqrt())
        .collect();
    let sqrt_n = (n_total as f64).sqrt();
    let xi = e
        .b
        .iter()
        .zip(&row_norms)
        .map(|(b, a)| sqrt_n * (1.0 + b.abs()) / (1.0 + a))
        .fold(10.0f64.max(sqrt_n), f64::max);
    let eta = row_norms.iter().copied().fold(10.0f64.max(sqrt_n).max(norm_c), f64::max);
    let init = |scale: f64| -> Blocks {
        e.cones
            .iter()
            .map(|c| match *c {
                Cone::Psd(s) => dense::identity(s, scale),
                Cone::Nonneg(k) => vec![scale; k],
            })
            .collect()
    };
    let mut x = init(xi);
    let mut z = init(eta);
    let mut y = vec![0.0; m];

    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;
    let (mut pinf, mut dinf, mut gap);
    let (mut pobj, mut dobj);
    let mut best: Option<Best> = None;
    let mut stalled = 0;
    loop {
        let ax = e.apply(&x);
        let rp: Vec<f64> = e.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = e.adjoint(&y);
        let mut rd = c_dense.clone();
        axpy(&mut rd, 1.0, &z);
        axpy(&mut rd, -1.0, &aty);
        pobj = blocks_dot(&c_dense, &x);
        dobj = dense::dot(&e.b, &y);
        let xz = blocks_dot(&x, &z);
        pinf = dense::norm(&rp) / (1.0 + norm_b);
        dinf = blocks_norm(&rd) / (1.0 + norm_c);
        gap = ((pobj - dobj).abs()).max(xz.max(0.0)) / (1.0 + pobj.abs() + dobj.abs());
        let merit = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|b: &Best| merit < b.merit) {
            best = Some(Best { merit, x: x.clone(), y: y.clone(), pobj, dobj, pinf, dinf, gap });
            stalled = 0;
        } else {
            stalled += 1;
        }
        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        // Infeasibility certificates.
        if dobj < 0.0 {
            let mut cert = aty.clone();
            axpy(&mut cert, -1.0, &z);
            if blocks_norm(&cert) / (-dobj) <= opts.tol && pinf > opts.tol {
                status = SdpStatus::Infeasible;
                break;
            }
        }
        if pobj > 0.0 && dense::norm(&ax) / pobj <= opts.tol && dinf > opts.tol {
            status = SdpStatus::Unbounded;
            break;
        }
        if iterations >= opts.max_iter || (stalled >= 15 && best.as_ref().is_some_and(|b| b.merit <= opts.accept_tol)) {
            break;
        }
        iterations += 1;

        let Some(scalings) = e
            .cones
            .iter()
            .enumerate()
            .map(|(k, &c)| scaling(c, &x[k], &z[k]))
            .collect::<Option<Vec<_>>>()
        else {
            break;
        };
        let mut mat = schur(&e, &scalings);
        let mat0 = mat.clone();
        let chol = if m == 0 {
            Vec::new()
        } else {
            let diag_max = (0..m).map(|i| mat[i * m + i]).fold(0.0, f64::max);
            let mut reg = 0.0;
            loop {
                if let Some(l) = dense::cholesky(&mat, m) {
                    break l;
                }
                let next = if reg == 0.0 { 1e-14 * diag_max.max(1e-300) } else { reg * 10.0 };
                for i in 0..m {
                    mat[i * m + i] += next - reg;
                }
                reg = next;
                if reg > 1e-2 * diag_max.max(1.0) {
                    break Vec::new();
                }
            }
        };
        if m > 0 && chol.is_empty() {
            break;
        }
        let newton = Newton { e: &e, scalings: &scalings, chol: &chol, schur: &mat0, rp: &rp, rd: &rd };
        let mu = xz / n_total as f64;

        let mut neg_x = x.clone();
        neg_x.iter_mut().for_each(|b| b.iter_mut().for_each(|v| *v = -*v));
        let aff = newton.solve(neg_x);
        let step = |d: &Direction, tau: f64| {
            let mut ap = 1.0f64;
            let mut ad = 1.0f64;
            for (k, &c) in e.cones.iter().enumerate() {
                ap = ap.min(max_step(c, &scalings[k], &x[k], &d.dx[k], true, tau));
                ad = ad.min(max_step(c, &scalings[k], &z[k], &d.dz[k], false, tau));
            }
            (ap, ad)
        };
        let (ap, ad) = step(&aff, 1.0);
        let mut xa = x.clone();
        axpy(&mut xa, ap, &aff.dx);
        let mut za = z.clone();
        axpy(&mut za, ad, &aff.dz);
        let mu_aff = blocks_dot(&xa, &za) / n_total as f64;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        let r = corrector_rhs(&e, &scalings, &x, &z, &aff, sigma * mu);
        let d = newton.solve(r);
        let tau = 0.9 + 0.09 * ap.min(ad);
        let (ap, ad) = step(&d, tau);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        axpy(&mut x, ap, &d.dx);
        axpy(&mut z, ad, &d.dz);
        y.iter_mut().zip(&d.dy).for_each(|(a, b)| *a += ad * b);
        for (k, c) in e.cones.iter().enumerate() {
            if let Cone::Psd(s) = c {
                dense::symmetrize(&mut x[k], *s);
                dense::symmetrize(&mut z[k], *s);
            }
        }
    }
    // Numerical trouble near the optimum can make the iterates drift away; fall
    // back to the best point seen.
    if status == SdpStatus::MaxIter {
        if let Some(b) = best.filter(|b| b.merit < pinf.max(dinf).max(gap)) {
            (x, y, pobj, dobj, pinf, dinf, gap) = (b.x, b.y, b.pobj, b.dobj, b.pinf, b.dinf, b.gap);
        }
    }
    if status == SdpStatus::MaxIter && pinf <= opts.accept_tol && dinf <= opts.accept_tol && gap <= opts.accept_tol {
        status = SdpStatus::Optimal;
    }
    let mut y_full = vec![0.0; m_all];
    for (k, &orig) in kept.iter().enumerate() {
        y_full[orig] = y[k];
    }
    Ok(SdpSolution {
        status,
        blocks: extract(p, &x),
        y: y_full,
        primal_value: pobj,
        dual_value: dobj,
        iterations,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        relative_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// max ⟨C, X⟩ s.t. Tr X = 1 gives the top eigenvalue of C.
    fn spectral(cm: &ComplexMatrix, kind: BlockKind) -> SdpSolution {
        let mut p = SdpProblem::new();
        let b = p.add_block(cm.rows(), kind);
        p.objective.push(Coeff::from_dense(b, cm));
        p.add_equality(vec![Coeff::scaled_identity(b, cm.rows(), 1.0)], 1.0);
        solve(&p).unwrap()
    }

    #[test]
    fn top_eigenvalue_real() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| c([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]][i][j], 0.0));
        let s = spectral(&m, BlockKind::Real);
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - (2.0 + 2f64.sqrt())).abs() < 1e-7, "{}", s.primal_value);
    }

    #[test]
    fn top_eigenvalue_complex() {
        let m = ComplexMatrix::pauli_y();
        let s = spectral(&m, BlockKind::Complex);
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        let x = &s.blocks[0];
        // The optimum is the +1 eigenprojector of σ_y.
        assert!((x[(0, 1)] - c(0.0, -0.5)).norm() < 1e-6, "{:?}", x);
    }

    #[test]
    fn helstrom_two_states() {
        // Discriminate |0⟩ and |+⟩ with equal priors.
        let r0 = ComplexMatrix::from_fn(2, 2, |i, j| c(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0));
        let r1 = ComplexMatrix::from_fn(2, 2, |_, _| c(0.5, 0.0));
        let mut p = SdpProblem::new();
        let m0 = p.add_block(2, BlockKind::Complex);
        let m1 = p.add_block(2, BlockKind::Complex);
        p.objective.push(Coeff::from_dense(m0, &r0.scale(0.5)));
        p.objective.push(Coeff::from_dense(m1, &r1.scale(0.5)));
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            let one = if i == j { 1.0 } else { 0.0 };
            p.add_equality(vec![Coeff::real(m0, i, j, 1.0), Coeff::real(m1, i, j, 1.0)], one);
            if i != j {
                // Imaginary part of the off-diagonal entry.
                p.add_equality(vec![Coeff::entry(m0, i, j, c(0.0, 1.0)), Coeff::entry(m1, i, j, c(0.0, 1.0))], 0.0);
            }
        }
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        let want = 0.5 * (1.0 + 0.5f64.sqrt());
        assert!((s.primal_value - want).abs() < 1e-7, "{} vs {want}", s.primal_value);
        assert!(s.primal_value <= s.dual_value + 1e-6);
        let v = verify(&p, &s.blocks).unwrap();
        assert!(v.is_feasible(1e-7), "{v:?}");
    }

    #[test]
    fn inequality_and_nonnegative_blocks() {
        // max x0 + 2 x1 s.t. x0 + x1 <= 1, x >= 0.
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Nonnegative);
        p.objective = vec![Coeff { block: b, entries: vec![(0, 0, c(1.0, 0.0)), (1, 1, c(2.0, 0.0))] }];
        p.add_inequality(vec![Coeff::scaled_identity(b, 2, 1.0)], 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn dependent_equalities_are_dropped() {
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Real);
        p.objective.push(Coeff::real(b, 0, 1, 1.0));
        p.add_equality(vec![Coeff::scaled_identity(b, 2, 1.0)], 1.0);
        p.add_equality(vec![Coeff::scaled_identity(b, 2, 2.0)], 2.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        p.equalities[1].rhs = 3.0;
        assert_eq!(solve(&p).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // X ⪰ 0 with Tr X = -1.
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Real);
        p.add_equality(vec![Coeff::scaled_identity(b, 2, 1.0)], -1.0);
        assert_eq!(solve(&p).unwrap().status, SdpStatus::Infeasible);
        // max X_00 with X_11 = 1.
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Real);
        p.objective.push(Coeff::real(b, 0, 0, 1.0));
        p.add_equality(vec![Coeff::real(b, 1, 1, 1.0)], 1.0);
        assert_eq!(solve(&p).unwrap().status, SdpStatus::Unbounded);
    }

    #[test]
    fn malformed_input() {
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Real);
        p.objective.push(Coeff::real(b, 0, 2, 1.0));
        assert!(solve(&p).is_err());
        let mut p = SdpProblem::new();
        let b = p.add_block(2, BlockKind::Real);
        p.objective.push(Coeff::entry(b, 0, 1, c(0.0, 1.0)));
        assert!(solve(&p).is_err());
    }
}
