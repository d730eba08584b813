//! Scenarios, linear functionals on behaviors, and quantum strategies.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{kron, tol, ComplexMatrix};

pub fn rat_to_f64(r: &Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Priors {
    Uniform,
    /// Stored for completeness; rejected by validation unless uniform.
    Custom { alice: Vec<Rational64>, bob: Vec<Rational64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// Binary classical messages, or quantum systems of dimension `d`.
    Dimension { d: usize },
    /// Guessing probability of each sender's input bounded by `d1`, `d2`.
    Distinguishability { d1: Rational64, d2: Rational64, priors: Priors },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub constraint: Constraint,
}

impl Scenario {
    pub fn dimension(nx: usize, ny: usize, nz: usize, d: usize) -> Result<Self> {
        let s = Self { nx, ny, nz, constraint: Constraint::Dimension { d } };
        s.validate()?;
        Ok(s)
    }

    pub fn distinguishability(nx: usize, ny: usize, nz: usize, d1: Rational64, d2: Rational64) -> Result<Self> {
        let s = Self {
            nx,
            ny,
            nz,
            constraint: Constraint::Distinguishability { d1, d2, priors: Priors::Uniform },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 || self.nz < 2 {
            return Err(Error::Validation(format!(
                "scenario ({},{},{}) needs at least two inputs per sender and two outcomes",
                self.nx, self.ny, self.nz
            )));
        }
        match &self.constraint {
            Constraint::Dimension { d } if *d < 2 => {
                Err(Error::Validation(format!("dimension must be at least 2, got {d}")))
            }
            Constraint::Dimension { .. } => Ok(()),
            Constraint::Distinguishability { d1, d2, priors } => {
                check_d_range(*d1, self.nx, "D1")?;
                check_d_range(*d2, self.ny, "D2")?;
                match priors {
                    Priors::Uniform => Ok(()),
                    Priors::Custom { alice, bob } => {
                        let ua = alice.len() == self.nx
                            && alice.iter().all(|q| *q == Rational64::new(1, self.nx as i64));
                        let ub = bob.len() == self.ny
                            && bob.iter().all(|q| *q == Rational64::new(1, self.ny as i64));
                        if ua && ub {
                            Ok(())
                        } else {
                            Err(Error::Validation("only uniform priors are supported".into()))
                        }
                    }
                }
            }
        }
    }

    pub fn is_distinguishability(&self) -> bool {
        matches!(self.constraint, Constraint::Distinguishability { .. })
    }

    /// Same games, different dimension bound.
    pub fn with_dimension(&self, d: usize) -> Result<Self> {
        Self::dimension(self.nx, self.ny, self.nz, d)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }
}

pub fn check_d_range(d: Rational64, n: usize, label: &str) -> Result<()> {
    let lo = Rational64::new(1, n as i64);
    if d < lo || d > Rational64::from_integer(1) {
        return Err(Error::Validation(format!("{label} = {d} outside [1/{n}, 1]")));
    }
    Ok(())
}

/// Affine right-hand side `constant + d1·D1 + d2·D2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub constant: Rational64,
    pub d1: Rational64,
    pub d2: Rational64,
}

impl Rhs {
    pub fn constant(c: i64) -> Self {
        Self { constant: c.into(), d1: Zero::zero(), d2: Zero::zero() }
    }
}

/// Linear functional Σ c(x,y,z) p(z|x,y) with an affine right-hand side.
///
/// Indices are 0-based; outcome 0 is the label usually left implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    coeffs: Vec<Rational64>,
    pub rhs: Rhs,
}

impl Functional {
    pub fn zeros(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz, coeffs: vec![Zero::zero(); nx * ny * nz], rhs: Rhs::constant(0) }
    }

    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        assert!(x < self.nx && y < self.ny && z < self.nz, "functional index out of range");
        (x * self.ny + y) * self.nz + z
    }

    pub fn coeff(&self, x: usize, y: usize, z: usize) -> Rational64 {
        self.coeffs[self.idx(x, y, z)]
    }

    pub fn coeff_f64(&self, x: usize, y: usize, z: usize) -> f64 {
        rat_to_f64(&self.coeff(x, y, z))
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, c: Rational64) {
        let i = self.idx(x, y, z);
        self.coeffs[i] = c;
    }

    pub fn add(&mut self, x: usize, y: usize, z: usize, c: Rational64) {
        let i = self.idx(x, y, z);
        self.coeffs[i] += c;
    }

    /// Nonzero terms as (x, y, z, c).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, usize, Rational64)> + '_ {
        (0..self.nx).flat_map(move |x| {
            (0..self.ny).flat_map(move |y| {
                (0..self.nz).filter_map(move |z| {
                    let c = self.coeff(x, y, z);
                    (!c.is_zero()).then_some((x, y, z, c))
                })
            })
        })
    }

    pub fn check_scenario(&self, s: &Scenario) -> Result<()> {
        if (self.nx, self.ny, self.nz) != s.shape() {
            return Err(Error::Dimension(format!(
                "functional shape ({},{},{}) does not match scenario ({},{},{})",
                self.nx, self.ny, self.nz, s.nx, s.ny, s.nz
            )));
        }
        if !s.is_distinguishability() && (!self.rhs.d1.is_zero() || !self.rhs.d2.is_zero()) {
            return Err(Error::Validation(
                "dimension-bounded functionals cannot depend on D1 or D2".into(),
            ));
        }
        Ok(())
    }

    /// Same functional with outcome `z` renamed to `perm[z]`.
    pub fn relabel_outcomes(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.nx, self.ny, self.nz);
        out.rhs = self.rhs.clone();
        for (x, y, z, c) in self.terms() {
            out.set(x, y, perm[z], c);
        }
        out
    }

    pub fn rhs_exact(&self, d1: Rational64, d2: Rational64) -> Rational64 {
        self.rhs.constant + self.rhs.d1 * d1 + self.rhs.d2 * d2
    }

    /// Right-hand side evaluated at the scenario's D values (plain constant when dimension-bounded).
    pub fn rhs_for(&self, s: &Scenario) -> Rational64 {
        match &s.constraint {
            Constraint::Dimension { .. } => self.rhs.constant,
            Constraint::Distinguishability { d1, d2, .. } => self.rhs_exact(*d1, *d2),
        }
    }
}

pub fn rhs_value(f: &Functional, d1: f64, d2: f64) -> f64 {
    rat_to_f64(&f.rhs.constant) + rat_to_f64(&f.rhs.d1) * d1 + rat_to_f64(&f.rhs.d2) * d2
}

/// Conditional distribution p(z|x,y), stored as p[z][x][y].
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior<T = f64> {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub p: Vec<T>,
}

impl<T: Clone + Zero> Behavior<T> {
    pub fn zeros(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz, p: vec![T::zero(); nx * ny * nz] }
    }

    pub fn index(&self, z: usize, x: usize, y: usize) -> usize {
        (z * self.nx + x) * self.ny + y
    }

    pub fn get(&self, z: usize, x: usize, y: usize) -> T {
        self.p[self.index(z, x, y)].clone()
    }

    pub fn set(&mut self, z: usize, x: usize, y: usize, v: T) {
        let i = self.index(z, x, y);
        self.p[i] = v;
    }

    pub fn relabel_outcomes(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.nx, self.ny, self.nz);
        for z in 0..self.nz {
            for x in 0..self.nx {
                for y in 0..self.ny {
                    out.set(perm[z], x, y, self.get(z, x, y));
                }
            }
        }
        out
    }
}

impl Behavior<f64> {
    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.p.iter().enumerate() {
            if !(-tol::PROBABILITY..=1.0 + tol::PROBABILITY).contains(&v) {
                return Err(Error::Validation(format!("probability entry {i} = {v} outside [0, 1]")));
            }
        }
        for x in 0..self.nx {
            for y in 0..self.ny {
                let s: f64 = (0..self.nz).map(|z| self.get(z, x, y)).sum();
                if (s - 1.0).abs() > tol::PROBABILITY {
                    return Err(Error::Validation(format!(
                        "outcomes for input ({}, {}) sum to {s}",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Behavior<Rational64> {
    pub fn to_f64(&self) -> Behavior<f64> {
        Behavior { nx: self.nx, ny: self.ny, nz: self.nz, p: self.p.iter().map(rat_to_f64).collect() }
    }
}

fn check_shapes<T>(f: &Functional, b: &Behavior<T>) -> Result<()> {
    if (f.nx, f.ny, f.nz) != (b.nx, b.ny, b.nz) {
        return Err(Error::Dimension(format!(
            "functional ({},{},{}) vs behavior ({},{},{})",
            f.nx, f.ny, f.nz, b.nx, b.ny, b.nz
        )));
    }
    Ok(())
}

pub fn evaluate_functional(f: &Functional, b: &Behavior<f64>) -> Result<f64> {
    check_shapes(f, b)?;
    Ok(f.terms().map(|(x, y, z, c)| rat_to_f64(&c) * b.get(z, x, y)).sum())
}

pub fn evaluate_exact(f: &Functional, b: &Behavior<Rational64>) -> Result<Rational64> {
    check_shapes(f, b)?;
    Ok(f.terms().map(|(x, y, z, c)| c * b.get(z, x, y)).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub alice_states: Vec<ComplexMatrix>,
    pub bob_states: Vec<ComplexMatrix>,
    /// Effects on the joint Alice ⊗ Bob space, indexed by outcome.
    pub povm: Vec<ComplexMatrix>,
}

impl QuantumStrategy {
    pub fn dims(&self) -> (usize, usize) {
        (
            self.alice_states.first().map_or(0, |m| m.rows()),
            self.bob_states.first().map_or(0, |m| m.rows()),
        )
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.alice_states.len(), self.bob_states.len(), self.povm.len())
    }

    fn check_dims(&self) -> Result<()> {
        let (da, db) = self.dims();
        if self.alice_states.is_empty() || self.bob_states.is_empty() || self.povm.is_empty() {
            return Err(Error::Validation("strategy needs states for both senders and a POVM".into()));
        }
        for (who, states, d) in [("Alice", &self.alice_states, da), ("Bob", &self.bob_states, db)] {
            for (i, m) in states.iter().enumerate() {
                if m.rows() != d || m.cols() != d {
                    return Err(Error::Dimension(format!("{who} state {} is not {d}x{d}", i + 1)));
                }
            }
        }
        for (z, m) in self.povm.iter().enumerate() {
            if m.rows() != da * db || m.cols() != da * db {
                return Err(Error::Dimension(format!(
                    "effect M_{z} is {}x{}, joint space is {}",
                    m.rows(),
                    m.cols(),
                    da * db
                )));
            }
        }
        Ok(())
    }

    /// Every violated invariant, described. Empty means the strategy is valid.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.check_dims() {
            out.push(e.to_string());
            return out;
        }
        for (who, states) in [("Alice", &self.alice_states), ("Bob", &self.bob_states)] {
            for (i, m) in states.iter().enumerate() {
                let herr = m.hermiticity_error();
                if herr > tol::PROBABILITY {
                    out.push(format!("{who} state {} is not Hermitian (deviation {herr:.3e})", i + 1));
                    continue;
                }
                let tr = m.trace().re;
                if (tr - 1.0).abs() > tol::PROBABILITY {
                    out.push(format!("{who} state {} has trace {tr:.9}", i + 1));
                }
                if let Ok(min) = m.min_eigenvalue() {
                    if min < -tol::PROBABILITY {
                        out.push(format!("{who} state {} has negative eigenvalue {min:.6}", i + 1));
                    }
                }
            }
        }
        let n = self.povm[0].rows();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (z, m) in self.povm.iter().enumerate() {
            sum = &sum + m;
            let herr = m.hermiticity_error();
            if herr > tol::PROBABILITY {
                out.push(format!("effect M_{z} is not Hermitian (deviation {herr:.3e})"));
                continue;
            }
            if let Ok(min) = m.min_eigenvalue() {
                if min < -tol::PROBABILITY {
                    out.push(format!("effect M_{z} has negative eigenvalue {min:.6}"));
                }
            }
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
        if dev > tol::PROBABILITY {
            out.push(format!("effects sum to identity only within {dev:.3e}"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(issues.join("; ")))
        }
    }
}

/// p(z|x,y) = Tr[(ρ_x ⊗ σ_y) M_z].
///
/// Only shape and POVM completeness are enforced; other defects show up in
/// [`QuantumStrategy::issues`] and in the returned numbers.
pub fn behavior_from_strategy(s: &QuantumStrategy) -> Result<Behavior<f64>> {
    s.check_dims()?;
    let n = s.povm[0].rows();
    let mut sum = ComplexMatrix::zeros(n, n);
    for m in &s.povm {
        sum = &sum + m;
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
    if dev > tol::PROBABILITY {
        return Err(Error::Validation(format!("POVM is incomplete: effects sum to identity only within {dev:.3e}")));
    }
    let (nx, ny, nz) = s.shape();
    let mut b = Behavior::zeros(nx, ny, nz);
    for (x, rho) in s.alice_states.iter().enumerate() {
        for (y, sigma) in s.bob_states.iter().enumerate() {
            let joint = kron(rho, sigma);
            for (z, m) in s.povm.iter().enumerate() {
                b.set(z, x, y, joint.trace_product(m).re);
            }
        }
    }
    Ok(b)
}
