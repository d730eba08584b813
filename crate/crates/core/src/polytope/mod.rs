//! Exact rational polyhedra: vertex/facet conversion and linear programming.

pub mod dd;
pub mod lp;
pub mod text;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use lp::{lp_max, lp_max_over_points, LpOutcome};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// `a·x <= b`, or `a·x = b` when stored among equalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub a: Vec<Q>,
    pub b: Q,
}

impl HalfSpace {
    pub fn new(a: Vec<Q>, b: Q) -> Self {
        Self { a, b }
    }

    pub fn lhs(&self, x: &[Q]) -> Q {
        dot(&self.a, x)
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.b - self.lhs(x)
    }

    /// Scales to coprime integers by a positive factor.
    pub fn canonical(&self) -> Self {
        let (a, b) = integerize(&self.a, &self.b);
        Self { a: a.into_iter().map(Q::from_integer).collect(), b: Q::from_integer(b) }
    }

    /// Canonical form of a hyperplane: coprime integers with positive leading coefficient.
    pub fn canonical_equality(&self) -> Self {
        let mut h = self.canonical();
        let lead_neg = h.a.iter().find(|x| !x.is_zero()).map_or(h.b.is_negative(), |x| x.is_negative());
        if lead_neg {
            h.a.iter_mut().for_each(|x| *x = -x.clone());
            h.b = -h.b;
        }
        h
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn lcm_denominators<'a>(xs: impl Iterator<Item = &'a Q>) -> BigInt {
    xs.fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

/// Scales `(a, b)` by a positive rational so all entries are coprime integers.
fn integerize(a: &[Q], b: &Q) -> (Vec<BigInt>, BigInt) {
    let l = lcm_denominators(a.iter().chain(std::iter::once(b)));
    let mut ai: Vec<BigInt> = a.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut bi = (b * Q::from_integer(l)).to_integer();
    let g = ai.iter().chain(std::iter::once(&bi)).fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        ai.iter_mut().for_each(|x| *x = &*x / &g);
        bi = &bi / &g;
    }
    (ai, bi)
}

/// Row scaled by a positive factor to integers.
pub fn integer_row(v: &[Q]) -> Vec<BigInt> {
    let l = lcm_denominators(v.iter());
    v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    pub dim: usize,
    pub inequalities: Vec<HalfSpace>,
    pub equalities: Vec<HalfSpace>,
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        Self { dim, inequalities: Vec::new(), equalities: Vec::new() }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.inequalities.iter().all(|h| !h.slack(x).is_negative())
            && self.equalities.iter().all(|h| h.slack(x).is_zero())
    }

    /// Sorts and removes duplicate rows after canonicalization.
    pub fn canonicalize(&mut self) {
        let mut ineq: Vec<HalfSpace> = self.inequalities.iter().map(HalfSpace::canonical).collect();
        ineq.sort();
        ineq.dedup();
        let mut eq: Vec<HalfSpace> = self.equalities.iter().map(HalfSpace::canonical_equality).collect();
        eq.sort();
        eq.dedup();
        self.inequalities = ineq;
        self.equalities = eq;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<Q>>,
}

impl VPolytope {
    pub fn new(dim: usize, vertices: Vec<Vec<Q>>) -> Self {
        Self { dim, vertices }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        Self { dim, vertices: rows.iter().map(|r| q_vec(r)).collect() }
    }

    pub fn dedup(&mut self) {
        self.vertices.sort();
        self.vertices.dedup();
    }
}

/// Exact rank of a list of rational vectors.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    dd::exact_rank(ints.iter(), n)
}

/// Incrementally maintained reduced row echelon basis over Q.
#[derive(Debug, Clone)]
pub struct RowSpace {
    n: usize,
    rows: Vec<(usize, Vec<Q>)>,
}

impl RowSpace {
    pub fn new(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut v = v.to_vec();
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for k in 0..self.n {
                    if !r[k].is_zero() {
                        v[k] -= &f * &r[k];
                    }
                }
            }
        }
        v
    }

    /// Adds `v`; returns true when it was independent of the current span.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        if self.rows.len() == self.n {
            return false;
        }
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        v.iter_mut().for_each(|x| *x *= &inv);
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for k in 0..self.n {
                    if !v[k].is_zero() {
                        r[k] -= &f * &v[k];
                    }
                }
            }
        }
        self.rows.push((p, v));
        self.rows.sort_by_key(|(p, _)| *p);
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }
}

/// Affine hull of a point set with a coordinate chart: the hull projects
/// bijectively onto the pivot coordinates, and every other coordinate is an
/// affine function of them.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub n: usize,
    pub origin: Vec<Q>,
    pub pivots: Vec<usize>,
    /// For each free coordinate f: (f, constant, coefficients on pivots) with x_f = constant + Σ coef·x_pivot.
    pub free: Vec<(usize, Q, Vec<Q>)>,
}

impl AffineHull {
    pub fn of_points(points: &[Vec<Q>]) -> Result<Self> {
        let origin = points.first().ok_or_else(|| Error::Validation("empty point set".into()))?.clone();
        let n = origin.len();
        let mut space = RowSpace::new(n);
        for p in &points[1..] {
            if space.rank() == n {
                break;
            }
            let d: Vec<Q> = p.iter().zip(&origin).map(|(a, b)| a - b).collect();
            space.insert(&d);
        }
        Ok(Self::from_space(origin, &space))
    }

    fn from_space(origin: Vec<Q>, space: &RowSpace) -> Self {
        let n = origin.len();
        let pivots = space.pivots();
        let mut free = Vec::new();
        for f in (0..n).filter(|c| !pivots.contains(c)) {
            let coefs: Vec<Q> = space.rows.iter().map(|(_, r)| r[f].clone()).collect();
            // x_f - Σ_k R[k][f] x_{p_k} is constant on the hull.
            let c = &origin[f] - pivots.iter().zip(&coefs).map(|(&p, c)| c * &origin[p]).sum::<Q>();
            free.push((f, c, coefs));
        }
        Self { n, origin, pivots, free }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn equalities(&self) -> Vec<HalfSpace> {
        self.free
            .iter()
            .map(|(f, c, coefs)| {
                let mut a = vec![Q::zero(); self.n];
                a[*f] = Q::one();
                for (&p, k) in self.pivots.iter().zip(coefs) {
                    a[p] = -k.clone();
                }
                HalfSpace::new(a, c.clone()).canonical_equality()
            })
            .collect()
    }

    pub fn chart(&self, x: &[Q]) -> Vec<Q> {
        self.pivots.iter().map(|&p| x[p].clone()).collect()
    }

    /// Rewrites `a·x <= b` using only pivot coordinates, valid on the hull,
    /// in canonical integer form. Two inequalities agree on the hull exactly
    /// when their normal forms coincide.
    pub fn normal_form(&self, h: &HalfSpace) -> HalfSpace {
        let mut a = h.a.clone();
        let mut b = h.b.clone();
        for (f, c, coefs) in &self.free {
            let cf = a[*f].clone();
            if cf.is_zero() {
                continue;
            }
            a[*f] = Q::zero();
            b -= &cf * c;
            for (&p, k) in self.pivots.iter().zip(coefs) {
                a[p] += &cf * k;
            }
        }
        HalfSpace::new(a, b).canonical()
    }
}

/// Irredundant facets of conv(V) inside its affine hull, plus the hull's equalities.
pub fn vertices_to_facets(v: &VPolytope) -> Result<HPolytope> {
    if v.vertices.is_empty() {
        return Err(Error::Validation("vertex list is empty".into()));
    }
    let hull = AffineHull::of_points(&v.vertices)?;
    let r = hull.dim();
    let mut out = HPolytope::new(v.dim);
    out.equalities = hull.equalities();
    if r > 0 {
        // Facet normals (b, a) are the extreme rays of {(b, a) : b - a·y >= 0 for every vertex y}.
        let mut rows: Vec<Vec<BigInt>> = v
            .vertices
            .iter()
            .map(|x| {
                let y = hull.chart(x);
                let mut row = vec![Q::one()];
                row.extend(y.into_iter().map(|c| -c));
                integer_row(&row)
            })
            .collect();
        rows.sort();
        rows.dedup();
        let eq = vec![false; rows.len()];
        let gens = dd::cone_generators(&rows, &eq, r + 1);
        debug_assert!(gens.lineality.is_empty(), "full-dimensional polytope has a pointed dual cone");
        for ray in gens.rays {
            if ray[1..].iter().all(Zero::is_zero) {
                continue;
            }
            let mut a = vec![Q::zero(); v.dim];
            for (k, &p) in hull.pivots.iter().enumerate() {
                a[p] = Q::from_integer(ray[k + 1].clone());
            }
            out.inequalities.push(HalfSpace::new(a, Q::from_integer(ray[0].clone())));
        }
    }
    out.canonicalize();
    Ok(out)
}

/// All vertices of a bounded H-polytope, exactly. Empty polytopes give an empty list.
pub fn facets_to_vertices(h: &HPolytope) -> Result<VPolytope> {
    let n = h.dim;
    // Homogenize: (t, x) with t*b - a·x >= 0 and t >= 0.
    let lift = |hs: &HalfSpace| {
        let mut row = vec![hs.b.clone()];
        row.extend(hs.a.iter().map(|c| -c));
        integer_row(&row)
    };
    let mut rows = Vec::new();
    let mut is_eq = Vec::new();
    for e in &h.equalities {
        rows.push(lift(e));
        is_eq.push(true);
    }
    for i in &h.inequalities {
        rows.push(lift(i));
        is_eq.push(false);
    }
    let mut t = vec![BigInt::zero(); n + 1];
    t[0] = BigInt::one();
    rows.push(t);
    is_eq.push(false);
    let gens = dd::cone_generators(&rows, &is_eq, n + 1);
    let (points, directions): (Vec<_>, Vec<_>) = gens.rays.into_iter().partition(|r| r[0].is_positive());
    if points.is_empty() {
        return Ok(VPolytope::new(n, Vec::new()));
    }
    if !gens.lineality.is_empty() || !directions.is_empty() {
        return Err(Error::Unbounded);
    }
    let mut out = VPolytope::new(
        n,
        points
            .into_iter()
            .map(|r| r[1..].iter().map(|c| Q::new(c.clone(), r[0].clone())).collect())
            .collect(),
    );
    out.dedup();
    Ok(out)
}

/// Affine dimension of a point set (-1 encoded as None for the empty set).
pub fn affine_dim(points: &[Vec<Q>]) -> Option<usize> {
    AffineHull::of_points(points).ok().map(|h| h.dim())
}
