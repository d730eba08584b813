//! Classical strategies: vertices, exact bounds, and facet checks.
//!
//! Polytope coordinates are p(z|x,y) for z >= 1, ordered (z-1, x, y); the
//! outcome z = 0 is eliminated through normalization.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_d_range, Behavior, Constraint, Functional, Scenario};
use crate::polytope::{
    self, lp::in_convex_hull, AffineHull, HPolytope, HalfSpace, RowSpace, VPolytope, Q,
};

/// Largest raw strategy list materialized by [`enum_vertices_dim`].
pub const MAX_RAW_VERTICES: u128 = 1 << 20;
/// Largest distinct vertex set handed to facet enumeration.
pub const MAX_FACET_VERTICES: usize = 4096;
/// Largest coordinate dimension handed to facet enumeration.
pub const MAX_FACET_DIM: usize = 15;

pub fn to_q(r: &Rational64) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn from_q(r: &Q) -> Result<Rational64> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
        _ => Err(Error::Capacity(format!("rational {r} does not fit in 64 bits"))),
    }
}

/// Row-stochastic table p(m|x).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoder {
    pub table: Vec<Vec<Rational64>>,
}

impl Encoder {
    pub fn deterministic(map: &[usize], n_messages: usize) -> Self {
        let table = map
            .iter()
            .map(|&m| (0..n_messages).map(|k| if k == m { One::one() } else { Zero::zero() }).collect())
            .collect();
        Self { table }
    }

    pub fn n_inputs(&self) -> usize {
        self.table.len()
    }

    pub fn n_messages(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.table.iter().all(|row| {
            row.iter().all(|p| *p >= Rational64::zero()) && row.iter().sum::<Rational64>() == Rational64::one()
        })
    }

    /// Σ_m max_x q_x p(m|x) with uniform priors.
    pub fn distinguishability(&self) -> Rational64 {
        let n = Rational64::from_integer(self.n_inputs() as i64);
        (0..self.n_messages())
            .map(|m| self.table.iter().map(|row| row[m]).max().unwrap_or_default() / n)
            .sum()
    }
}

/// Deterministic receiver strategy (m, n) -> z.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decoder {
    pub n_a: usize,
    pub n_b: usize,
    pub choice: Vec<usize>,
}

impl Decoder {
    pub fn get(&self, m: usize, n: usize) -> usize {
        self.choice[m * self.n_b + n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalVertex {
    pub behavior: Behavior<Rational64>,
    pub encoder_a: Encoder,
    pub encoder_b: Encoder,
    pub decoder: Decoder,
}

/// p(z|x,y) = Σ_{m,n} p(m|x) p(n|y) [decoder(m,n) = z].
pub fn vertex_behavior(a: &Encoder, b: &Encoder, dec: &Decoder, nz: usize) -> Behavior<Rational64> {
    let mut out = Behavior::zeros(a.n_inputs(), b.n_inputs(), nz);
    for x in 0..a.n_inputs() {
        for y in 0..b.n_inputs() {
            for m in 0..a.n_messages() {
                let pa = a.table[x][m];
                if pa.is_zero() {
                    continue;
                }
                for n in 0..b.n_messages() {
                    let pb = b.table[y][n];
                    if pb.is_zero() {
                        continue;
                    }
                    let z = dec.get(m, n);
                    let i = out.index(z, x, y);
                    out.p[i] += pa * pb;
                }
            }
        }
    }
    out
}

impl ClassicalVertex {
    pub fn new(a: Encoder, b: Encoder, decoder: Decoder, nz: usize) -> Self {
        let behavior = vertex_behavior(&a, &b, &decoder, nz);
        Self { behavior, encoder_a: a, encoder_b: b, decoder }
    }
}

/// Polytope coordinates of a behavior.
pub fn behavior_coords(b: &Behavior<Rational64>) -> Vec<Q> {
    let skip = b.nx * b.ny;
    b.p[skip..].iter().map(to_q).collect()
}

/// `f(p) <= rhs` rewritten in polytope coordinates.
pub fn reduced_halfspace(f: &Functional, rhs: Rational64) -> HalfSpace {
    let (nx, ny, nz) = (f.nx, f.ny, f.nz);
    let mut a = vec![Q::zero(); nx * ny * (nz - 1)];
    let mut offset = Rational64::zero();
    for x in 0..nx {
        for y in 0..ny {
            let c0 = f.coeff(x, y, 0);
            offset += c0;
            for z in 1..nz {
                a[((z - 1) * nx + x) * ny + y] = to_q(&(f.coeff(x, y, z) - c0));
            }
        }
    }
    HalfSpace::new(a, to_q(&(rhs - offset)))
}

/// Inverse of [`reduced_halfspace`]: a functional on outcomes z >= 1 with a constant right-hand side.
pub fn functional_from_halfspace(h: &HalfSpace, nx: usize, ny: usize, nz: usize) -> Result<Functional> {
    let mut f = Functional::zeros(nx, ny, nz);
    for z in 1..nz {
        for x in 0..nx {
            for y in 0..ny {
                f.set(x, y, z, from_q(&h.a[((z - 1) * nx + x) * ny + y])?);
            }
        }
    }
    f.rhs.constant = from_q(&h.b)?;
    Ok(f)
}

fn message_count(s: &Scenario) -> (usize, usize) {
    match &s.constraint {
        Constraint::Dimension { d } => (*d, *d),
        Constraint::Distinguishability { .. } => (1 << (s.nx - 1), 1 << (s.ny - 1)),
    }
}

/// All maps [n_inputs] -> [n_messages], as encoders, in lexicographic order.
pub fn deterministic_encoders(n_inputs: usize, n_messages: usize) -> Vec<Encoder> {
    let total = n_messages.pow(n_inputs as u32);
    (0..total)
        .map(|mut code| {
            let mut map = vec![0; n_inputs];
            for slot in map.iter_mut().rev() {
                *slot = code % n_messages;
                code /= n_messages;
            }
            Encoder::deterministic(&map, n_messages)
        })
        .collect()
}

pub fn all_decoders(n_a: usize, n_b: usize, nz: usize) -> Vec<Decoder> {
    let cells = n_a * n_b;
    let total = nz.pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut choice = vec![0; cells];
            for slot in choice.iter_mut().rev() {
                *slot = code % nz;
                code /= nz;
            }
            Decoder { n_a, n_b, choice }
        })
        .collect()
}

/// d^nx · d^ny · nz^(d²) deterministic strategies with d-level messages.
pub fn raw_vertex_count(s: &Scenario) -> Result<u128> {
    let Constraint::Dimension { d } = s.constraint else {
        return Err(Error::Validation("raw vertex count needs a dimension-bounded scenario".into()));
    };
    let d = d as u128;
    let p = |b: u128, e: usize| b.checked_pow(e as u32);
    p(d, s.nx)
        .and_then(|a| Some(a * p(d, s.ny)?))
        .and_then(|a| a.checked_mul(p(s.nz as u128, (d * d) as usize)?))
        .ok_or_else(|| Error::Capacity("vertex count exceeds 128 bits".into()))
}

#[derive(Debug, Clone)]
pub struct DimVertices {
    /// One entry per (encoder A, encoder B, decoder) triple.
    pub raw: Vec<ClassicalVertex>,
    /// Distinct behaviors among `raw`, sorted.
    pub distinct: Vec<Behavior<Rational64>>,
}

/// Every deterministic strategy of a dimension-bounded scenario.
pub fn enum_vertices_dim(s: &Scenario) -> Result<DimVertices> {
    let total = raw_vertex_count(s)?;
    if total > MAX_RAW_VERTICES {
        return Err(Error::Capacity(format!(
            "{total} raw strategies exceed the enumeration limit of {MAX_RAW_VERTICES}"
        )));
    }
    let (na, nb) = message_count(s);
    let ea = deterministic_encoders(s.nx, na);
    let eb = deterministic_encoders(s.ny, nb);
    let decs = all_decoders(na, nb, s.nz);
    let mut raw = Vec::with_capacity(total as usize);
    for a in &ea {
        for b in &eb {
            for dec in &decs {
                raw.push(ClassicalVertex::new(a.clone(), b.clone(), dec.clone(), s.nz));
            }
        }
    }
    let mut distinct: Vec<Behavior<Rational64>> = raw.iter().map(|v| v.behavior.clone()).collect();
    distinct.sort_by(|x, y| x.p.cmp(&y.p));
    distinct.dedup();
    Ok(DimVertices { raw, distinct })
}

/// Vertices of {p(m|x) row-stochastic : Σ_m max_x p(m|x)/n <= D} with 2^(n-1) messages.
pub fn enum_encoder_vertices_dist(n_inputs: usize, d: Rational64) -> Result<Vec<Encoder>> {
    check_d_range(d, n_inputs, "D")?;
    static CACHE: OnceLock<Mutex<HashMap<(usize, Rational64), Arc<Vec<Encoder>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(n_inputs, d)) {
        return Ok(v.as_ref().clone());
    }
    let v = compute_encoder_vertices(n_inputs, d)?;
    cache.lock().unwrap().insert((n_inputs, d), Arc::new(v.clone()));
    Ok(v)
}

/// Lifted encoder polytope. Variables: p(m|x) at x*nm + m, t_m at n*nm + m,
/// and, when `d` is `None`, D itself as the last coordinate with 1/n <= D <= 1.
fn lifted_encoder_polytope(n: usize, d: Option<Rational64>) -> HPolytope {
    let nm = 1usize << (n - 1);
    let dim = n * nm + nm + usize::from(d.is_none());
    let mut h = HPolytope::new(dim);
    let unit = |i: usize, c: Q| {
        let mut a = vec![Q::zero(); dim];
        a[i] = c;
        a
    };
    for i in 0..n * nm {
        h.inequalities.push(HalfSpace::new(unit(i, -Q::one()), Q::zero()));
    }
    for x in 0..n {
        let mut a = vec![Q::zero(); dim];
        for m in 0..nm {
            a[x * nm + m] = Q::one();
        }
        h.equalities.push(HalfSpace::new(a, Q::one()));
    }
    let inv_n = Q::new(BigInt::one(), BigInt::from(n));
    for x in 0..n {
        for m in 0..nm {
            let mut a = unit(x * nm + m, inv_n.clone());
            a[n * nm + m] = -Q::one();
            h.inequalities.push(HalfSpace::new(a, Q::zero()));
        }
    }
    let mut a = vec![Q::zero(); dim];
    for m in 0..nm {
        a[n * nm + m] = Q::one();
    }
    match d {
        Some(d) => h.inequalities.push(HalfSpace::new(a, to_q(&d))),
        None => {
            a[dim - 1] = -Q::one();
            h.inequalities.push(HalfSpace::new(a, Q::zero()));
            h.inequalities.push(HalfSpace::new(unit(dim - 1, Q::one()), Q::one()));
            h.inequalities.push(HalfSpace::new(unit(dim - 1, -Q::one()), -inv_n));
        }
    }
    h
}

/// Extreme points of a finite point set, decided by exact LP.
fn extreme_points(mut pts: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    pts.sort();
    pts.dedup();
    (0..pts.len())
        .into_par_iter()
        .filter(|&i| {
            let others: Vec<Vec<Q>> =
                pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            !in_convex_hull(&pts[i], &others)
        })
        .map(|i| pts[i].clone())
        .collect()
}

fn encoder_from_coords(v: &[Q], n: usize, nm: usize) -> Result<Encoder> {
    let table = (0..n)
        .map(|x| (0..nm).map(|m| from_q(&v[x * nm + m])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Encoder { table })
}

fn compute_encoder_vertices(n: usize, d: Rational64) -> Result<Vec<Encoder>> {
    let nm = 1usize << (n - 1);
    let lifted = polytope::facets_to_vertices(&lifted_encoder_polytope(n, Some(d)))?;
    let projected = lifted.vertices.iter().map(|v| v[..n * nm].to_vec()).collect();
    extreme_points(projected).iter().map(|v| encoder_from_coords(v, n, nm)).collect()
}

/// Vertices of the encoder polytope with D kept as a coordinate ranging over
/// [1/n, 1]: each vertex is an encoder together with its D value.
pub fn enum_encoder_vertices_symbolic(n_inputs: usize) -> Result<Vec<(Encoder, Rational64)>> {
    if n_inputs < 2 {
        return Err(Error::Validation("need at least two inputs".into()));
    }
    let n = n_inputs;
    let nm = 1usize << (n - 1);
    let lifted = polytope::facets_to_vertices(&lifted_encoder_polytope(n, None))?;
    let projected = lifted
        .vertices
        .iter()
        .map(|v| {
            let mut p = v[..n * nm].to_vec();
            p.push(v[v.len() - 1].clone());
            p
        })
        .collect();
    extreme_points(projected)
        .iter()
        .map(|v| Ok((encoder_from_coords(v, n, nm)?, from_q(&v[n * nm])?)))
        .collect()
}

/// Encoder candidates for each sender: deterministic maps under a dimension
/// bound, extreme encoders under a distinguishability bound.
pub fn encoder_sets(s: &Scenario) -> Result<(Vec<Encoder>, Vec<Encoder>)> {
    match &s.constraint {
        Constraint::Dimension { d } => Ok((deterministic_encoders(s.nx, *d), deterministic_encoders(s.ny, *d))),
        Constraint::Distinguishability { d1, d2, .. } => {
            Ok((enum_encoder_vertices_dist(s.nx, *d1)?, enum_encoder_vertices_dist(s.ny, *d2)?))
        }
    }
}

fn lcm_den<'a>(it: impl Iterator<Item = &'a Rational64>) -> i128 {
    it.fold(1i128, |l, r| l.lcm(&(*r.denom() as i128)))
}

/// Integer-scaled data for fast exact greedy evaluation.
struct Scaled {
    ny: usize,
    nz: usize,
    na: usize,
    nb: usize,
    /// u[a][(m*ny + y)*nz + z] = Σ_x C[x][y][z] PA[a][x][m]
    u: Vec<Vec<i128>>,
    /// pb[b][y*nb + n]
    pb: Vec<Vec<i128>>,
    den: i128,
}

impl Scaled {
    fn new(f: &Functional, ea: &[Encoder], eb: &[Encoder]) -> Self {
        let (nx, ny, nz) = (f.nx, f.ny, f.nz);
        let coeffs: Vec<Rational64> =
            (0..nx * ny * nz).map(|i| f.coeff(i / (ny * nz), (i / nz) % ny, i % nz)).collect();
        let lc = lcm_den(coeffs.iter());
        let la = lcm_den(ea.iter().flat_map(|e| e.table.iter().flatten()));
        let lb = lcm_den(eb.iter().flat_map(|e| e.table.iter().flatten()));
        let scale = |r: Rational64, l: i128| (*r.numer() as i128) * (l / *r.denom() as i128);
        let na = ea.first().map_or(0, Encoder::n_messages);
        let nb = eb.first().map_or(0, Encoder::n_messages);
        let c: Vec<i128> = coeffs.iter().map(|&r| scale(r, lc)).collect();
        let u = ea
            .iter()
            .map(|e| {
                let mut u = vec![0i128; na * ny * nz];
                for m in 0..na {
                    for x in 0..nx {
                        let p = scale(e.table[x][m], la);
                        if p == 0 {
                            continue;
                        }
                        for y in 0..ny {
                            for z in 0..nz {
                                u[(m * ny + y) * nz + z] += c[(x * ny + y) * nz + z] * p;
                            }
                        }
                    }
                }
                u
            })
            .collect();
        let pb = eb
            .iter()
            .map(|e| {
                let mut v = vec![0i128; ny * nb];
                for y in 0..ny {
                    for n in 0..nb {
                        v[y * nb + n] = scale(e.table[y][n], lb);
                    }
                }
                v
            })
            .collect();
        Self { ny, nz, na, nb, u, pb, den: lc * la * lb }
    }

    /// Per-block scores s[(m*nb + n)*nz + z] for an encoder pair.
    fn block_scores(&self, a: usize, b: usize) -> Vec<i128> {
        let (ny, nz, na, nb) = (self.ny, self.nz, self.na, self.nb);
        let u = &self.u[a];
        let pb = &self.pb[b];
        let mut s = vec![0i128; na * nb * nz];
        for m in 0..na {
            for n in 0..nb {
                for y in 0..ny {
                    let p = pb[y * nb + n];
                    if p == 0 {
                        continue;
                    }
                    for z in 0..nz {
                        s[(m * nb + n) * nz + z] += u[(m * ny + y) * nz + z] * p;
                    }
                }
            }
        }
        s
    }

    /// Greedy decoder (smallest z on ties) and its scaled value.
    fn greedy(&self, a: usize, b: usize) -> (Vec<usize>, i128) {
        let s = self.block_scores(a, b);
        let nz = self.nz;
        let mut choice = Vec::with_capacity(self.na * self.nb);
        let mut total = 0;
        for blk in s.chunks(nz) {
            let mut best = 0;
            for z in 1..nz {
                if blk[z] > blk[best] {
                    best = z;
                }
            }
            choice.push(best);
            total += blk[best];
        }
        (choice, total)
    }

    fn value(&self, scaled: i128) -> Rational64 {
        let g = scaled.gcd(&self.den);
        let (n, d) = (scaled / g, self.den / g);
        Rational64::new(n as i64, d as i64)
    }

    /// Best (value, a, b) with ties resolved toward the smallest (a, b).
    fn best_pair(&self) -> (i128, usize, usize) {
        let nbv = self.pb.len();
        (0..self.u.len())
            .into_par_iter()
            .map(|a| {
                let mut best = (i128::MIN, a, 0);
                for b in 0..nbv {
                    let (_, v) = self.greedy(a, b);
                    if v > best.0 {
                        best = (v, a, b);
                    }
                }
                best
            })
            .reduce(|| (i128::MIN, usize::MAX, usize::MAX), |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                    y
                } else {
                    x
                }
            })
    }
}

/// Optimal decoder for fixed encoders: argmax_z Σ_{x,y} c p(m|x) p(n|y), smallest z on ties.
pub fn greedy_decoder(f: &Functional, a: &Encoder, b: &Encoder) -> (Decoder, Rational64) {
    let sc = Scaled::new(f, std::slice::from_ref(a), std::slice::from_ref(b));
    let (choice, v) = sc.greedy(0, 0);
    (Decoder { n_a: a.n_messages(), n_b: b.n_messages(), choice }, sc.value(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBound {
    pub value: Rational64,
    pub witness: ClassicalVertex,
}

/// Exact classical maximum of `f` in scenario `s`.
pub fn classical_bound(s: &Scenario, f: &Functional) -> Result<ClassicalBound> {
    f.check_scenario(s)?;
    let (ea, eb) = encoder_sets(s)?;
    let sc = Scaled::new(f, &ea, &eb);
    let (v, a, b) = sc.best_pair();
    let (choice, _) = sc.greedy(a, b);
    let dec = Decoder { n_a: sc.na, n_b: sc.nb, choice };
    let witness = ClassicalVertex::new(ea[a].clone(), eb[b].clone(), dec, s.nz);
    Ok(ClassicalBound { value: sc.value(v), witness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetCheck {
    pub valid: bool,
    /// Affine dimension of the tight vertex set; -1 when no vertex is tight.
    pub tight_dim: isize,
    pub polytope_dim: usize,
    pub max_value: Rational64,
    pub rhs: Rational64,
}

impl FacetCheck {
    pub fn is_facet(&self) -> bool {
        self.valid && self.tight_dim >= 0 && self.tight_dim as usize + 1 == self.polytope_dim
    }

    /// The maximum equals the right-hand side.
    pub fn is_tight(&self) -> bool {
        self.max_value == self.rhs
    }
}

/// Affine span tracker over behaviors in polytope coordinates.
struct Span {
    origin: Option<Vec<Q>>,
    space: RowSpace,
}

impl Span {
    fn new(n: usize) -> Self {
        Self { origin: None, space: RowSpace::new(n) }
    }

    fn add(&mut self, b: &Behavior<Rational64>) {
        let c = behavior_coords(b);
        match &self.origin {
            None => self.origin = Some(c),
            Some(o) => {
                let d: Vec<Q> = c.iter().zip(o).map(|(x, y)| x - y).collect();
                self.space.insert(&d);
            }
        }
    }

    fn full(&self) -> bool {
        self.origin.as_ref().is_some_and(|o| self.space.rank() == o.len())
    }

    fn dim(&self) -> isize {
        if self.origin.is_none() {
            -1
        } else {
            self.space.rank() as isize
        }
    }
}

/// Validity and facet dimension of `f <= rhs` on the classical polytope.
///
/// For distinguishability scenarios `d1`/`d2` override the scenario's values.
pub fn facet_check(s: &Scenario, f: &Functional, d1: Option<Rational64>, d2: Option<Rational64>) -> Result<FacetCheck> {
    f.check_scenario(s)?;
    let s = match &s.constraint {
        Constraint::Distinguishability { d1: s1, d2: s2, .. } => {
            Scenario::distinguishability(s.nx, s.ny, s.nz, d1.unwrap_or(*s1), d2.unwrap_or(*s2))?
        }
        Constraint::Dimension { .. } => s.clone(),
    };
    let rhs = f.rhs_for(&s);
    let (ea, eb) = encoder_sets(&s)?;
    let sc = Scaled::new(f, &ea, &eb);
    let nz = s.nz;
    let coords = s.nx * s.ny * (nz - 1);

    let mut max_scaled = i128::MIN;
    let mut tight = Span::new(coords);
    let mut all = Span::new(coords);
    let rhs_scaled = {
        let r = rhs * Rational64::from_integer(sc.den as i64);
        if r.is_integer() { Some(*r.numer() as i128) } else { None }
    };
    for a in 0..ea.len() {
        for b in 0..eb.len() {
            let scores = sc.block_scores(a, b);
            let (choice, v) = sc.greedy(a, b);
            max_scaled = max_scaled.max(v);
            let dec = Decoder { n_a: sc.na, n_b: sc.nb, choice: choice.clone() };
            let want_all = !all.full();
            let want_tight = Some(v) == rhs_scaled && !tight.full();
            if !want_all && !want_tight {
                continue;
            }
            let base = vertex_behavior(&ea[a], &eb[b], &dec, nz);
            if want_all {
                all.add(&base);
            }
            if want_tight {
                tight.add(&base);
            }
            for (blk, &zbest) in choice.iter().enumerate() {
                for z in 0..nz {
                    if z == zbest {
                        continue;
                    }
                    let ties = scores[blk * nz + z] == scores[blk * nz + zbest];
                    if !(want_all || (want_tight && ties)) {
                        continue;
                    }
                    let mut alt = dec.clone();
                    alt.choice[blk] = z;
                    let bh = vertex_behavior(&ea[a], &eb[b], &alt, nz);
                    if want_all {
                        all.add(&bh);
                    }
                    if want_tight && ties {
                        tight.add(&bh);
                    }
                }
            }
        }
    }
    let max_value = sc.value(max_scaled);
    Ok(FacetCheck {
        valid: max_value <= rhs,
        tight_dim: if max_value == rhs { tight.dim() } else { -1 },
        polytope_dim: all.dim().max(0) as usize,
        max_value,
        rhs,
    })
}

/// Full facet list of the dimension-bounded classical polytope, in polytope coordinates.
pub fn facet_enumerate_dim(s: &Scenario) -> Result<HPolytope> {
    if s.is_distinguishability() {
        return Err(Error::Validation("facet enumeration needs a dimension-bounded scenario".into()));
    }
    let dim = s.nx * s.ny * (s.nz - 1);
    if dim > MAX_FACET_DIM {
        return Err(Error::Capacity(format!("coordinate dimension {dim} exceeds the limit of {MAX_FACET_DIM}")));
    }
    let verts = enum_vertices_dim(s)?;
    if verts.distinct.len() > MAX_FACET_VERTICES {
        return Err(Error::Capacity(format!(
            "{} distinct vertices exceed the limit of {MAX_FACET_VERTICES}",
            verts.distinct.len()
        )));
    }
    let v = VPolytope::new(dim, verts.distinct.iter().map(behavior_coords).collect());
    polytope::vertices_to_facets(&v)
}

/// Affine hull of the distinct dimension-bounded vertices.
pub fn vertex_hull(s: &Scenario) -> Result<AffineHull> {
    let verts = enum_vertices_dim(s)?;
    let pts: Vec<Vec<Q>> = verts.distinct.iter().map(behavior_coords).collect();
    AffineHull::of_points(&pts)
}
