//! Double description for polyhedral cones {x : A_eq x = 0, A x >= 0}.
//!
//! Rays are kept as primitive integer vectors. Computation runs in `i128`
//! with checked arithmetic first and restarts in `BigInt` on overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Mersenne prime used for the modular rank prefilter.
const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn bigint_mod_p(x: &BigInt) -> u64 {
    let p = BigInt::from(P);
    let r = x.mod_floor(&p);
    r.to_u64().unwrap()
}

pub(crate) trait DdInt: Clone + PartialEq + std::fmt::Debug {
    fn from_bigint(x: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn signum_i8(&self) -> i8;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn is_one(&self) -> bool;
}

impl DdInt for i128 {
    fn from_bigint(x: &BigInt) -> Option<Self> {
        x.to_i128().filter(|v| v.unsigned_abs() < (1u128 << 100))
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn signum_i8(&self) -> i8 {
        self.signum() as i8
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        *self / *o
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl DdInt for BigInt {
    fn from_bigint(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum_i8(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

fn dot<T: DdInt>(a: &[T], b: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Some(acc)
}

/// `alpha * u - beta * v`
fn combine<T: DdInt>(alpha: &T, u: &[T], beta: &T, v: &[T]) -> Option<Vec<T>> {
    u.iter().zip(v).map(|(a, b)| alpha.mul(a)?.sub(&beta.mul(b)?)).collect()
}

fn normalize<T: DdInt>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = x.div_exact(&g);
    }
}

#[derive(Clone)]
struct Ray<T> {
    v: Vec<T>,
    zero: Vec<u64>,
}

fn bit_set(z: &mut [u64], i: usize) {
    z[i / 64] |= 1 << (i % 64);
}

fn bit_and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Output of the conversion: a lineality basis and the extreme rays modulo it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

struct Cone<'a> {
    n: usize,
    rows: &'a [Vec<BigInt>],
    rows_p: Vec<Vec<u64>>,
    words: usize,
}

impl Cone<'_> {
    /// Rank over Q of the rows selected by the bitset `z`, compared with `target`.
    ///
    /// The rank modulo a prime never exceeds the rational rank, so a modular
    /// hit is a proof. Misses fall back to exact fraction-free elimination.
    fn rank_reaches(&self, z: &[u64], target: usize) -> bool {
        let idx: Vec<usize> = (0..self.rows.len()).filter(|&i| z[i / 64] >> (i % 64) & 1 == 1).collect();
        if idx.len() < target {
            return false;
        }
        if target == 0 {
            return true;
        }
        if modular_rank(idx.iter().map(|&i| self.rows_p[i].as_slice()), self.n, target) >= target {
            return true;
        }
        exact_rank(idx.iter().map(|&i| &self.rows[i]), self.n) >= target
    }
}

fn modular_rank<'b>(rows: impl Iterator<Item = &'b [u64]>, n: usize, stop: usize) -> usize {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for r in rows {
        let mut v = r.to_vec();
        for (piv, b) in &basis {
            let f = v[*piv];
            if f != 0 {
                for k in 0..n {
                    if b[k] != 0 {
                        v[k] = (v[k] + P - mulmod(f, b[k])) % P;
                    }
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[piv], P - 2);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv);
            }
            basis.push((piv, v));
            if basis.len() >= stop {
                break;
            }
        }
    }
    basis.len()
}

/// Exact rank of integer rows by fraction-free elimination.
pub(crate) fn exact_rank<'b>(rows: impl Iterator<Item = &'b Vec<BigInt>>, n: usize) -> usize {
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for (piv, b) in &basis {
            if !Zero::is_zero(&v[*piv]) {
                let f = v[*piv].clone();
                let g = b[*piv].clone();
                for k in 0..n {
                    v[k] = &v[k] * &g - &f * &b[k];
                }
                normalize(&mut v);
            }
        }
        if let Some(piv) = v.iter().position(|x| !Zero::is_zero(x)) {
            basis.push((piv, v));
            if basis.len() == n {
                break;
            }
        }
    }
    basis.len()
}

enum Overflow {
    Hit,
}

fn run<T: DdInt>(cone: &Cone<'_>, order: &[usize], is_eq: &[bool]) -> Result<(Vec<Vec<T>>, Vec<Ray<T>>), Overflow> {
    let n = cone.n;
    let rows: Vec<Vec<T>> = cone
        .rows
        .iter()
        .map(|r| r.iter().map(|x| T::from_bigint(x).ok_or(Overflow::Hit)).collect())
        .collect::<Result<_, _>>()?;
    let mut lin: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::from_bigint(&BigInt::one()).unwrap();
            e
        })
        .collect();
    let mut rays: Vec<Ray<T>> = Vec::new();
    let mut processed = vec![0u64; cone.words];

    for &ci in order {
        let a = &rows[ci];
        let eq = is_eq[ci];
        let dots: Vec<T> = lin.iter().map(|l| dot(a, l)).collect::<Option<_>>().ok_or(Overflow::Hit)?;
        if let Some(k) = dots.iter().position(|d| !d.is_zero()) {
            let mut pivot = lin.swap_remove(k);
            let mut dp = dots[k].clone();
            let mut rest_dots = dots;
            rest_dots.swap_remove(k);
            if dp.signum_i8() < 0 {
                pivot = pivot.iter().map(T::neg).collect();
                dp = dp.neg();
            }
            for (l, d) in lin.iter_mut().zip(&rest_dots) {
                if !d.is_zero() {
                    *l = combine(&dp, l, d, &pivot).ok_or(Overflow::Hit)?;
                    normalize(l);
                }
            }
            for r in rays.iter_mut() {
                let d = dot(a, &r.v).ok_or(Overflow::Hit)?;
                if !d.is_zero() {
                    r.v = combine(&dp, &r.v, &d, &pivot).ok_or(Overflow::Hit)?;
                    normalize(&mut r.v);
                }
                bit_set(&mut r.zero, ci);
            }
            if !eq {
                normalize(&mut pivot);
                rays.push(Ray { v: pivot, zero: processed.clone() });
            }
        } else {
            let target = n.saturating_sub(lin.len() + 2);
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            let mut zero = Vec::new();
            for r in rays.drain(..) {
                let d = dot(a, &r.v).ok_or(Overflow::Hit)?;
                match d.signum_i8() {
                    1 => plus.push((r, d)),
                    -1 => minus.push((r, d)),
                    _ => zero.push(r),
                }
            }
            let feasible_pairs = n >= lin.len() + 2;
            let mut fresh = Vec::new();
            if feasible_pairs {
                for (p, dp) in &plus {
                    for (q, dq) in &minus {
                        if (bit_and_count(&p.zero, &q.zero) as usize) < target {
                            continue;
                        }
                        let z: Vec<u64> = p.zero.iter().zip(&q.zero).map(|(x, y)| x & y).collect();
                        if !cone.rank_reaches(&z, target) {
                            continue;
                        }
                        let mut v = combine(dp, &q.v, dq, &p.v).ok_or(Overflow::Hit)?;
                        normalize(&mut v);
                        let mut z = z;
                        bit_set(&mut z, ci);
                        fresh.push(Ray { v, zero: z });
                    }
                }
            }
            for mut r in zero {
                bit_set(&mut r.zero, ci);
                rays.push(r);
            }
            if !eq {
                rays.extend(plus.into_iter().map(|(r, _)| r));
            }
            rays.extend(fresh);
        }
        bit_set(&mut processed, ci);
    }
    Ok((lin, rays))
}

/// Lineality basis and extreme rays of {x : rows[i]·x = 0 (is_eq[i]), rows[i]·x >= 0 otherwise}.
///
/// Equalities are inserted first, then inequalities in lexicographic order.
pub fn cone_generators(rows: &[Vec<BigInt>], is_eq: &[bool], n: usize) -> ConeGenerators {
    assert_eq!(rows.len(), is_eq.len());
    assert!(rows.iter().all(|r| r.len() == n));
    let rows_p = rows.iter().map(|r| r.iter().map(bigint_mod_p).collect()).collect();
    let cone = Cone { n, rows, rows_p, words: rows.len().div_ceil(64).max(1) };
    let mut order: Vec<usize> = (0..rows.len()).filter(|&i| is_eq[i]).collect();
    let mut ineq: Vec<usize> = (0..rows.len()).filter(|&i| !is_eq[i]).collect();
    ineq.sort_by(|&i, &j| rows[i].cmp(&rows[j]).then(i.cmp(&j)));
    order.extend(ineq);

    fn finish<T: DdInt>(lin: Vec<Vec<T>>, rays: Vec<Ray<T>>) -> ConeGenerators {
        let to_big = |v: &Vec<T>| v.iter().map(T::to_bigint).collect::<Vec<_>>();
        let mut rays: Vec<Vec<BigInt>> = rays.iter().map(|r| to_big(&r.v)).collect();
        rays.sort();
        rays.dedup();
        ConeGenerators { lineality: lin.iter().map(to_big).collect(), rays }
    }

    match run::<i128>(&cone, &order, is_eq) {
        Ok((lin, rays)) => finish(lin, rays),
        Err(Overflow::Hit) => match run::<BigInt>(&cone, &order, is_eq) {
            Ok((lin, rays)) => finish(lin, rays),
            Err(Overflow::Hit) => unreachable!("big integers do not overflow"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn positive_orthant() {
        let g = cone_generators(&rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), &[false; 3], 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays, rows(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]));
    }

    #[test]
    fn half_space_keeps_lineality() {
        let g = cone_generators(&rows(&[&[1, 1]]), &[false], 2);
        assert_eq!(g.lineality.len(), 1);
        assert_eq!(g.rays.len(), 1);
    }

    #[test]
    fn square_cone() {
        // Homogenized unit square: t >= 0, x >= 0, y >= 0, t - x >= 0, t - y >= 0.
        let r = rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[1, 0, -1]]);
        let g = cone_generators(&r, &[false; 5], 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays, rows(&[&[1, 0, 0], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]]));
    }

    #[test]
    fn equality_slices() {
        // x + y + z = 0 intersected with x >= 0, y >= 0 in R^3.
        let r = rows(&[&[1, 1, 1], &[1, 0, 0], &[0, 1, 0]]);
        let g = cone_generators(&r, &[true, false, false], 3);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays, rows(&[&[0, 1, -1], &[1, 0, -1]]));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = 1i64 << 62;
        let r = rows(&[&[big, 1, 0], &[0, big, 1], &[1, 0, big], &[1, 1, 1]]);
        let g = cone_generators(&r, &[false; 4], 3);
        for ray in &g.rays {
            for row in &r {
                let s: BigInt = row.iter().zip(ray).map(|(a, b)| a * b).sum();
                assert!(!s.is_negative());
            }
        }
        assert!(!g.rays.is_empty());
    }
}
