//! Exact two-phase simplex with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{HPolytope, HalfSpace, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub value: Q,
    pub argmax: Vec<Q>,
}

/// Dense tableau for max c·z s.t. A z = b, z >= 0, b >= 0.
struct Tableau {
    m: usize,
    n: usize,
    /// m rows of n coefficients followed by the right-hand side.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.t[r].clone();
        for i in 0..self.m {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (x, p) in self.t[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` for the current basis, restricted to `allowed` columns.
    fn run(&mut self, cost: &[Q], allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        loop {
            let mut entering = None;
            for j in 0..self.n {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for i in 0..self.m {
                    let a = &self.t[i][j];
                    if !a.is_zero() {
                        rc -= &cost[self.basis[i]] * a;
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.m {
                let a = &self.t[i][c];
                if a.is_positive() {
                    let ratio = &self.t[i][self.n] / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// max c·z s.t. A z = b, z >= 0.
fn standard_max(a: Vec<Vec<Q>>, b: Vec<Q>, c: &[Q]) -> Result<(Q, Vec<Q>)> {
    let m = a.len();
    let n = c.len();
    let mut t = Vec::with_capacity(m);
    for (mut row, bi) in a.into_iter().zip(b) {
        if bi.is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
            row.extend((0..m).map(|_| Q::zero()));
            row.push(-bi);
        } else {
            row.extend((0..m).map(|_| Q::zero()));
            row.push(bi);
        }
        t.push(row);
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = Q::one();
    }
    let mut tab = Tableau { m, n: n + m, t, basis: (n..n + m).collect() };
    let phase1: Vec<Q> = (0..n + m).map(|j| if j >= n { -Q::one() } else { Q::zero() }).collect();
    tab.run(&phase1, &|_| true)?;
    let infeas: Q = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.t[i][n + m].clone()).sum();
    if infeas.is_positive() {
        return Err(Error::Infeasible);
    }
    // Drive zero-level artificials out of the basis; rows where that is impossible are redundant.
    let mut i = 0;
    while i < tab.m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
                tab.m -= 1;
            }
        } else {
            i += 1;
        }
    }
    let mut cost: Vec<Q> = c.to_vec();
    cost.extend((0..m).map(|_| Q::zero()));
    tab.run(&cost, &|j| j < n)?;
    let mut z = vec![Q::zero(); n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            z[bj] = tab.t[i][tab.n].clone();
        }
    }
    let value = c.iter().zip(&z).map(|(a, b)| a * b).sum();
    Ok((value, z))
}

/// Exact maximum of `objective·x` over an H-polytope with free variables.
///
/// Infeasible and unbounded programs are reported as distinct errors.
pub fn lp_max(objective: &[Q], h: &HPolytope) -> Result<LpOutcome> {
    let n = h.dim;
    if objective.len() != n {
        return Err(Error::Dimension(format!("objective has {} entries, polytope dimension is {n}", objective.len())));
    }
    let mi = h.inequalities.len();
    // Variables: x+ (n), x- (n), slacks (mi).
    let width = 2 * n + mi;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |hs: &HalfSpace, slack: Option<usize>| {
        let mut row = vec![Q::zero(); width];
        for (k, c) in hs.a.iter().enumerate() {
            row[k] = c.clone();
            row[n + k] = -c.clone();
        }
        if let Some(s) = slack {
            row[2 * n + s] = Q::one();
        }
        rows.push(row);
        rhs.push(hs.b.clone());
    };
    for (k, hs) in h.inequalities.iter().enumerate() {
        push(hs, Some(k));
    }
    for hs in &h.equalities {
        push(hs, None);
    }
    let mut cost = vec![Q::zero(); width];
    for (k, c) in objective.iter().enumerate() {
        cost[k] = c.clone();
        cost[n + k] = -c.clone();
    }
    let (value, z) = standard_max(rows, rhs, &cost)?;
    let argmax = (0..n).map(|k| &z[k] - &z[n + k]).collect();
    Ok(LpOutcome { value, argmax })
}

/// Exact maximum of `objective` over conv(points), via weights on the points.
pub fn lp_max_over_points(objective: &[Q], points: &[Vec<Q>]) -> Result<LpOutcome> {
    if points.is_empty() {
        return Err(Error::Infeasible);
    }
    let k = points.len();
    let mut h = HPolytope::new(k);
    for i in 0..k {
        let mut a = vec![Q::zero(); k];
        a[i] = -Q::one();
        h.inequalities.push(HalfSpace::new(a, Q::zero()));
    }
    h.equalities.push(HalfSpace::new(vec![Q::one(); k], Q::one()));
    let weights: Vec<Q> = points.iter().map(|p| super::dot(objective, p)).collect();
    let out = lp_max(&weights, &h)?;
    let dim = points[0].len();
    let mut x = vec![Q::zero(); dim];
    for (w, p) in out.argmax.iter().zip(points) {
        if !w.is_zero() {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += w * pi;
            }
        }
    }
    Ok(LpOutcome { value: out.value, argmax: x })
}

/// True when `p` lies in conv(others), decided exactly.
pub fn in_convex_hull(p: &[Q], others: &[Vec<Q>]) -> bool {
    if others.is_empty() {
        return false;
    }
    let k = others.len();
    let d = p.len();
    let mut rows = Vec::with_capacity(d + 1);
    let mut rhs = Vec::with_capacity(d + 1);
    for c in 0..d {
        rows.push(others.iter().map(|o| o[c].clone()).collect());
        rhs.push(p[c].clone());
    }
    rows.push(vec![Q::one(); k]);
    rhs.push(Q::one());
    standard_max(rows, rhs, &vec![Q::zero(); k]).is_ok()
}

#[cfg(test)]
mod tests {
    use super::super::{q, q_frac, q_vec, HalfSpace};
    use super::*;

    fn hs(a: &[i64], b: i64) -> HalfSpace {
        HalfSpace::new(q_vec(a), q(b))
    }

    fn unit_square() -> HPolytope {
        let mut h = HPolytope::new(2);
        h.inequalities = vec![hs(&[-1, 0], 0), hs(&[1, 0], 1), hs(&[0, -1], 0), hs(&[0, 1], 1)];
        h
    }

    #[test]
    fn square_max() {
        let out = lp_max(&q_vec(&[1, 1]), &unit_square()).unwrap();
        assert_eq!(out.value, q(2));
        assert_eq!(out.argmax, q_vec(&[1, 1]));
    }

    #[test]
    fn simplex_max() {
        let mut h = HPolytope::new(3);
        h.inequalities = vec![hs(&[-1, 0, 0], 0), hs(&[0, -1, 0], 0), hs(&[0, 0, -1], 0)];
        h.equalities = vec![hs(&[1, 1, 1], 1)];
        assert_eq!(lp_max(&q_vec(&[1, 0, 0]), &h).unwrap().value, q(1));
    }

    #[test]
    fn infeasible_and_unbounded_are_distinct() {
        let mut h = HPolytope::new(1);
        h.inequalities = vec![hs(&[1], -1), hs(&[-1], 0)];
        assert_eq!(lp_max(&q_vec(&[1]), &h), Err(Error::Infeasible));
        let mut h = HPolytope::new(1);
        h.inequalities = vec![hs(&[-1], 0)];
        assert_eq!(lp_max(&q_vec(&[1]), &h), Err(Error::Unbounded));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland's rule terminates.
        let mut h = HPolytope::new(4);
        h.inequalities = vec![
            HalfSpace::new(vec![q_frac(1, 4), q(-60), q_frac(-1, 25), q(9)], q(0)),
            HalfSpace::new(vec![q_frac(1, 2), q(-90), q_frac(-1, 50), q(3)], q(0)),
            HalfSpace::new(q_vec(&[0, 0, 1, 0]), q(1)),
        ];
        for i in 0..4 {
            let mut a = vec![0; 4];
            a[i] = -1;
            h.inequalities.push(hs(&a, 0));
        }
        let obj = vec![q_frac(3, 4), q(-150), q_frac(1, 50), q(-6)];
        assert_eq!(lp_max(&obj, &h).unwrap().value, q_frac(1, 20));
    }

    #[test]
    fn hull_membership() {
        let sq = vec![q_vec(&[0, 0]), q_vec(&[0, 1]), q_vec(&[1, 0]), q_vec(&[1, 1])];
        assert!(in_convex_hull(&[q_frac(1, 2), q_frac(1, 3)], &sq));
        assert!(!in_convex_hull(&q_vec(&[1, 1]), &sq[..3]));
        let out = lp_max_over_points(&q_vec(&[2, -1]), &sq).unwrap();
        assert_eq!(out.value, q(2));
        assert_eq!(out.argmax, q_vec(&[1, 0]));
    }
}
