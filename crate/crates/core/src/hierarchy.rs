//! Moment-matrix relaxation giving upper bounds on quantum values.
//!
//! Operators are words over the letters ρ_x ⊗ I, I ⊗ σ_y, M_z and, under a
//! distinguishability bound, the auxiliary Θ ⊗ I and I ⊗ Φ. States are pure
//! and measurements projective, Alice and Bob letters commute, and moments are
//! traces, so words are equal up to rotation. The moment matrix is indexed by
//! the monomial list
//! `I, (Θ, Φ), ρ_x, σ_y, M_z, ρ_x M_z, σ_y M_z` with Γ_{u,v} = Tr[u v†].

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write};

use crate::error::{Error, Result};
use crate::model::{rat_to_f64, Constraint, Functional, Scenario};
use crate::numerics::{ComplexMatrix, C64};
use crate::sdp::{self, BlockKind, Coeff, SdpProblem, SdpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Identity,
    AliceState(usize),
    BobState(usize),
    Measurement(usize),
    Theta,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetterSide {
    Alice,
    Bob,
    Joint,
}

impl Letter {
    pub fn side(self) -> LetterSide {
        match self {
            Letter::AliceState(_) | Letter::Theta => LetterSide::Alice,
            Letter::BobState(_) | Letter::Phi => LetterSide::Bob,
            Letter::Identity | Letter::Measurement(_) => LetterSide::Joint,
        }
    }

    fn is_projector(self) -> bool {
        matches!(self, Letter::AliceState(_) | Letter::BobState(_) | Letter::Measurement(_))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Identity => write!(f, "I"),
            Letter::AliceState(x) => write!(f, "ρ{}", x + 1),
            Letter::BobState(y) => write!(f, "σ{}", y + 1),
            Letter::Measurement(z) => write!(f, "M{z}"),
            Letter::Theta => write!(f, "Θ"),
            Letter::Phi => write!(f, "Φ"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// The word of Γ_{u,v} = Tr[u v†]; every letter is Hermitian.
    pub fn pair(u: &Word, v: &Word) -> Word {
        Word(u.0.iter().chain(v.0.iter().rev()).copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Linear reductions: identity deletion, idempotence, orthogonal effects.
fn reduce_linear(mut w: Vec<Letter>) -> Option<Vec<Letter>> {
    w.retain(|l| *l != Letter::Identity);
    let mut i = 0;
    while i + 1 < w.len() {
        let (a, b) = (w[i], w[i + 1]);
        match (a, b) {
            (Letter::Measurement(p), Letter::Measurement(q)) if p != q => return None,
            _ if a == b && a.is_projector() => {
                w.remove(i + 1);
                i = i.saturating_sub(1);
            }
            _ => i += 1,
        }
    }
    Some(w)
}

/// Linear reductions plus the same rules across the wrap-around of the trace.
fn reduce_cyclic(w: Vec<Letter>) -> Option<Vec<Letter>> {
    let mut w = reduce_linear(w)?;
    loop {
        let n = w.len();
        if n < 2 {
            return Some(w);
        }
        match (w[n - 1], w[0]) {
            (Letter::Measurement(p), Letter::Measurement(q)) if p != q => return None,
            (a, b) if a == b && a.is_projector() => {
                w.pop();
            }
            _ => return Some(w),
        }
    }
}

fn neighbours(w: &[Letter]) -> Vec<Vec<Letter>> {
    let n = w.len();
    let mut out = Vec::with_capacity(2 * n + 1);
    for r in 1..n {
        out.push(w[r..].iter().chain(&w[..r]).copied().collect());
    }
    out.push(w.iter().rev().copied().collect());
    if n >= 2 {
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (w[i].side(), w[j].side());
            if a != b && a != LetterSide::Joint && b != LetterSide::Joint {
                let mut v = w.to_vec();
                v.swap(i, j);
                out.push(v);
            }
        }
    }
    out
}

/// Canonical representative of the trace class of `w`, or `None` for the zero word.
///
/// Explores rotations, reversal and Alice/Bob transpositions with reductions
/// applied throughout, then picks the shortest word, lexicographically least.
pub fn canonicalize(w: &[Letter]) -> Option<Word> {
    let start = reduce_cyclic(w.to_vec())?;
    let mut seen: HashSet<Vec<Letter>> = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for v in neighbours(&u) {
            let v = reduce_cyclic(v)?;
            if seen.insert(v.clone()) {
                stack.push(v);
            }
        }
    }
    seen.into_iter().min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b))).map(Word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Scalar constraints as stated for the one-level relaxation.
    #[default]
    Paper,
    /// Localizing matrices for Θ − ρ_x and Φ − σ_y.
    Extended,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Variant::Paper),
            "extended" => Ok(Variant::Extended),
            _ => Err(Error::Validation(format!("unknown hierarchy variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HierarchyOptions {
    pub variant: Variant,
    /// Dimension constraints; required for dimension-bounded scenarios and
    /// optional on top of a distinguishability bound. `None` uses the
    /// scenario's own dimension when it has one.
    pub dimension: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// Σ coeff · class ⋈ rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub label: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Relation {
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs: f64 = self.terms.iter().map(|&(k, c)| c * values[k]).sum();
        match self.sense {
            Sense::Eq => (lhs - self.rhs).abs(),
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
        }
    }
}

/// A PSD block whose entries are linear in the classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizingBlock {
    pub label: String,
    pub size: usize,
    /// Row-major entries.
    pub entries: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentStructure {
    pub monomials: Vec<Word>,
    /// Canonical words, one per moment variable.
    pub classes: Vec<Word>,
    /// Class of each Γ entry, row-major; `None` for the zero word.
    pub gamma: Vec<Option<usize>>,
    pub localizing: Vec<LocalizingBlock>,
    pub relations: Vec<Relation>,
    nx: usize,
    ny: usize,
    nz: usize,
    index: BTreeMap<Word, usize>,
}

impl MomentStructure {
    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    pub fn class_of(&self, w: &[Letter]) -> Option<usize> {
        canonicalize(w).and_then(|c| self.index.get(&c).copied())
    }

    /// Class of p(z|x,y) = Tr[ρ_x σ_y M_z].
    pub fn probability_class(&self, x: usize, y: usize, z: usize) -> usize {
        self.class_of(&[Letter::AliceState(x), Letter::BobState(y), Letter::Measurement(z)])
            .expect("probability words occur in the moment matrix")
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }
}

struct Builder {
    classes: Vec<Word>,
    index: BTreeMap<Word, usize>,
}

impl Builder {
    fn class(&mut self, w: &[Letter]) -> Option<usize> {
        let c = canonicalize(w)?;
        Some(*self.index.entry(c.clone()).or_insert_with(|| {
            self.classes.push(c);
            self.classes.len() - 1
        }))
    }

    fn must(&mut self, w: &[Letter]) -> usize {
        self.class(w).expect("constraint word is nonzero")
    }
}

/// Monomials, entry classes and constraints of the relaxation.
pub fn build_moment_structure(s: &Scenario, opts: &HierarchyOptions) -> Result<MomentStructure> {
    s.validate()?;
    let (nx, ny, nz) = s.shape();
    let dist = match &s.constraint {
        Constraint::Dimension { .. } => None,
        Constraint::Distinguishability { d1, d2, .. } => Some((rat_to_f64(d1), rat_to_f64(d2))),
    };
    let dim = match (&s.constraint, opts.dimension) {
        (_, Some(d)) => Some(d),
        (Constraint::Dimension { d }, None) => Some(*d),
        _ => None,
    };
    if dim.is_some_and(|d| d < 1) {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    use Letter::*;
    let mut monomials = vec![Word::identity()];
    if dist.is_some() {
        monomials.push(Word(vec![Theta]));
        monomials.push(Word(vec![Phi]));
    }
    monomials.extend((0..nx).map(|x| Word(vec![AliceState(x)])));
    monomials.extend((0..ny).map(|y| Word(vec![BobState(y)])));
    monomials.extend((0..nz).map(|z| Word(vec![Measurement(z)])));
    for x in 0..nx {
        monomials.extend((0..nz).map(|z| Word(vec![AliceState(x), Measurement(z)])));
    }
    for y in 0..ny {
        monomials.extend((0..nz).map(|z| Word(vec![BobState(y), Measurement(z)])));
    }
    let n = monomials.len();
    let mut b = Builder { classes: Vec::new(), index: BTreeMap::new() };
    let mut gamma = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            gamma[i * n + j] = b.class(&Word::pair(&monomials[i], &monomials[j]).0);
        }
    }

    let mut relations = Vec::new();
    let mut rel = |label: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64| {
        relations.push(Relation { label, terms, sense, rhs });
    };
    for x in 0..nx {
        for y in 0..ny {
            let (a, bb) = (AliceState(x), BobState(y));
            let norm = b.must(&[a, bb]);
            rel(format!("Tr[ρ{}σ{}] = 1", x + 1, y + 1), vec![(norm, 1.0)], Sense::Eq, 1.0);
            let terms = (0..nz).map(|z| (b.must(&[a, bb, Measurement(z)]), 1.0)).collect();
            rel(format!("Σ_z p(z|{},{}) = 1", x + 1, y + 1), terms, Sense::Eq, 1.0);
            for z in 0..nz {
                let p = b.must(&[a, bb, Measurement(z)]);
                rel(format!("p({z}|{},{}) >= 0", x + 1, y + 1), vec![(p, 1.0)], Sense::Ge, 0.0);
            }
        }
    }
    for x in 0..nx {
        let mut terms: Vec<(usize, f64)> = (0..nz).map(|z| (b.must(&[AliceState(x), Measurement(z)]), 1.0)).collect();
        terms.push((b.must(&[AliceState(x)]), -1.0));
        rel(format!("Σ_z Tr[ρ{} M_z] = Tr[ρ{}]", x + 1, x + 1), terms, Sense::Eq, 0.0);
    }
    for y in 0..ny {
        let mut terms: Vec<(usize, f64)> = (0..nz).map(|z| (b.must(&[BobState(y), Measurement(z)]), 1.0)).collect();
        terms.push((b.must(&[BobState(y)]), -1.0));
        rel(format!("Σ_z Tr[σ{} M_z] = Tr[σ{}]", y + 1, y + 1), terms, Sense::Eq, 0.0);
    }
    if let Some(d) = dim {
        let d = d as f64;
        rel("Tr[I] = d²".into(), vec![(b.must(&[]), 1.0)], Sense::Eq, d * d);
        for x in 0..nx {
            rel(format!("Tr[ρ{}] = d", x + 1), vec![(b.must(&[AliceState(x)]), 1.0)], Sense::Eq, d);
        }
        for y in 0..ny {
            rel(format!("Tr[σ{}] = d", y + 1), vec![(b.must(&[BobState(y)]), 1.0)], Sense::Eq, d);
        }
    }
    let mut localizing = Vec::new();
    if let Some((d1, d2)) = dist {
        let r0 = b.must(&[AliceState(0)]);
        let s0 = b.must(&[BobState(0)]);
        for x in 1..nx {
            let rx = b.must(&[AliceState(x)]);
            rel(format!("Tr[ρ{}] = Tr[ρ1]", x + 1), vec![(rx, 1.0), (r0, -1.0)], Sense::Eq, 0.0);
        }
        for y in 1..ny {
            let sy = b.must(&[BobState(y)]);
            rel(format!("Tr[σ{}] = Tr[σ1]", y + 1), vec![(sy, 1.0), (s0, -1.0)], Sense::Eq, 0.0);
        }
        let theta = b.must(&[Theta]);
        let phi = b.must(&[Phi]);
        match opts.variant {
            Variant::Paper => {
                // Traces run over the joint space, so under a dimension bound the
                // per-system bound picks up the other side's identity trace d.
                let scale = dim.map_or(1.0, |d| d as f64);
                for x in 0..nx {
                    let rx = b.must(&[AliceState(x)]);
                    rel(format!("Tr[Θ] >= Tr[ρ{}]", x + 1), vec![(theta, 1.0), (rx, -1.0)], Sense::Ge, 0.0);
                }
                rel(format!("Tr[Θ]/n_x <= D1{}", if dim.is_some() { " d" } else { "" }), vec![(theta, 1.0 / nx as f64)], Sense::Le, d1 * scale);
                for y in 0..ny {
                    let sy = b.must(&[BobState(y)]);
                    rel(format!("Tr[Φ] >= Tr[σ{}]", y + 1), vec![(phi, 1.0), (sy, -1.0)], Sense::Ge, 0.0);
                }
                rel(format!("Tr[Φ]/n_y <= D2{}", if dim.is_some() { " d" } else { "" }), vec![(phi, 1.0 / ny as f64)], Sense::Le, d2 * scale);
            }
            Variant::Extended => {
                let basis: Vec<Option<Letter>> = std::iter::once(None).chain((0..nz).map(|z| Some(Measurement(z)))).collect();
                let local = |label: String, big: Letter, small: Letter, b: &mut Builder| {
                    let m = basis.len();
                    let mut entries = Vec::with_capacity(m * m);
                    for u in &basis {
                        for v in &basis {
                            let word = |mid: Letter| -> Vec<Letter> { u.iter().copied().chain([mid]).chain(v.iter().copied()).collect() };
                            let mut e = Vec::new();
                            if let Some(k) = b.class(&word(big)) {
                                e.push((k, 1.0));
                            }
                            if let Some(k) = b.class(&word(small)) {
                                e.push((k, -1.0));
                            }
                            entries.push(e);
                        }
                    }
                    LocalizingBlock { label, size: m, entries }
                };
                for x in 0..nx {
                    localizing.push(local(format!("Θ - ρ{}", x + 1), Theta, AliceState(x), &mut b));
                }
                for y in 0..ny {
                    localizing.push(local(format!("Φ - σ{}", y + 1), Phi, BobState(y), &mut b));
                }
                rel(
                    "Tr[Θ] <= n_x D1 Tr[ρ1]".into(),
                    vec![(theta, 1.0), (r0, -(nx as f64) * d1)],
                    Sense::Le,
                    0.0,
                );
                rel(
                    "Tr[Φ] <= n_y D2 Tr[σ1]".into(),
                    vec![(phi, 1.0), (s0, -(ny as f64) * d2)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    Ok(MomentStructure { monomials, classes: b.classes, gamma, localizing, relations, nx, ny, nz, index: b.index })
}

#[derive(Debug, Clone)]
pub struct HierarchyResult {
    pub value: f64,
    pub dual_value: f64,
    pub status: SdpStatus,
    /// Solved moment matrix, row-major.
    pub gamma: Vec<f64>,
    /// Value of each class at the optimum.
    pub class_values: Vec<f64>,
    pub structure: MomentStructure,
}

impl HierarchyResult {
    /// Labeled table of Γ.
    pub fn dump(&self) -> String {
        dump_gamma(&self.structure, &self.gamma)
    }
}

pub fn dump_gamma(st: &MomentStructure, gamma: &[f64]) -> String {
    let n = st.size();
    let labels: Vec<String> = st.monomials.iter().map(|w| w.to_string()).collect();
    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(1).max(10);
    let mut s = String::new();
    let _ = write!(s, "{:>width$}", "");
    for l in &labels {
        let _ = write!(s, " {l:>width$}");
    }
    s.push('\n');
    for i in 0..n {
        let _ = write!(s, "{:>width$}", labels[i]);
        for j in 0..n {
            let _ = write!(s, " {:>width$.6}", gamma[i * n + j]);
        }
        s.push('\n');
    }
    s
}

const DUAL_ACCEPT: f64 = 1e-7;

/// Upper bound on Σ c(x,y,z) p(z|x,y) from the relaxation.
pub fn hierarchy_upper_bound(s: &Scenario, f: &Functional, opts: &HierarchyOptions) -> Result<HierarchyResult> {
    f.check_scenario(s)?;
    let st = build_moment_structure(s, opts)?;
    let (p, repr) = to_sdp(&st, f);
    let sol = sdp::solve(&p)?;
    // When the moment set is unbounded the primal iterates can stall while the
    // dual stays feasible; its objective is still a valid upper bound.
    let dual_only = sol.status == SdpStatus::MaxIter && sol.dual_infeasibility <= DUAL_ACCEPT;
    if sol.status != SdpStatus::Optimal && !dual_only {
        return Err(Error::Solver(format!("hierarchy SDP ended with status {}", sol.status)));
    }
    let n = st.size();
    let g = &sol.blocks[0];
    let gamma: Vec<f64> = (0..n * n).map(|k| g[(k / n, k % n)].re).collect();
    let class_values = repr.iter().map(|r| r.value(&sol.blocks)).collect();
    Ok(HierarchyResult {
        value: if dual_only { sol.dual_value } else { sol.primal_value },
        dual_value: sol.dual_value,
        status: sol.status,
        gamma,
        class_values,
        structure: st,
    })
}

/// Where a class variable lives in the SDP.
#[derive(Debug, Clone, Copy)]
enum Repr {
    Entry(usize, usize),
    /// Difference of two entries of the free-variable diagonal block.
    Free(usize, usize),
}

impl Repr {
    fn coeffs(self, c: f64) -> Vec<Coeff> {
        match self {
            Repr::Entry(i, j) => vec![Coeff::real(0, i, j, if i == j { c } else { 0.5 * c })],
            Repr::Free(block, t) => vec![Coeff {
                block,
                entries: vec![(2 * t, 2 * t, C64::new(c, 0.0)), (2 * t + 1, 2 * t + 1, C64::new(-c, 0.0))],
            }],
        }
    }

    fn value(self, blocks: &[ComplexMatrix]) -> f64 {
        match self {
            Repr::Entry(i, j) => blocks[0][(i, j)].re,
            Repr::Free(b, t) => blocks[b][(2 * t, 2 * t)].re - blocks[b][(2 * t + 1, 2 * t + 1)].re,
        }
    }
}

fn combo(repr: &[Repr], terms: &[(usize, f64)]) -> Vec<Coeff> {
    terms.iter().flat_map(|&(k, c)| repr[k].coeffs(c)).collect()
}

fn to_sdp(st: &MomentStructure, f: &Functional) -> (SdpProblem, Vec<Repr>) {
    let n = st.size();
    let mut p = SdpProblem::new();
    let g = p.add_block(n, BlockKind::Real);
    let loc_blocks: Vec<usize> = st.localizing.iter().map(|l| p.add_block(l.size, BlockKind::Real)).collect();
    let mut repr: Vec<Option<Repr>> = vec![None; st.classes.len()];
    for i in 0..n {
        for j in i..n {
            if let Some(k) = st.gamma[i * n + j] {
                repr[k].get_or_insert(Repr::Entry(i, j));
            }
        }
    }
    let n_free = repr.iter().filter(|r| r.is_none()).count();
    if n_free > 0 {
        let fb = p.add_block(2 * n_free, BlockKind::Nonnegative);
        let mut t = 0;
        for r in repr.iter_mut().filter(|r| r.is_none()) {
            *r = Some(Repr::Free(fb, t));
            t += 1;
        }
    }
    let repr: Vec<Repr> = repr.into_iter().map(|r| r.expect("every class placed")).collect();
    // Tie Γ entries to their class representative.
    for i in 0..n {
        for j in i..n {
            let own = Coeff::real(g, i, j, if i == j { 1.0 } else { 0.5 });
            match st.gamma[i * n + j] {
                None => p.add_equality(vec![own], 0.0),
                Some(k) => {
                    if let Repr::Entry(a, b) = repr[k] {
                        if (a, b) == (i, j) {
                            continue;
                        }
                    }
                    let mut terms = vec![own];
                    terms.extend(repr[k].coeffs(-1.0));
                    p.add_equality(terms, 0.0);
                }
            }
        }
    }
    for (l, &blk) in st.localizing.iter().zip(&loc_blocks) {
        for a in 0..l.size {
            for b in a..l.size {
                let mut terms = vec![Coeff::real(blk, a, b, if a == b { 1.0 } else { 0.5 })];
                let neg: Vec<(usize, f64)> = l.entries[a * l.size + b].iter().map(|&(k, c)| (k, -c)).collect();
                terms.extend(combo(&repr, &neg));
                p.add_equality(terms, 0.0);
            }
        }
    }
    for r in &st.relations {
        match r.sense {
            Sense::Eq => p.add_equality(combo(&repr, &r.terms), r.rhs),
            Sense::Le => p.add_inequality(combo(&repr, &r.terms), r.rhs),
            Sense::Ge => {
                let neg: Vec<(usize, f64)> = r.terms.iter().map(|&(k, c)| (k, -c)).collect();
                p.add_inequality(combo(&repr, &neg), -r.rhs);
            }
        }
    }
    let mut obj: BTreeMap<usize, f64> = BTreeMap::new();
    for (x, y, z, c) in f.terms() {
        *obj.entry(st.probability_class(x, y, z)).or_default() += rat_to_f64(&c);
    }
    let terms: Vec<(usize, f64)> = obj.into_iter().collect();
    p.objective = merge_coeffs(combo(&repr, &terms));
    (p, repr)
}

/// Combines coefficients on the same block so each block appears once.
fn merge_coeffs(cs: Vec<Coeff>) -> Vec<Coeff> {
    let mut by_block: BTreeMap<usize, Coeff> = BTreeMap::new();
    for c in cs {
        by_block.entry(c.block).or_insert_with(|| Coeff::new(c.block)).entries.extend(c.entries);
    }
    by_block.into_values().collect()
}

/// The SDP for a functional, for dumping or external solving.
pub fn hierarchy_sdp(s: &Scenario, f: &Functional, opts: &HierarchyOptions) -> Result<SdpProblem> {
    f.check_scenario(s)?;
    let st = build_moment_structure(s, opts)?;
    Ok(to_sdp(&st, f).0)
}

/// Operators of an explicit strategy on C^dA ⊗ C^dB, for evaluating moments.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub alice: Vec<ComplexMatrix>,
    pub bob: Vec<ComplexMatrix>,
    pub povm: Vec<ComplexMatrix>,
    pub theta: Option<ComplexMatrix>,
    pub phi: Option<ComplexMatrix>,
}

impl OperatorSet {
    fn dims(&self) -> (usize, usize) {
        (self.alice[0].rows(), self.bob[0].rows())
    }

    fn operator(&self, l: Letter) -> Result<ComplexMatrix> {
        use crate::numerics::kron;
        let (da, db) = self.dims();
        let (ia, ib) = (ComplexMatrix::identity(da), ComplexMatrix::identity(db));
        let missing = || Error::Validation(format!("no operator for {l}"));
        Ok(match l {
            Letter::Identity => ComplexMatrix::identity(da * db),
            Letter::AliceState(x) => kron(self.alice.get(x).ok_or_else(missing)?, &ib),
            Letter::BobState(y) => kron(&ia, self.bob.get(y).ok_or_else(missing)?),
            Letter::Measurement(z) => self.povm.get(z).ok_or_else(missing)?.clone(),
            Letter::Theta => kron(self.theta.as_ref().ok_or_else(missing)?, &ib),
            Letter::Phi => kron(&ia, self.phi.as_ref().ok_or_else(missing)?),
        })
    }

    /// Tr of the operator product of `w`.
    pub fn trace(&self, w: &[Letter]) -> Result<C64> {
        let (da, db) = self.dims();
        let mut acc = ComplexMatrix::identity(da * db);
        for &l in w {
            acc = &acc * &self.operator(l)?;
        }
        Ok(acc.trace())
    }

    /// Γ_{u,v} = Re Tr[u v†] over the structure's monomials.
    pub fn moment_matrix(&self, st: &MomentStructure) -> Result<Vec<f64>> {
        let n = st.size();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self.trace(&Word::pair(&st.monomials[i], &st.monomials[j]).0)?.re;
            }
        }
        Ok(g)
    }
}
