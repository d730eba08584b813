use std::sync::OnceLock;

use commbounds::corpus;
use commbounds::hierarchy::{
    build_moment_structure, canonicalize, hierarchy_upper_bound, HierarchyOptions, Letter, MomentStructure,
    OperatorSet, Variant,
};
use commbounds::model::{Functional, Scenario};
use commbounds::numerics::{random_unit_vector, symmetric_eig, ComplexMatrix, C64};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn min_eig(m: &[f64], n: usize) -> f64 {
    symmetric_eig(m, n).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis of C^n from Gram-Schmidt on random vectors.
fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = random_unit_vector(n, rng);
        for b in &basis {
            let ip: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(a, x)| *a -= ip * x);
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|c| c / norm).collect());
        }
    }
    basis
}

/// Pure states and a projective measurement; Θ = I_A and Φ = I_B, which
/// dominate every pure state.
fn random_operators(nx: usize, ny: usize, nz: usize, d: usize, rng: &mut ChaCha8Rng) -> OperatorSet {
    let pure = |rng: &mut ChaCha8Rng| ComplexMatrix::outer(&random_unit_vector(d, rng));
    let alice = (0..nx).map(|_| pure(rng)).collect();
    let bob = (0..ny).map(|_| pure(rng)).collect();
    let mut povm = vec![ComplexMatrix::zeros(d * d, d * d); nz];
    for v in random_basis(d * d, rng) {
        let z = rng.gen_range(0..nz);
        povm[z] = &povm[z] + &ComplexMatrix::outer(&v);
    }
    OperatorSet { alice, bob, povm, theta: Some(ComplexMatrix::identity(d)), phi: Some(ComplexMatrix::identity(d)) }
}

struct Case {
    scenario: Scenario,
    d: usize,
    opts: HierarchyOptions,
    structure: MomentStructure,
    /// Functionals with their relaxation bounds.
    bounds: Vec<(Functional, f64)>,
}

fn random_functional(nx: usize, ny: usize, nz: usize, rng: &mut ChaCha8Rng) -> Functional {
    let mut f = Functional::zeros(nx, ny, nz);
    for x in 0..nx {
        for y in 0..ny {
            for z in 1..nz {
                f.set(x, y, z, Rational64::from_integer(rng.gen_range(-3..=3)));
            }
        }
    }
    f
}

fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut out = Vec::new();
        let third = |k: i64| Rational64::new(k, 3);
        let mut push = |scenario: Scenario, d: usize, variant: Variant, dimension: Option<usize>, named: &[&str]| {
            let opts = HierarchyOptions { variant, dimension };
            let structure = build_moment_structure(&scenario, &opts).unwrap();
            let (nx, ny, nz) = scenario.shape();
            let mut fs: Vec<Functional> = named.iter().map(|n| corpus::named(n).unwrap().functional.clone()).collect();
            fs.push(random_functional(nx, ny, nz, &mut rng));
            let bounds = fs
                .into_iter()
                .map(|f| {
                    let v = hierarchy_upper_bound(&scenario, &f, &opts).unwrap().value;
                    (f, v)
                })
                .collect();
            out.push(Case { scenario, d, opts, structure, bounds });
        };
        for d in [2, 3] {
            push(Scenario::dimension(3, 2, 2, d).unwrap(), d, Variant::Paper, None, &["I1"]);
            push(Scenario::dimension(4, 2, 2, d).unwrap(), d, Variant::Paper, None, &["I2"]);
            push(Scenario::dimension(4, 3, 2, d).unwrap(), d, Variant::Paper, None, &["I4", "I5"]);
            let dist = Scenario::distinguishability(3, 3, 2, third(d as i64), third(d as i64)).unwrap();
            push(dist.clone(), d, Variant::Paper, Some(d), &["I6"]);
            push(dist.clone(), d, Variant::Extended, Some(d), &["I6"]);
            push(dist, d, Variant::Extended, None, &["I6"]);
        }
        push(Scenario::dimension(3, 2, 3, 2).unwrap(), 2, Variant::Paper, None, &["I3"]);
        out
    })
}

fn class_values(st: &MomentStructure, ops: &OperatorSet) -> Vec<f64> {
    st.classes.iter().map(|w| ops.trace(&w.0).unwrap().re).collect()
}

fn strategy_value(f: &Functional, st: &MomentStructure, values: &[f64]) -> f64 {
    f.terms().map(|(x, y, z, c)| commbounds::model::rat_to_f64(&c) * values[st.probability_class(x, y, z)]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn relaxation_is_valid(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let case = pick.get(cases());
        let st = &case.structure;
        let (nx, ny, nz) = case.scenario.shape();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = random_operators(nx, ny, nz, case.d, &mut rng);
        let values = class_values(st, &ops);

        let n = st.size();
        let gamma = ops.moment_matrix(st).unwrap();
        for (k, class) in st.gamma.iter().enumerate() {
            let expected = class.map_or(0.0, |c| values[c]);
            prop_assert!((gamma[k] - expected).abs() < 1e-9, "entry {k}: {} vs {expected}", gamma[k]);
        }
        prop_assert!(min_eig(&gamma, n) > -1e-9);
        for r in &st.relations {
            prop_assert!(r.violation(&values) < 1e-9, "{} violated by {:e} ({:?})", r.label, r.violation(&values), case.opts);
        }
        for block in &st.localizing {
            let m: Vec<f64> = block.entries.iter().map(|e| e.iter().map(|&(k, c)| c * values[k]).sum()).collect();
            prop_assert!(min_eig(&m, block.size) > -1e-9, "{} not PSD", block.label);
        }
        for (f, bound) in &case.bounds {
            let v = strategy_value(f, st, &values);
            prop_assert!(v <= bound + 1e-6, "strategy {v} above bound {bound}");
        }
    }

    #[test]
    fn trace_is_invariant_under_canonicalization(seed in any::<u64>(), word in prop::collection::vec(0usize..9, 0..7)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ops = random_operators(3, 2, 2, 2, &mut rng);
        // Non-idempotent, non-trivial Θ and Φ.
        let g = ComplexMatrix::outer(&random_unit_vector(2, &mut rng));
        ops.theta = Some(&ComplexMatrix::identity(2) + &g);
        ops.phi = Some(&ComplexMatrix::identity(2) + &ComplexMatrix::outer(&random_unit_vector(2, &mut rng)).scale(2.0));
        let w: Vec<Letter> = word.iter().map(|&k| letters()[k]).collect();
        let t = ops.trace(&w).unwrap().re;
        match canonicalize(&w) {
            None => prop_assert!(t.abs() < 1e-9, "zero word {w:?} has trace {t}"),
            Some(c) => {
                let tc = ops.trace(&c.0).unwrap().re;
                prop_assert!((t - tc).abs() < 1e-9, "{w:?}: {t} vs {c}: {tc}");
            }
        }
    }
}

fn letters() -> Vec<Letter> {
    use Letter::*;
    vec![
        Identity,
        AliceState(0),
        AliceState(1),
        AliceState(2),
        BobState(0),
        BobState(1),
        Measurement(0),
        Measurement(1),
        Theta,
        Phi,
    ]
}

/// Every word of length ≤ 4 over the letters of (3,2,2) plus Θ and Φ.
#[test]
fn canonicalization_idempotent_and_rotation_invariant() {
    let ls = letters();
    let mut words: Vec<Vec<Letter>> = vec![vec![]];
    let mut frontier = words.clone();
    for _ in 0..4 {
        frontier = frontier
            .iter()
            .flat_map(|w| ls.iter().map(move |&l| w.iter().copied().chain([l]).collect::<Vec<_>>()))
            .collect();
        words.extend(frontier.iter().cloned());
    }
    for w in &words {
        let c = canonicalize(w);
        if let Some(c) = &c {
            assert_eq!(canonicalize(&c.0).as_ref(), Some(c), "not idempotent on {w:?}");
        }
        for r in 1..w.len() {
            let mut rot = w.clone();
            rot.rotate_left(r);
            assert_eq!(canonicalize(&rot), c, "rotation {r} of {w:?}");
        }
        let rev: Vec<Letter> = w.iter().rev().copied().collect();
        assert_eq!(canonicalize(&rev), c, "reversal of {w:?}");
    }
}

/// At the optimum, probability entries are probabilities.
#[test]
fn optimal_probabilities_are_normalized() {
    for name in ["I1", "I2", "I3", "I4", "I5", "I6"] {
        let ineq = corpus::named(name).unwrap();
        let dims: &[Option<usize>] = if ineq.scenario.is_distinguishability() { &[Some(2)] } else { &[None] };
        for &dimension in dims {
            let opts = HierarchyOptions { dimension, ..Default::default() };
            let r = hierarchy_upper_bound(&ineq.scenario, &ineq.functional, &opts).unwrap();
            let (nx, ny, nz) = ineq.scenario.shape();
            for x in 0..nx {
                for y in 0..ny {
                    let mut sum = 0.0;
                    for z in 0..nz {
                        let p = r.class_values[r.structure.probability_class(x, y, z)];
                        assert!((-1e-7..=1.0 + 1e-7).contains(&p), "{name}: p({z}|{x},{y}) = {p}");
                        sum += p;
                    }
                    assert!((sum - 1.0).abs() < 1e-7, "{name}: Σ_z p(z|{x},{y}) = {sum}");
                }
            }
        }
    }
}
