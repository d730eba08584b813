use commbounds::model::{behavior_from_strategy, evaluate_exact, evaluate_functional, Behavior, Functional, QuantumStrategy};
use commbounds::numerics::{random_unit_vector, ComplexMatrix, C64};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mixed states and a POVM built from random rank-one pieces rescaled to sum to I.
fn random_strategy(nx: usize, ny: usize, nz: usize, d: usize, rng: &mut ChaCha8Rng) -> QuantumStrategy {
    let mixed = |rng: &mut ChaCha8Rng| {
        let w: f64 = rng.gen_range(0.0..1.0);
        let a = ComplexMatrix::outer(&random_unit_vector(d, rng)).scale(w);
        &a + &ComplexMatrix::outer(&random_unit_vector(d, rng)).scale(1.0 - w)
    };
    let alice = (0..nx).map(|_| mixed(rng)).collect();
    let bob = (0..ny).map(|_| mixed(rng)).collect();
    let n = d * d;
    let pieces: Vec<ComplexMatrix> = (0..nz)
        .map(|_| {
            (0..n).fold(ComplexMatrix::zeros(n, n), |acc, _| &acc + &ComplexMatrix::outer(&random_unit_vector(n, rng)))
        })
        .collect();
    // S^{-1/2} P_z S^{-1/2} with S = Σ P_z sums to the identity.
    let s = pieces.iter().fold(ComplexMatrix::zeros(n, n), |a, p| &a + p);
    let s_inv_half = commbounds::numerics::hermitian_eig(&s).unwrap().map(|l| 1.0 / l.sqrt());
    let povm = pieces.iter().map(|p| &(&s_inv_half * p) * &s_inv_half).collect();
    QuantumStrategy { alice_states: alice, bob_states: bob, povm }
}

fn rational_behavior(nx: usize, ny: usize, nz: usize, raw: &[u8]) -> Behavior<Rational64> {
    let mut b = Behavior::zeros(nx, ny, nz);
    let mut k = 0;
    for x in 0..nx {
        for y in 0..ny {
            let w: Vec<i64> = (0..nz).map(|_| { k += 1; raw[k % raw.len()] as i64 + 1 }).collect();
            let total: i64 = w.iter().sum();
            for z in 0..nz {
                b.set(z, x, y, Rational64::new(w[z], total));
            }
        }
    }
    b
}

fn functional(nx: usize, ny: usize, nz: usize, raw: &[i8]) -> Functional {
    let mut f = Functional::zeros(nx, ny, nz);
    let mut k = 0;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                k += 1;
                f.set(x, y, z, Rational64::new(raw[k % raw.len()] as i64, 3));
            }
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn strategies_give_behaviors(seed in any::<u64>(), d in 2usize..4, nx in 2usize..5, ny in 2usize..4, nz in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_strategy(nx, ny, nz, d, &mut rng);
        prop_assert!(s.issues().is_empty(), "{:?}", s.issues());
        let b = behavior_from_strategy(&s).unwrap();
        prop_assert!(b.validate().is_ok(), "{:?}", b.validate());
    }
}

proptest! {
    #[test]
    fn evaluation_is_linear(
        shape in (2usize..5, 2usize..4, 2usize..4),
        b1 in prop::collection::vec(0u8..9, 40),
        b2 in prop::collection::vec(0u8..9, 40),
        coeffs in prop::collection::vec(-6i8..=6, 40),
        alpha in (0i64..=7).prop_map(|k| Rational64::new(k, 7)),
    ) {
        let (nx, ny, nz) = shape;
        let f = functional(nx, ny, nz, &coeffs);
        let (p, q) = (rational_behavior(nx, ny, nz, &b1), rational_behavior(nx, ny, nz, &b2));
        let mut mix = Behavior::zeros(nx, ny, nz);
        mix.p = p.p.iter().zip(&q.p).map(|(a, b)| alpha * a + (Rational64::from_integer(1) - alpha) * b).collect();
        let lhs = evaluate_exact(&f, &mix).unwrap();
        let rhs = alpha * evaluate_exact(&f, &p).unwrap() + (Rational64::from_integer(1) - alpha) * evaluate_exact(&f, &q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relabeling_outcomes_preserves_value(
        shape in (2usize..5, 2usize..4, 2usize..5),
        raw in prop::collection::vec(0u8..9, 60),
        coeffs in prop::collection::vec(-6i8..=6, 60),
        perm_seed in any::<u64>(),
    ) {
        let (nx, ny, nz) = shape;
        let f = functional(nx, ny, nz, &coeffs);
        let b = rational_behavior(nx, ny, nz, &raw);
        let mut perm: Vec<usize> = (0..nz).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        for i in (1..nz).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let before = evaluate_exact(&f, &b).unwrap();
        let after = evaluate_exact(&f.relabel_outcomes(&perm), &b.relabel_outcomes(&perm)).unwrap();
        prop_assert_eq!(before, after);
        let bf = evaluate_functional(&f, &b.to_f64()).unwrap();
        prop_assert!((bf - commbounds::model::rat_to_f64(&before)).abs() < 1e-12);
    }
}

#[test]
fn outer_products_of_unit_vectors_are_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = random_unit_vector(3, &mut rng);
    let m = ComplexMatrix::outer(&v);
    assert!((m.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
}
