use commbounds::numerics::{hermitian_eig, kron, partial_trace, random_unit_vector, ComplexMatrix, Side, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Square matrix with entries k/4 + i·l/4, exactly representable.
fn dyadic(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-8i32..=8, -8i32..=8), n * n).prop_map(move |v| {
        let data = v.into_iter().map(|(a, b)| C64::new(a as f64 / 4.0, b as f64 / 4.0)).collect();
        ComplexMatrix::new(n, n, data).unwrap()
    })
}

fn sized() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..4).prop_flat_map(dyadic)
}

proptest! {
    #[test]
    fn kron_is_associative(a in sized(), b in sized(), c in sized()) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn partial_trace_of_product(a in sized(), b in sized()) {
        let (da, db) = (a.rows(), b.rows());
        let ab = kron(&a, &b);
        prop_assert_eq!(partial_trace(&ab, (da, db), Side::B).unwrap(), a.scale_complex(b.trace()));
        prop_assert_eq!(partial_trace(&ab, (da, db), Side::A).unwrap(), b.scale_complex(a.trace()));
    }

    #[test]
    fn top_eigenvalue_dominates_rayleigh_quotients(n in 1usize..9, seed in any::<u64>(), raw in dyadic(8)) {
        let a = ComplexMatrix::from_fn(n, n, |i, j| raw[(i, j)]).hermitian_part();
        let top = hermitian_eig(&a).unwrap().max().0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let v = random_unit_vector(n, &mut rng);
            let av = a.matvec(&v);
            let q: f64 = v.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
            prop_assert!(q <= top + 1e-6, "quotient {q} above top eigenvalue {top}");
            best = best.max(q);
        }
        // The top eigenvector itself attains it.
        let spec = hermitian_eig(&a).unwrap();
        let (val, vec) = spec.max();
        let av = a.matvec(vec);
        let q: f64 = vec.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum();
        prop_assert!((q - val).abs() < 1e-9 && best <= val + 1e-6);
    }
}
