use commbounds::numerics::{hermitian_eig, ComplexMatrix, C64};
use commbounds::sdp::{solve, verify, BlockKind, Coeff, SdpProblem, SdpStatus};
use proptest::prelude::*;

fn hermitian(n: usize, vals: &[f64]) -> ComplexMatrix {
    let mut k = 0;
    let mut next = || {
        k += 1;
        vals[(k - 1) % vals.len()]
    };
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        data[i * n + i] = C64::new(next(), 0.0);
        for j in i + 1..n {
            let v = C64::new(next(), next());
            data[i * n + j] = v;
            data[j * n + i] = v.conj();
        }
    }
    ComplexMatrix::new(n, n, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_value_matches_eigenvalue(n in 2usize..5, vals in prop::collection::vec(-1.0f64..1.0, 32)) {
        let c = hermitian(n, &vals);
        let mut p = SdpProblem::new();
        let b = p.add_block(n, BlockKind::Complex);
        p.objective.push(Coeff::from_dense(b, &c));
        p.add_equality(vec![Coeff::scaled_identity(b, n, 1.0)], 1.0);
        let s = solve(&p).unwrap();
        prop_assert_eq!(s.status, SdpStatus::Optimal);
        let top = hermitian_eig(&c).unwrap().max().0;
        prop_assert!((s.primal_value - top).abs() < 1e-6, "{} vs {}", s.primal_value, top);
    }

    #[test]
    fn complex_block_matches_real_embedding(
        n in 1usize..7,
        m in 0usize..4,
        vals in prop::collection::vec(-1.0f64..1.0, 64),
        x0 in prop::collection::vec(-1.0f64..1.0, 48),
    ) {
        let g = hermitian(n, &x0);
        let x = &(&g * &g.adjoint()) + &ComplexMatrix::identity(n);
        let c = hermitian(n, &vals);
        let cons: Vec<ComplexMatrix> = (0..m).map(|k| hermitian(n, &vals[(5 * k + 1)..])).collect();
        let rhs: Vec<f64> = cons.iter().map(|a| a.inner_re(&x)).collect();
        let cap = x.trace().re + 1.0;

        let mut pc = SdpProblem::new();
        let b = pc.add_block(n, BlockKind::Complex);
        pc.objective.push(Coeff::from_dense(b, &c));
        for (a, r) in cons.iter().zip(&rhs) {
            pc.add_equality(vec![Coeff::from_dense(b, a)], *r);
        }
        pc.add_inequality(vec![Coeff::scaled_identity(b, n, 1.0)], cap);

        // ⟨A, X⟩ = ½⟨emb A, emb X⟩ with emb A = [[Re A, −Im A], [Im A, Re A]].
        let emb = |a: &ComplexMatrix| {
            ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
                let v = a[(i % n, j % n)];
                let e = match (i < n, j < n) {
                    (true, true) | (false, false) => v.re,
                    (true, false) => -v.im,
                    (false, true) => v.im,
                };
                C64::new(0.5 * e, 0.0)
            })
        };
        let mut pr = SdpProblem::new();
        let b = pr.add_block(2 * n, BlockKind::Real);
        pr.objective.push(Coeff::from_dense(b, &emb(&c)));
        for (a, r) in cons.iter().zip(&rhs) {
            pr.add_equality(vec![Coeff::from_dense(b, &emb(a))], *r);
        }
        pr.add_inequality(vec![Coeff::scaled_identity(b, 2 * n, 0.5)], cap);

        let (sc, sr) = (solve(&pc).unwrap(), solve(&pr).unwrap());
        prop_assert_eq!(sc.status, SdpStatus::Optimal);
        prop_assert_eq!(sr.status, SdpStatus::Optimal);
        prop_assert!((sc.primal_value - sr.primal_value).abs() < 1e-6, "{} vs {}", sc.primal_value, sr.primal_value);
    }

    #[test]
    fn weak_duality_and_feasibility(
        n in 2usize..5,
        m in 1usize..5,
        vals in prop::collection::vec(-1.0f64..1.0, 64),
        x0 in prop::collection::vec(-1.0f64..1.0, 32),
    ) {
        // A strictly feasible point X0 = G G† + I fixes the right-hand sides.
        let g = hermitian(n, &x0);
        let x = &(&g * &g.adjoint()) + &ComplexMatrix::identity(n);
        let mut p = SdpProblem::new();
        let b = p.add_block(n, BlockKind::Complex);
        p.objective.push(Coeff::from_dense(b, &hermitian(n, &vals)));
        for k in 0..m {
            let a = hermitian(n, &vals[(7 * k + 3)..]);
            let coeff = Coeff::from_dense(b, &a);
            let rhs = p.eval(std::slice::from_ref(&coeff), std::slice::from_ref(&x));
            p.add_equality(vec![coeff], rhs);
        }
        // Bounded by a trace cap.
        let tr = x.trace().re;
        p.add_inequality(vec![Coeff::scaled_identity(b, n, 1.0)], tr + 1.0);
        let s = solve(&p).unwrap();
        prop_assert_eq!(s.status, SdpStatus::Optimal);
        prop_assert!(s.primal_value <= s.dual_value + 1e-6);
        let v = verify(&p, &s.blocks).unwrap();
        prop_assert!(v.is_feasible(1e-6), "{:?}", v);
        prop_assert!((v.objective - s.primal_value).abs() < 1e-6);
        let at_x0 = p.eval(&p.objective, std::slice::from_ref(&x));
        prop_assert!(s.primal_value >= at_x0 - 1e-6);
    }
}

#[test]
fn one_by_one() {
    // max X s.t. X <= 1.
    let mut p = SdpProblem::new();
    let b = p.add_block(1, BlockKind::Real);
    p.objective.push(Coeff::real(b, 0, 0, 1.0));
    p.add_inequality(vec![Coeff::real(b, 0, 0, 1.0)], 1.0);
    let s = solve(&p).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.primal_value - 1.0).abs() < 1e-7, "{}", s.primal_value);
}

#[test]
fn helstrom_value() {
    // |0⟩ versus |+⟩ with equal priors: (1 + 1/√2)/2.
    let r0 = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(if i + j == 0 { 0.5 } else { 0.0 }, 0.0));
    let r1 = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.25, 0.0));
    let mut p = SdpProblem::new();
    let m0 = p.add_block(2, BlockKind::Complex);
    let m1 = p.add_block(2, BlockKind::Complex);
    p.objective = vec![Coeff::from_dense(m0, &r0), Coeff::from_dense(m1, &r1)];
    for (i, j) in [(0, 0), (1, 1), (0, 1)] {
        p.add_equality(vec![Coeff::real(m0, i, j, 1.0), Coeff::real(m1, i, j, 1.0)], if i == j { 1.0 } else { 0.0 });
    }
    let im = C64::new(0.0, 1.0);
    p.add_equality(vec![Coeff::entry(m0, 0, 1, im), Coeff::entry(m1, 0, 1, im)], 0.0);
    let s = solve(&p).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.primal_value - 0.853_553_39).abs() < 1e-7, "{}", s.primal_value);
}
