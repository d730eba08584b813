use commbounds::classical::{
    behavior_coords, classical_bound, enum_encoder_vertices_dist, enum_encoder_vertices_symbolic, enum_vertices_dim, facet_check,
    facet_enumerate_dim, reduced_halfspace, vertex_hull,
};
use commbounds::corpus;
use commbounds::model::{evaluate_exact, Scenario};
use commbounds::polytope::{dot, lp_max_over_points, Q};
use num_rational::Rational64;
use num_traits::Signed;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn encoder_vertex_counts() {
    let fixed = enum_encoder_vertices_dist(3, r(2, 3)).unwrap();
    assert_eq!(fixed.len(), 64);
    let symbolic = enum_encoder_vertices_symbolic(3).unwrap();
    assert_eq!(symbolic.len(), 128);
    assert_eq!((symbolic.len() as u64).pow(2) * (1 << 16), 1_073_741_824);
    // Slicing the symbolic polytope at D recovers the fixed-D vertices that are vertices there too.
    let at: Vec<_> = symbolic.iter().filter(|(_, d)| *d == r(2, 3)).map(|(e, _)| e.clone()).collect();
    assert!(at.iter().all(|e| fixed.contains(e)));
    for (e, d) in &symbolic {
        assert!(e.is_row_stochastic());
        assert!(e.distinguishability() <= *d);
    }
}

#[test]
fn i6_classical_at_two_thirds() {
    let i6 = corpus::named("I6").unwrap();
    let s = Scenario::distinguishability(3, 3, 2, r(2, 3), r(2, 3)).unwrap();
    let b = classical_bound(&s, &i6.functional).unwrap();
    assert_eq!(b.value, r(5, 1));
    assert_eq!(evaluate_exact(&i6.functional, &b.witness.behavior).unwrap(), r(5, 1));
}

#[test]
fn i6_bound_monotone_in_d() {
    let i6 = corpus::named("I6").unwrap();
    let grid = [r(1, 3), r(1, 2), r(2, 3), r(5, 6), r(1, 1)];
    let mut table = vec![vec![Rational64::default(); 5]; 5];
    for (i, d1) in grid.iter().enumerate() {
        for (j, d2) in grid.iter().enumerate() {
            let s = Scenario::distinguishability(3, 3, 2, *d1, *d2).unwrap();
            table[i][j] = classical_bound(&s, &i6.functional).unwrap().value;
        }
    }
    for i in 0..5 {
        for j in 0..5 {
            if i + 1 < 5 {
                assert!(table[i][j] <= table[i + 1][j]);
            }
            if j + 1 < 5 {
                assert!(table[i][j] <= table[i][j + 1]);
            }
        }
    }
}

#[test]
fn dimension_tables_are_facets() {
    for tag in ["322", "422", "323", "432"] {
        for ineq in corpus::table(tag) {
            let c = facet_check(&ineq.scenario, &ineq.functional, None, None).unwrap();
            assert!(c.valid && c.is_facet(), "{} {c:?}", ineq.id);
        }
    }
}

#[test]
fn distinguishability_table_valid_and_tight() {
    for ineq in corpus::table("332d") {
        let c = facet_check(&ineq.scenario, &ineq.functional, None, None).unwrap();
        assert!(c.valid, "{} {c:?}", ineq.id);
        assert!(c.is_tight(), "{} {c:?}", ineq.id);
    }
}

#[test]
fn enumerated_facets_contain_tables() {
    for tag in ["322", "422", "323"] {
        let rows = corpus::table(tag);
        let s = &rows[0].scenario;
        let h = facet_enumerate_dim(s).unwrap();
        let hull = vertex_hull(s).unwrap();
        let facets: Vec<_> = h.inequalities.iter().map(|f| hull.normal_form(f)).collect();
        for ineq in rows {
            let row = hull.normal_form(&reduced_halfspace(&ineq.functional, ineq.functional.rhs.constant));
            assert!(facets.contains(&row), "{} missing from {} facets", ineq.id, facets.len());
        }
        let verts = enum_vertices_dim(s).unwrap();
        for v in &verts.distinct {
            let x = behavior_coords(v);
            for f in &h.inequalities {
                assert!(!f.slack(&x).is_negative());
            }
        }
    }
}

#[test]
fn bound_agrees_with_lp_over_hull() {
    for name in ["I1", "I2", "I3"] {
        let ineq = corpus::named(name).unwrap();
        let verts = enum_vertices_dim(&ineq.scenario).unwrap();
        let pts: Vec<Vec<Q>> = verts.distinct.iter().map(behavior_coords).collect();
        let h = reduced_halfspace(&ineq.functional, ineq.functional.rhs.constant);
        let lp = lp_max_over_points(&h.a, &pts).unwrap();
        let offset = &h.b - commbounds::classical::to_q(&ineq.functional.rhs.constant);
        let lp_value = &lp.value - offset;
        let exact = classical_bound(&ineq.scenario, &ineq.functional).unwrap().value;
        assert_eq!(lp_value, commbounds::classical::to_q(&exact), "{name}");
        assert_eq!(dot(&h.a, &lp.argmax), lp.value);
    }
}
