use std::collections::BTreeSet;

use commbounds::polytope::{affine_dim, facets_to_vertices, lp_max, q, vertices_to_facets, AffineHull, VPolytope, Q};
use proptest::prelude::*;

fn points() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (2usize..=8).prop_flat_map(|dim| {
        let pts = prop::collection::vec(prop::collection::vec(0i64..=1, dim), dim + 1..=(dim + 1) * 4);
        (Just(dim), pts)
    })
}

/// Points of `pts` not in the convex hull of the others.
fn extreme(pts: &[Vec<Q>]) -> BTreeSet<Vec<Q>> {
    let uniq: Vec<Vec<Q>> = pts.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    uniq.iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<Vec<Q>> = uniq.iter().enumerate().filter(|(j, _)| j != i).map(|(_, o)| o.clone()).collect();
            !commbounds::polytope::lp::in_convex_hull(p, &others)
        })
        .map(|(_, p)| p.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_recovers_extreme_points((dim, rows) in points(), obj in prop::collection::vec(-5i64..=5, 8)) {
        let v = VPolytope::from_integers(&rows);
        let h = vertices_to_facets(&v).unwrap();
        let back = facets_to_vertices(&h).unwrap();
        let got: BTreeSet<Vec<Q>> = back.vertices.iter().cloned().collect();
        prop_assert_eq!(got, extreme(&v.vertices));

        // LP over the H-form agrees with the best vertex.
        let c: Vec<Q> = obj[..dim].iter().map(|&k| q(k)).collect();
        let best = v.vertices.iter().map(|p| p.iter().zip(&c).map(|(a, b)| a * b).sum::<Q>()).max().unwrap();
        prop_assert_eq!(lp_max(&c, &h).unwrap().value, best);

        // Each facet is tight on an affinely independent set spanning a hyperplane of the hull.
        let hull_dim = affine_dim(&v.vertices).unwrap();
        for f in &h.inequalities {
            let tight: Vec<Vec<Q>> = back.vertices.iter().filter(|p| f.slack(p) == q(0)).cloned().collect();
            prop_assert_eq!(affine_dim(&tight), Some(hull_dim - 1));
        }
        prop_assert_eq!(AffineHull::of_points(&v.vertices).unwrap().dim(), hull_dim);
    }
}
