use commbounds::classical::{
    all_decoders, behavior_coords, encoder_sets, enum_vertices_dim, facet_enumerate_dim, greedy_decoder, vertex_behavior,
};
use commbounds::model::{evaluate_exact, Functional, Scenario};
use commbounds::polytope::q;
use num_rational::Rational64;
use proptest::prelude::*;

fn functional(nx: usize, ny: usize, nz: usize, raw: &[i64]) -> Functional {
    let mut f = Functional::zeros(nx, ny, nz);
    for (k, c) in raw.iter().enumerate().take(nx * ny * nz) {
        f.set(k / (ny * nz), (k / nz) % ny, k % nz, Rational64::new(*c, 2));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_decoder_is_optimal(nx in 2usize..4, raw in prop::collection::vec(-6i64..=6, 12)) {
        let s = Scenario::dimension(nx, 2, 2, 2).unwrap();
        let f = functional(nx, 2, 2, &raw);
        let (ea, eb) = encoder_sets(&s).unwrap();
        let decoders = all_decoders(2, 2, 2);
        for a in &ea {
            for b in &eb {
                let (_, g) = greedy_decoder(&f, a, b);
                let brute = decoders.iter().map(|d| evaluate_exact(&f, &vertex_behavior(a, b, d, 2)).unwrap()).max().unwrap();
                prop_assert_eq!(g, brute);
            }
        }
    }
}

#[test]
fn every_vertex_satisfies_every_facet() {
    let s = Scenario::dimension(3, 2, 2, 2).unwrap();
    let h = facet_enumerate_dim(&s).unwrap();
    let v = enum_vertices_dim(&s).unwrap();
    for vert in &v.raw {
        let x = behavior_coords(&vert.behavior);
        for f in &h.inequalities {
            assert!(f.slack(&x) >= q(0));
        }
        for e in &h.equalities {
            assert_eq!(e.slack(&x), q(0));
        }
    }
}
