use commbounds::classical::classical_bound;
use commbounds::corpus;
use commbounds::hierarchy::{hierarchy_upper_bound, HierarchyOptions};
use commbounds::model::{behavior_from_strategy, evaluate_functional, rat_to_f64, Functional, Scenario};
use commbounds::seesaw::{guessing_probability, run_seesaw, SeesawConfig};
use num_rational::Rational64;
use proptest::prelude::*;

fn quick(seed: u64, d: usize) -> SeesawConfig {
    SeesawConfig { d, restarts: 3, max_rounds: 60, seed, ..SeesawConfig::default() }
}

fn functional(nx: usize, ny: usize, coeffs: &[i64]) -> Functional {
    let mut f = Functional::zeros(nx, ny, 2);
    for x in 0..nx {
        for y in 0..ny {
            f.set(x, y, 1, Rational64::from_integer(coeffs[(x * ny + y) % coeffs.len()]));
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn traces_are_monotone_and_values_consistent(
        seed in any::<u64>(),
        d in 2usize..4,
        coeffs in prop::collection::vec(-3i64..=3, 6),
    ) {
        let s = Scenario::dimension(3, 2, 2, d).unwrap();
        let f = functional(3, 2, &coeffs);
        let r = run_seesaw(&s, &f, &quick(seed, d)).unwrap();
        for w in r.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10, "trace decreased: {:?}", r.trace);
        }
        prop_assert!(r.strategy.issues().is_empty(), "{:?}", r.strategy.issues());
        let recomputed = evaluate_functional(&f, &behavior_from_strategy(&r.strategy).unwrap()).unwrap();
        prop_assert!((recomputed - r.value).abs() < 1e-9);
        let classical = rat_to_f64(&classical_bound(&s, &f).unwrap().value);
        prop_assert!(r.value >= classical - 1e-9, "{} below classical {classical}", r.value);
        let h = hierarchy_upper_bound(&s, &f, &HierarchyOptions::default()).unwrap().value;
        prop_assert!(r.value <= h + 1e-6, "{} above hierarchy {h}", r.value);
    }
}

#[test]
fn same_seed_same_result() {
    let ineq = corpus::named("I2").unwrap();
    let a = run_seesaw(&ineq.scenario, &ineq.functional, &quick(5, 2)).unwrap();
    let b = run_seesaw(&ineq.scenario, &ineq.functional, &quick(5, 2)).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.restart_index, b.restart_index);
}

#[test]
fn distinguishability_states_respect_the_bound() {
    let ineq = corpus::named("I6").unwrap();
    let r = run_seesaw(&ineq.scenario, &ineq.functional, &quick(1, 2)).unwrap();
    for states in [&r.strategy.alice_states, &r.strategy.bob_states] {
        let p = guessing_probability(states).unwrap();
        assert!(p <= 2.0 / 3.0 + 1e-6, "guessing probability {p}");
    }
    assert!(r.value >= 5.0 - 1e-9, "{}", r.value);
}
