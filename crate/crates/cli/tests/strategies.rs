use commbounds::corpus;
use commbounds::seesaw::{optimize_measurement_step, optimize_states_step, strategy_value, Sender};
use commbounds_cli::jobs::load_strategy;

#[test]
fn i1_strategy_is_a_seesaw_fixed_point() {
    let f = &corpus::named("I1").unwrap().functional;
    let mut s = load_strategy("i1").unwrap().strategy;
    let start = strategy_value(f, &s).unwrap();
    assert!((start - (1.0 + 2f64.sqrt())).abs() < 1e-9, "{start}");
    for _ in 0..3 {
        s.povm = optimize_measurement_step(f, &s.alice_states, &s.bob_states).unwrap();
        s.alice_states = optimize_states_step(f, &s, Sender::Alice, None).unwrap();
        s.bob_states = optimize_states_step(f, &s, Sender::Bob, None).unwrap();
    }
    let end = strategy_value(f, &s).unwrap();
    assert!((end - start).abs() < 1e-6, "{start} -> {end}");
}

#[test]
fn i2_measurement_step_recovers_optimum() {
    let f = &corpus::named("I2").unwrap().functional;
    let s = load_strategy("i2").unwrap().strategy;
    let mut t = s.clone();
    t.povm = optimize_measurement_step(f, &s.alice_states, &s.bob_states).unwrap();
    let v = strategy_value(f, &t).unwrap();
    assert!((v - 2f64.sqrt() * 2.0).abs() < 1e-6, "{v}");
}

#[test]
fn verify_flags_states_that_are_too_distinguishable() {
    use commbounds_cli::jobs::cmd_verify;
    use commbounds_cli::strategy::parse_strategy;
    // Orthogonal qutrit states are guessed perfectly, above D = 2/3.
    let kets = r#"[[[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]], [[0,0],[0,0],[1,0]]]"#;
    let mut e = ["[0,0]"; 9];
    e[0] = "[1,0]";
    let text = format!(
        r#"{{"inequality": "I6", "alice": {kets}, "bob": {kets}, "povm": ["complement", {{"vectors": [[{}]]}}]}}"#,
        e.join(",")
    );
    let file = parse_strategy(&text).unwrap();
    let out = cmd_verify(file, corpus::named("I6").unwrap()).unwrap();
    assert!(!out.is_valid());
    assert_eq!(out.issues.iter().filter(|i| i.contains("guessed with probability 1.0")).count(), 2, "{:?}", out.issues);
}
