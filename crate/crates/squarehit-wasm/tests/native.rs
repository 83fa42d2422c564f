use serde_json::Value;
use squarehit_wasm::{colour_impl, exact_impl, generate_impl, hit_impl, names_impl, random_impl, render_impl};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn exact_on_named_instance() {
    assert!(names_impl().split(',').any(|n| n == "c5_cycle"));
    let inst = generate_impl("c5_cycle", 2).unwrap();
    let r = parse(&exact_impl(&inst, "chi").unwrap());
    assert_eq!(r["value"], 5);
    assert!(r["svg"].as_str().unwrap().starts_with("<?xml"));
    assert!(exact_impl(&inst, "kappa").is_err());
}

#[test]
fn greedy_and_colour_reports() {
    let inst = random_impl(25, "unit-rotated", 3).unwrap();
    let hit = parse(&hit_impl(&inst, "six-point").unwrap());
    assert!(hit["points"].as_u64().unwrap() <= hit["bound"].as_u64().unwrap());
    let col = parse(&colour_impl(&inst).unwrap());
    assert!(col["colours"].as_u64().unwrap() <= col["bound"].as_u64().unwrap());
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    assert!(render_impl("{").is_err());
    assert!(generate_impl("missing", 1).is_err());
    assert!(random_impl(10, "sideways", 0).is_err());
    let big = random_impl(60, "unit-rotated", 0).unwrap();
    assert!(exact_impl(&big, "tau").is_err());
}
