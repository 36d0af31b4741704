use orbicrystal_web::{cauchy_json, gamma_coefficients_json, zseries_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn single_box_coefficient() {
    // q/(1−q)² at q = 1/4
    let v = parse(&zseries_json(1, 1, "1/2", "first", 3).unwrap());
    assert_eq!(v["coefficients"][0], "1");
    assert_eq!(v["coefficients"][1], "4/9");
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 4);
    let w = parse(&zseries_json(1, 1, "1/2", "second", 3).unwrap());
    assert_eq!(w["coefficients"][1], "4/9");
}

#[test]
fn plain_coefficients_are_complete_symmetric() {
    // h_1(q^{−ρ}) = q^{1/2}/(1−q) = (1/2)/(3/4) at u = 1/2, a = b = 1
    let v = parse(&gamma_coefficients_json(1, 1, "1/2", false, false, 3).unwrap());
    assert_eq!(v["coefficients"][0], "1");
    assert_eq!(v["coefficients"][1], "2/3");
    let inv = parse(&gamma_coefficients_json(1, 1, "1/2", false, true, 3).unwrap());
    assert_eq!(inv["coefficients"][1], "-2/3");
}

#[test]
fn product_form_passes() {
    let v = parse(&cauchy_json(2, 1, "1/3", "first", 4).unwrap());
    assert_eq!(v["status"], "pass");
    assert_eq!(v["max_residual"], "0");
}

#[test]
fn bad_input_is_reported() {
    assert!(zseries_json(1, 1, "x", "first", 3).is_err());
    assert!(zseries_json(1, 1, "1/2", "third", 3).is_err());
    assert!(zseries_json(0, 1, "1/2", "first", 3).is_err());
    assert!(zseries_json(1, 1, "1/2", "first", 99).is_err());
}
