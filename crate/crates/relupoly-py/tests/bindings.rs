//! The binding functions called from Rust, without an interpreter.

use relupoly::fixtures::corner_net;

#[test]
fn evaluate_returns_exact_strings() {
    let net = corner_net().to_json_string();
    let out = relupoly_py::evaluate(&net, vec![vec!["1/2".into(), "3/4".into()]]).unwrap();
    assert_eq!(out, vec![vec!["1/4".to_string()]]);
    assert!(relupoly_py::evaluate(&net, vec![vec!["1".into()]]).is_err());
}

#[test]
fn constructed_parameter_checks_out() {
    let (net, trail) = relupoly_py::construct_identifiable(vec![2, 2, 2, 1], 0, None, None).unwrap();
    let trail: serde_json::Value = serde_json::from_str(&trail).unwrap();
    assert_eq!(trail["stages"].as_array().unwrap().len(), 2);
    let verdicts: serde_json::Value = serde_json::from_str(&relupoly_py::check(&net, Some("1"), 0).unwrap()).unwrap();
    assert!(verdicts.as_array().unwrap().iter().all(|v| v["status"] == "pass"));
    assert_eq!(relupoly_py::functional_dimension(&net, 100, 0, Some("1")).unwrap(), (11, 11));
}

#[test]
fn bad_inputs_become_errors() {
    assert!(relupoly_py::check("not json", None, 0).is_err());
    assert!(relupoly_py::construct_identifiable(vec![2, 1, 2, 1], 0, None, None).is_err());
    assert!(relupoly_py::render_svg(&corner_net().to_json_string(), Some("x")).is_err());
}
