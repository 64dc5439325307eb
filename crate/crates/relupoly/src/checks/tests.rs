use num_traits::Zero;

use super::*;
use crate::complex::{canonical_complex, working_box};
use crate::exact::rational::{frac, int};
use crate::exact::{Matrix, Polyhedron, Rational};
use crate::fixtures::{corner_net, depth_hierarchy_realizations};
use crate::net::{Architecture, Parameter};
use crate::random::{point_in_box, rng};
use crate::tropical::facet_weights;

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn one_layer(rows: &[[i64; 2]], b: &[i64], out: &[i64]) -> Parameter {
    Parameter::from_rows(
        &[2, rows.len(), 1],
        vec![(rows.iter().map(|r| q(r)).collect(), q(b)), (vec![q(out)], q(&[0]))],
    )
    .unwrap()
}

fn square(r: i64) -> Polyhedron {
    working_box(2, &int(r))
}

#[test]
fn duplicated_neurons_break_the_rank_condition() {
    let theta = one_layer(&[[1, 2], [1, 2]], &[0, 1], &[1, -1]);
    let (w, exhaustive) = rank_condition(&theta, 0);
    assert!(exhaustive);
    assert!(!w.is_empty());
    let v = genericity_check(&theta, &square(4), 0).unwrap();
    assert_eq!(v.status, Status::Fail);
}

#[test]
fn realization_with_shared_vertex_fails_region_condition() {
    let [r1, _, _] = depth_hierarchy_realizations();
    let defects = region_condition(&r1, &square(5)).unwrap();
    assert!(!defects.is_empty());
    assert_eq!(genericity_check(&r1, &square(5), 0).unwrap().status, Status::Fail);
}

#[test]
fn coordinate_axes_pass_the_structural_checks() {
    let theta = one_layer(&[[1, 0], [0, 1]], &[0, 0], &[1, 1]);
    let cx = canonical_complex(&theta, &int(1)).unwrap();
    assert!(supertransversality_check(&cx).passed());
    let w = facet_weights(&cx).unwrap();
    assert!(cancellation_free_check(&cx, &w).passed());
    assert_eq!(genericity_check(&theta, &square(1), 0).unwrap().status, Status::Pass);
}

#[test]
fn three_concurrent_lines_are_not_supertransversal() {
    let theta = one_layer(&[[1, 0], [0, 1], [1, 1]], &[0, 0, 0], &[1, 1, 1]);
    let cx = canonical_complex(&theta, &int(2)).unwrap();
    let v = supertransversality_check(&cx);
    assert_eq!(v.status, Status::Fail);
    assert!(v.witnesses[0].contains("3 bent hyperplanes"), "{:?}", v.witnesses);
}

#[test]
fn exactly_cancelling_neurons_are_flagged() {
    let theta = Parameter::from_rows(
        &[2, 2, 1],
        vec![(vec![q(&[1, 1]), q(&[-2, -2])], q(&[0, 0])), (vec![q(&[2, -1])], q(&[0]))],
    )
    .unwrap();
    let cx = canonical_complex(&theta, &int(2)).unwrap();
    let w = facet_weights(&cx).unwrap();
    let v = cancellation_free_check(&cx, &w);
    assert_eq!(v.status, Status::Fail);
    assert!(v.witnesses.iter().all(|s| s.contains("no dead layer")));
}

#[test]
fn zero_weight_under_a_dead_layer_is_accepted() {
    let theta = Parameter::from_rows(
        &[2, 2, 1, 1],
        vec![(vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])), (vec![q(&[0, 0])], q(&[-1])), (vec![q(&[3])], q(&[1]))],
    )
    .unwrap();
    let cx = canonical_complex(&theta, &int(2)).unwrap();
    let w = facet_weights(&cx).unwrap();
    assert!(w.iter().all(|x| x.is_zero()));
    assert!(cancellation_free_check(&cx, &w).passed());
}

#[test]
fn ctpic_holds_for_the_corner_net() {
    let r = ctpic_check(&corner_net(), &square(4)).unwrap();
    assert!(r.verdict.passed(), "{:?}", r.verdict);
    assert_eq!(r.chosen.len(), 3);
}

#[test]
fn ctpic_is_vacuous_with_one_hidden_layer() {
    let theta = one_layer(&[[1, 0], [0, 1]], &[0, 0], &[1, 1]);
    let r = ctpic_check(&theta, &square(2)).unwrap();
    assert_eq!(r.verdict.status, Status::Pass);
}

#[test]
fn ctpic_reports_a_pair_that_never_meets() {
    // The second layer-2 neuron bends along x = 0 but never reaches y = 0 inside the box.
    let theta = Parameter::from_rows(
        &[2, 2, 2, 1],
        vec![
            (vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])),
            (vec![q(&[1, 1]), q(&[1, 2])], q(&[-1, -5])),
            (vec![q(&[1, 1])], q(&[0])),
        ],
    )
    .unwrap();
    let r = ctpic_check(&theta, &square(4)).unwrap();
    assert_eq!(r.verdict.status, Status::Fail);
    assert!(r.verdict.witnesses.contains(&"n1.2 and n2.2 do not cross".to_string()), "{:?}", r.verdict.witnesses);
}

#[test]
fn identifiability_lists_failed_premises() {
    let [r1, _, _] = depth_hierarchy_realizations();
    let rep = identifiability_verdict(&r1, &[("box".into(), square(5))], 0).unwrap();
    assert!(!rep.identifiable_among_generic);
    assert!(rep.summary.starts_with("premises fail"));
    assert!(rep.summary.contains("non-generic"));
}

#[test]
fn transparency_and_lra_verdicts() {
    let theta = corner_net();
    assert!(!lra_verdict(&theta, &square(4)).unwrap().passed());
    let v = transparency_verdict(&theta, &square(4)).unwrap();
    assert_eq!(v.status, Status::Fail);
}

/// `f_θ(x)` is affine in each single parameter while the activation pattern is fixed, so an
/// exact forward difference is the exact partial derivative.
fn exact_jacobian(theta: &Parameter, x: &[Rational]) -> Matrix {
    let flat = theta.flatten();
    let h = frac(1, 1 << 20);
    let base = theta.eval(x);
    let mut cols = Vec::new();
    for j in 0..flat.len() {
        let mut v = flat.clone();
        v[j] += &h;
        let moved = Parameter::unflatten(&theta.arch, &v).unwrap();
        assert_eq!(moved.activation_pattern(x), theta.activation_pattern(x));
        cols.push(moved.eval(x).iter().zip(&base).map(|(a, b)| (a - b) / &h).collect::<Vec<_>>());
    }
    Matrix::from_rows(base.len(), cols).transpose()
}

fn generic_221() -> Parameter {
    Parameter::from_rows(
        &[2, 2, 1],
        vec![
            (vec![vec![int(1), frac(1, 3)], vec![frac(-1, 2), int(1)]], vec![frac(1, 5), frac(-1, 7)]),
            (vec![vec![int(2), frac(-3, 2)]], vec![frac(1, 2)]),
        ],
    )
    .unwrap()
}

#[test]
fn backprop_jacobian_matches_exact_differences() {
    let theta = generic_221();
    let mut g = rng(3);
    for _ in 0..20 {
        let x = point_in_box(&mut g, &q(&[-3, -3]), &q(&[3, 3]));
        if theta.trace(&x).pre[0].iter().any(|z| z.is_zero()) {
            continue;
        }
        let exact = exact_jacobian(&theta, &x).to_f64();
        let fast = jacobian(&theta, &x);
        for (a, b) in exact.iter().flatten().zip(fast.iter().flatten()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn functional_dimension_of_a_generic_shallow_net() {
    let theta = generic_221();
    let fd = functional_dimension_estimate(&theta, &square(4), 200, 1).unwrap();
    assert_eq!(fd.expected, 7);
    assert_eq!(fd.rank, 7);
    // Exact rank of the stacked Jacobian at random points off the hidden hyperplanes.
    let mut g = rng(5);
    let mut stacked = Matrix::zeros(0, theta.arch.num_params());
    while stacked.nrows() < 40 {
        let x = point_in_box(&mut g, &q(&[-4, -4]), &q(&[4, 4]));
        if theta.trace(&x).pre[0].iter().all(|z| !z.is_zero()) {
            stacked = stacked.vstack(&exact_jacobian(&theta, &x));
        }
    }
    assert_eq!(stacked.rank(), 7);
}

#[test]
fn duplicated_neuron_lowers_the_functional_dimension() {
    let theta =
        Parameter::from_rows(&[2, 2, 1], vec![(vec![q(&[1, 2]), q(&[1, 2])], q(&[1, 1])), (vec![q(&[1, 3])], q(&[0]))])
            .unwrap();
    let fd = functional_dimension_estimate(&theta, &square(4), 200, 1).unwrap();
    assert!(fd.rank < expected_functional_dimension(&theta.arch));
}

#[test]
fn expected_dimension_formula() {
    let a = |w: &[usize]| expected_functional_dimension(&Architecture::new(w.to_vec()).unwrap());
    assert_eq!(a(&[2, 2, 1]), 7);
    assert_eq!(a(&[2, 2, 2, 1]), 11);
    assert_eq!(a(&[2, 3, 2, 1]), 15);
}

#[test]
fn min_width_bounds() {
    let p = square(1);
    let zero = Matrix::zeros(1, 2);
    let theta = one_layer(&[[1, 0]], &[0], &[1]);
    assert_eq!(min_width_lower_bound(&theta, &zero, &p).unwrap(), 1);

    let single =
        Parameter::from_rows(&[2, 1, 2], vec![(vec![q(&[1, 0])], q(&[0])), (vec![q(&[0]), q(&[1])], q(&[0, 0]))])
            .unwrap();
    assert_eq!(min_width_lower_bound(&single, &Matrix::identity(2), &p).unwrap(), 3);

    let nilpotent = Parameter::from_rows(
        &[2, 2, 2],
        vec![
            (vec![q(&[1, 0]), vec![int(1), int(0)]], vec![int(0), frac(-1, 2)]),
            (vec![q(&[0, 0]), q(&[1, 2])], q(&[0, 0])),
        ],
    )
    .unwrap();
    assert_eq!(min_width_lower_bound(&nilpotent, &Matrix::identity(2), &p).unwrap(), 4);

    let outside = one_layer(&[[1, 0]], &[5], &[1]);
    assert!(min_width_lower_bound(&outside, &zero, &p).is_err());
}
