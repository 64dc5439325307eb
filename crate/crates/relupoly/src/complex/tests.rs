use num_traits::Zero;
use proptest::prelude::*;

use super::*;
use crate::exact::rational::{frac, int};

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// `relu(x), relu(y)` followed by `relu(a1 + a2 - 1)`.
fn corner_net() -> Parameter {
    Parameter::from_rows(
        &[2, 2, 1, 1],
        vec![(vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])), (vec![q(&[1, 1])], q(&[-1])), (vec![q(&[1])], q(&[0]))],
    )
    .unwrap()
}

#[test]
fn corner_net_face_counts() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    assert_eq!(cx.regions.len(), 7);
    assert_eq!(cx.facets.len(), 9);
    assert_eq!(cx.ridges.len(), 3);
    let mut pts: Vec<Point> = cx.ridges.iter().map(|r| r.point.clone()).collect();
    pts.sort();
    assert_eq!(pts, vec![q(&[0, 0]), q(&[0, 1]), q(&[1, 0])]);
    for r in &cx.ridges {
        assert_eq!(r.facets.len(), 4, "ridge at {:?}", r.point);
        assert_eq!(r.regions.len(), 4);
    }
    let origin = cx.ridges.iter().find(|r| r.point == q(&[0, 0])).unwrap();
    assert_eq!(origin.incident, vec![NeuronId { layer: 1, index: 0 }, NeuronId { layer: 1, index: 1 }]);
    assert!(cx.facets.iter().all(|f| f.incident.len() == 1));
    assert_eq!(cx.facets.iter().filter(|f| f.incident[0].layer == 1).count(), 6);
    assert_eq!(cx.facets.iter().filter(|f| f.box_clipped).count(), 6);
}

#[test]
fn facet_normal_points_into_first_region() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    for f in &cx.facets {
        let [p, _] = f.regions;
        let x = cx.regions[p].interior_point();
        assert!(f.hyperplane.eval(&x) > Rational::zero());
    }
}

#[test]
fn constant_neuron_is_never_incident() {
    // The second layer-2 neuron is constant zero on every region.
    let t = Parameter::from_rows(
        &[2, 2, 2, 1],
        vec![
            (vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])),
            (vec![q(&[1, 1]), q(&[0, 0])], q(&[-1, 0])),
            (vec![q(&[1, 1])], q(&[0])),
        ],
    )
    .unwrap();
    let cx = canonical_complex(&t, &int(4)).unwrap();
    assert_eq!(cx.regions.len(), 7);
    assert!(cx.regions.iter().all(|r| r.pattern[1][1] == Sign::Zero));
    assert!(cx.facets.iter().all(|f| !f.incident.contains(&NeuronId { layer: 2, index: 1 })));
}

#[test]
fn orthants_in_three_dimensions() {
    let t = Parameter::from_rows(
        &[3, 3, 1],
        vec![(vec![q(&[1, 0, 0]), q(&[0, 1, 0]), q(&[0, 0, 1])], q(&[0, 0, 0])), (vec![q(&[1, 1, 1])], q(&[0]))],
    )
    .unwrap();
    let cx = canonical_complex(&t, &int(2)).unwrap();
    assert_eq!(cx.regions.len(), 8);
    assert_eq!(cx.facets.len(), 12);
    assert_eq!(cx.ridges.len(), 6);
    assert!(cx.ridges.iter().all(|r| r.facets.len() == 4 && r.incident.len() == 2));
}

#[test]
fn one_dimensional_input() {
    let t = Parameter::from_rows(&[1, 2, 1], vec![(vec![q(&[1]), q(&[-1])], q(&[0, 1])), (vec![q(&[1, 1])], q(&[0]))])
        .unwrap();
    let cx = canonical_complex(&t, &int(3)).unwrap();
    assert_eq!(cx.regions.len(), 3);
    assert_eq!(cx.facets.len(), 2);
    assert!(cx.ridges.is_empty());
}

#[test]
fn partial_complex_stops_at_requested_depth() {
    let t = corner_net();
    let cx = Complex::build_partial(&t, &working_box(2, &int(4)), 1).unwrap();
    assert_eq!(cx.regions.len(), 4);
    assert_eq!(cx.facets.len(), 4);
    assert_eq!(cx.ridges.len(), 1);
    assert!(cx.regions.iter().all(|r| r.output.is_none()));
}

#[test]
fn json_dump_lists_every_face() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    let j = serde_json::to_value(cx.to_json()).unwrap();
    assert_eq!(j["regions"].as_array().unwrap().len(), 7);
    assert_eq!(j["facets"].as_array().unwrap().len(), 9);
    assert_eq!(j["ridges"].as_array().unwrap().len(), 3);
}

fn small_net() -> impl Strategy<Value = Parameter> {
    let entry = -3i64..=3;
    (
        proptest::collection::vec(entry.clone(), 6),
        proptest::collection::vec(entry.clone(), 6),
        proptest::collection::vec(entry, 3),
    )
        .prop_map(|(a, b, c)| {
            Parameter::from_rows(
                &[2, 2, 2, 1],
                vec![
                    (vec![q(&a[0..2]), q(&a[2..4])], q(&a[4..6])),
                    (vec![q(&b[0..2]), q(&b[2..4])], q(&b[4..6])),
                    (vec![q(&c[0..2])], q(&c[2..3])),
                ],
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn region_maps_agree_with_evaluation(t in small_net(), xs in proptest::collection::vec((-400i64..400, -400i64..400), 6)) {
        let cx = canonical_complex(&t, &int(4)).unwrap();
        for (a, b) in xs {
            let x = vec![frac(a, 100), frac(b, 100)];
            let hits: Vec<&Region> = cx.regions.iter().filter(|r| r.cell.poly.contains(&x)).collect();
            prop_assert!(!hits.is_empty());
            for r in hits {
                prop_assert_eq!(r.output.as_ref().unwrap().apply(&x), t.eval(&x));
            }
        }
    }

    #[test]
    fn interior_points_carry_the_region_pattern(t in small_net()) {
        let cx = canonical_complex(&t, &int(4)).unwrap();
        for r in &cx.regions {
            let x = r.interior_point();
            prop_assert_eq!(&pattern_at(&t, &x, cx.depth), &r.pattern);
            prop_assert_eq!(cx.locate(&x), Some(r.id));
        }
    }
}
