use super::*;
use crate::checks::all_verdicts;
use crate::exact::rational::{frac, int};
use crate::exact::{AffineForm, Matrix, Polyhedron, Rational};
use crate::net::{AffineMap, Architecture, Layer};
use crate::random::rng;

fn form(a: &[Rational], b: Rational) -> AffineForm {
    AffineForm::new(a.to_vec(), b)
}

#[test]
fn slab_around_a_vertical_line() {
    let p = Polyhedron::cube(2, &int(1));
    let id = AffineMap::identity(2);
    let site = SlabSite::first(&p, &id);
    let target = form(&[int(1), int(0)], frac(-1, 2));
    let s = make_slab_layer(&site, &target, 2, &frac(1, 10), &mut rng(1)).unwrap();
    assert!(s.closeness < 0.1);
    // Neuron 1 is positive right of its line, neuron 2 left of it.
    let right = [frac(9, 10), int(0)];
    let left = [frac(1, 10), int(0)];
    let at = |x: &[Rational]| AffineMap::identity(2).then(&s.layer).apply(x);
    assert!(at(&right)[0] > int(0) && at(&right)[1] < int(0));
    assert!(at(&left)[0] < int(0) && at(&left)[1] > int(0));
    for g in &s.pulled_back {
        assert!(inside(g, &p));
    }
}

#[test]
fn pivot_of_a_nearly_vertical_slab() {
    let layer = Layer {
        w: Matrix::from_rows(2, vec![vec![int(1), frac(1, 100)], vec![int(-1), frac(1, 100)]]),
        b: vec![frac(-45, 100), frac(55, 100)],
    };
    let pts = vec![vec![frac(45, 100), int(0)], vec![frac(55, 100), int(0)]];
    let (h, images) = pivot_through(&AffineMap::identity(2), &layer, &pts).unwrap();
    assert_eq!(images, vec![vec![int(0), frac(1, 10)], vec![frac(1, 10), int(0)]]);
    // The pivot is y1 + y2 = 1/10 up to scale.
    let s = &h.a[0];
    assert_eq!(h.a[1], *s);
    assert_eq!(h.b, -s * frac(1, 10));
}

#[test]
fn coincident_images_have_no_pivot() {
    let layer = Layer { w: Matrix::from_rows(1, vec![vec![int(1)], vec![int(2)]]), b: vec![int(0), int(0)] };
    let pts = vec![vec![int(1)], vec![int(1)]];
    assert!(pivot_through(&AffineMap::identity(1), &layer, &pts).is_err());
}

#[test]
fn slab_rejects_nonpositive_eps_and_single_neuron() {
    let p = Polyhedron::cube(2, &int(1));
    let id = AffineMap::identity(2);
    let site = SlabSite::first(&p, &id);
    let target = form(&[int(1), int(1)], int(0));
    assert!(make_slab_layer(&site, &target, 2, &int(0), &mut rng(0)).is_err());
    assert!(make_slab_layer(&site, &target, 1, &frac(1, 4), &mut rng(0)).is_err());
}

#[test]
fn narrow_hidden_layer_is_rejected() {
    let arch = Architecture::new(vec![2, 1, 2, 1]).unwrap();
    assert!(build_identifiable(&arch, &BuildOptions::default()).is_err());
}

#[test]
fn built_parameter_passes_every_check() {
    for widths in [vec![2, 2, 2, 1], vec![2, 3, 2, 1], vec![2, 2, 2, 2, 1]] {
        let arch = Architecture::new(widths.clone()).unwrap();
        let opts = BuildOptions { seed: 7, ..BuildOptions::default() };
        let (theta, trail) = build_identifiable(&arch, &opts).unwrap();
        assert_eq!(trail.stages.len(), arch.depth());
        for v in all_verdicts(&theta, &trail.input, 7).unwrap() {
            assert!(v.passed(), "{widths:?}: {v:?}");
        }
        let json = serde_json::to_value(trail.to_json(&theta).unwrap()).unwrap();
        assert_eq!(json["stages"].as_array().unwrap().len(), arch.depth());
    }
}

#[test]
fn pivot_pullback_is_connected_inside_the_all_active_region() {
    let arch = Architecture::new(vec![2, 3, 2, 1]).unwrap();
    let (theta, trail) = build_identifiable(&arch, &BuildOptions::default()).unwrap();
    let s = &trail.stages[0];
    let site = SlabSite::first(&trail.input, &s.map);
    let pivot = pivot_hyperplane(&site, &s.slab).unwrap();
    let region_site =
        SlabSite { prefix: &[], input: &trail.input, polytope: &pivot.region, map: &s.map, previous: None };
    assert_eq!(pullback_pieces(&region_site, &theta.layers[0], &pivot.hyperplane).unwrap(), 1);
}

#[test]
fn one_hidden_layer_build_has_vacuous_ctpic() {
    let arch = Architecture::new(vec![2, 3, 1]).unwrap();
    let (theta, trail) = build_identifiable(&arch, &BuildOptions::default()).unwrap();
    assert_eq!(trail.stages.len(), 1);
    let v = all_verdicts(&theta, &trail.input, 0).unwrap();
    assert!(v.iter().all(|v| v.passed()), "{v:?}");
}

#[test]
fn trail_polytopes_survive_json() {
    let arch = Architecture::new(vec![2, 2, 2, 1]).unwrap();
    let (theta, trail) = build_identifiable(&arch, &BuildOptions::default()).unwrap();
    let text = serde_json::to_string(&trail.to_json(&theta).unwrap()).unwrap();
    assert_eq!(trail_polytopes(&text).unwrap(), trail.polytopes());
}

fn sample_points(n: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut g = rng(seed);
    (0..n).map(|_| crate::random::point_in_box(&mut g, &[int(-1), int(-1)], &[int(1), int(1)])).collect()
}

fn q2(a: i64, b: i64, c: i64, d: i64) -> Matrix {
    Matrix::from_rows(2, vec![vec![int(a), int(b)], vec![int(c), int(d)]])
}

#[test]
fn linear_block_walk_keeps_the_function() {
    let arch = Architecture::new(vec![2, 2, 4, 2]).unwrap();
    let (theta, block) = build_minimal_nonidentifiable(&arch, &BuildOptions::default()).unwrap();
    assert_eq!(block.v_lin(&theta).rank(), 2);
    assert!(block.w_lin(&theta).rows_vec().iter().flatten().all(|x| *x > int(0)));
    assert_eq!(gl2_fiber_walk(&theta, &block, &Matrix::identity(2)).unwrap(), theta);
    let pts = sample_points(200, 2);
    // A diagonal M only rescales the two neurons; the shear leaves the symmetry orbit.
    for (m, trivial) in [(q2(2, 0, 0, 1), true), (q2(1, 1, 0, 1), false)] {
        let eta = gl2_fiber_walk(&theta, &block, &m).unwrap();
        assert_ne!(eta, theta);
        assert_eq!(crate::net::equivalent_mod_symmetries(&theta, &eta), trivial);
        for x in &pts {
            assert_eq!(theta.eval(x), eta.eval(x));
        }
    }
    assert!(gl2_fiber_walk(&theta, &block, &q2(1, -5, 0, 1)).is_err());
    assert!(gl2_fiber_walk(&theta, &block, &q2(1, 1, 1, 1)).is_err());
}

#[test]
fn linear_block_needs_four_neurons() {
    let arch = Architecture::new(vec![2, 2, 3, 2]).unwrap();
    assert!(build_minimal_nonidentifiable(&arch, &BuildOptions::default()).is_err());
}

fn net(rows: Vec<(Vec<i64>, i64)>, out: Vec<i64>) -> crate::net::Parameter {
    let w = rows.iter().map(|(r, _)| r.iter().map(|&x| int(x)).collect()).collect();
    let b = rows.iter().map(|&(_, b)| int(b)).collect();
    crate::net::Parameter::from_rows(
        &[2, rows.len(), 1],
        vec![(w, b), (vec![out.iter().map(|&x| int(x)).collect()], vec![int(0)])],
    )
    .unwrap()
}

#[test]
fn opposite_neurons_on_one_line_compress_to_one() {
    let p = Polyhedron::cube(2, &int(1));
    // 2[x]_+ + [−x]_+ = 3[x]_+ − x on the square.
    let theta = net(vec![(vec![1, 0], 0), (vec![-1, 0], 0)], vec![2, 1]);
    let eta = compress_one_layer(&theta, &p).unwrap();
    for x in sample_points(300, 4) {
        assert_eq!(theta.eval(&x), eta.eval(&x));
    }
    let second = AffineForm::new(eta.w(1).row(1).to_vec(), eta.b(1)[1].clone());
    assert!(!inside(&second, &p));
}

#[test]
fn compressed_input_is_unchanged_up_to_symmetry() {
    let p = Polyhedron::cube(2, &int(1));
    let theta = net(vec![(vec![1, 0], 0), (vec![0, 1], 0)], vec![2, -1]);
    let eta = compress_one_layer(&theta, &p).unwrap();
    assert!(crate::net::equivalent_mod_symmetries(&theta, &eta));
}

#[test]
fn signature_of_sign_flips() {
    let p = Polyhedron::cube(2, &int(1));
    let theta = net(vec![(vec![1, 0], 0), (vec![0, 1], 0), (vec![1, 1], -1)], vec![2, -1, 3]);
    assert_eq!(affine_difference_signature(&theta, &theta, &p).unwrap(), vec![0, 0, 0]);
    let flipped = net(vec![(vec![1, 0], 0), (vec![0, -1], 0), (vec![1, 1], -1)], vec![2, -1, 3]);
    assert_eq!(affine_difference_signature(&theta, &flipped, &p).unwrap(), vec![0, 1, 0]);
    let reweighted = net(vec![(vec![1, 0], 0), (vec![0, 1], 0), (vec![1, 1], -1)], vec![5, -1, 3]);
    assert!(affine_difference_signature(&theta, &reweighted, &p).is_err());
}
