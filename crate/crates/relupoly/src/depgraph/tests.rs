use super::*;
use crate::complex::canonical_complex;
use crate::exact::rational::int;
use crate::exact::Rational;
use crate::fixtures::{corner_net, depth_hierarchy_realizations};
use crate::net::Parameter;

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
    DependencyGraph {
        candidates: (0..n).map(|i| vec![i]).collect(),
        edges: edges.iter().map(|&(from, to)| Edge { from, to, ridges: vec![0] }).collect(),
        ridge_classes: Vec::new(),
    }
}

#[test]
fn corner_net_bends_twice() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    let g = DependencyGraph::build(&cx).unwrap();
    let truth = g.ground_truth(&cx);
    assert_eq!(g.num_vertices(), 3);
    let layer = |i: usize| truth[i].iter().map(|n| n.layer).collect::<BTreeSet<_>>();
    let red = (0..3).find(|&i| layer(i) == BTreeSet::from([2])).expect("a layer-2 candidate");
    assert_eq!(g.candidates[red].len(), 3);
    assert_eq!(g.edges.len(), 2);
    for e in &g.edges {
        assert_eq!(e.to, red);
        assert_eq!(layer(e.from), BTreeSet::from([1]));
    }
    let bending: Vec<&RidgeClass> = g.ridge_classes.iter().filter(|c| c.is_bending()).collect();
    assert_eq!(bending.len(), 2);
    assert!(bending.iter().all(|c| c.star.len() == 3));
}

#[test]
fn one_hidden_layer_has_no_edges() {
    let t = Parameter::from_rows(
        &[2, 3, 1],
        vec![(vec![q(&[1, 0]), q(&[0, 1]), q(&[1, 1])], q(&[0, 0, -1])), (vec![q(&[1, 2, -1])], q(&[0]))],
    )
    .unwrap();
    let cx = canonical_complex(&t, &int(4)).unwrap();
    let g = DependencyGraph::build(&cx).unwrap();
    assert_eq!(g.num_vertices(), 3);
    assert!(g.edges.is_empty());
    assert!(g.ridge_classes.iter().all(|c| c.kind == RidgeKind::NonBending));
}

#[test]
fn depth_hierarchy_vertex_depends_on_the_realization() {
    let [r1, r2, r3] = depth_hierarchy_realizations();
    // Three bent hyperplanes meet at (1, 0) in the first two realizations.
    for t in [r1, r2] {
        let cx = canonical_complex(&t, &int(8)).unwrap();
        let g = DependencyGraph::build(&cx).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert!(g.edges.is_empty());
        let vertex = g.ridge_classes.iter().find(|c| cx.ridges[c.ridge].point == q(&[1, 0])).unwrap();
        assert!(matches!(vertex.kind, RidgeKind::Ambiguous { .. }));
    }
    // The third is transversal there: the ray between the two non-constant pieces comes first.
    let cx = canonical_complex(&r3, &int(8)).unwrap();
    let g = DependencyGraph::build(&cx).unwrap();
    assert_eq!(g.num_vertices(), 2);
    assert_eq!(g.edges.len(), 1);
    let first = &g.candidates[g.edges[0].from];
    assert_eq!(first.len(), 1);
    assert_eq!(cx.facets[first[0]].hyperplane.normal, q(&[1, -2]));
    assert_eq!(g.candidates[g.edges[0].to].len(), 2);
}

#[test]
fn candidates_do_not_depend_on_ridge_order() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    let bp = breakpoint_complex(&cx).unwrap();
    let mut classes: Vec<RidgeClass> = bp.ridges.iter().map(|&r| classify_ridge(&cx, &bp, r)).collect();
    let a = candidate_bent_hyperplanes(&cx, &bp, &classes);
    classes.reverse();
    assert_eq!(candidate_bent_hyperplanes(&cx, &bp, &classes), a);
}

#[test]
fn layered_subgraph_search() {
    let chain = graph(3, &[(0, 1), (1, 2)]);
    assert!(layered_subgraph_check(&chain, &Architecture::new(vec![2, 1, 1, 1, 1]).unwrap()));
    assert!(!layered_subgraph_check(&graph(3, &[]), &Architecture::new(vec![2, 1, 1, 1]).unwrap()));
    let bip = graph(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
    let arch = Architecture::new(vec![2, 2, 2, 1]).unwrap();
    assert_eq!(layered_subgraph(&bip, &arch), Some(vec![vec![0, 1], vec![2, 3]]));
    let missing = graph(4, &[(0, 2), (0, 3), (1, 2)]);
    assert!(!layered_subgraph_check(&missing, &arch));
}

#[test]
fn depth_certificate_counts_chain_vertices() {
    let chain = graph(3, &[(0, 1), (1, 2)]);
    assert_eq!(depth_certificate(&chain, 2), DepthCertificate::Reject { chain: vec![0, 1, 2] });
    assert_eq!(depth_certificate(&chain, 3), DepthCertificate::Accept);
}

#[test]
fn dot_output_names_vertices_and_edges() {
    let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
    let g = DependencyGraph::build(&cx).unwrap();
    let truth = g.ground_truth(&cx);
    let dot = g.to_dot(Some(&truth));
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 2);
    assert!(dot.contains("n2.1"));
}
