use super::Verdict;
use crate::complex::Complex;
use crate::exact::format_rational;
use crate::net::{pattern_string, NeuronId, Sign};
use crate::tropical::FacetWeight;

fn at(point: &[crate::exact::Rational]) -> String {
    let p: Vec<String> = point.iter().map(format_rational).collect();
    format!("({})", p.join(", "))
}

fn names(ns: &[NeuronId]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

/// Facets lie on exactly one bent hyperplane and ridges on exactly two.
pub fn supertransversality_check(cx: &Complex) -> Verdict {
    let mut w = Vec::new();
    for f in &cx.facets {
        if f.incident.len() != 1 {
            w.push(format!(
                "facet {} at {} lies on {} bent hyperplanes [{}]",
                f.id,
                at(&f.point),
                f.incident.len(),
                names(&f.incident)
            ));
        }
    }
    for r in &cx.ridges {
        if r.incident.len() != 2 {
            w.push(format!(
                "ridge {} at {} lies on {} bent hyperplanes [{}]",
                r.id,
                at(&r.point),
                r.incident.len(),
                names(&r.incident)
            ));
        }
    }
    Verdict::from_witnesses("supertransversal", w).with_note("faces of codimension at most two")
}

/// A layer whose neurons are all off on the facet. Neurons that vanish identically count as off.
fn dead_layer(cx: &Complex, facet: usize) -> Option<usize> {
    let f = &cx.facets[facet];
    f.pattern
        .iter()
        .enumerate()
        .find(|(li, signs)| {
            signs.iter().enumerate().all(|(j, s)| match s {
                Sign::Neg => true,
                Sign::Zero => !f.incident.contains(&NeuronId { layer: li + 1, index: j }),
                Sign::Pos => false,
            })
        })
        .map(|(li, _)| li + 1)
}

/// Zero weight exactly on facets with a dead layer.
pub fn cancellation_free_check(cx: &Complex, weights: &[FacetWeight]) -> Verdict {
    let mut w = Vec::new();
    for f in &cx.facets {
        let zero = weights[f.id].is_zero();
        match (zero, dead_layer(cx, f.id)) {
            (true, None) => w.push(format!(
                "facet {} at {} has zero weight with no dead layer [{}]",
                f.id,
                at(&f.point),
                pattern_string(&f.pattern)
            )),
            (false, Some(l)) => {
                w.push(format!("facet {} at {} has nonzero weight but layer {l} is dead", f.id, at(&f.point)))
            }
            _ => {}
        }
    }
    Verdict::from_witnesses("cancellation-free", w)
}
