//! Tropical weights on facets and the breakpoint complex they cut out, plus the LRA and transparency checks.
//!
//! A weight `c = sqrt(scale2) · direction` is carried exactly even when the norm is irrational.
//! From region differences the direction is `w = (A_P − A_Q)·n` with `scale2 = 1/‖n‖²`;
//! from the closed form it is the forward column with `scale2` the squared backward norm.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{region_levels, Complex};
use crate::error::{Error, Result};
use crate::exact::rational::{dot, is_zero_vec, one, positive_multiple};
use crate::exact::{format_rational, Hyperplane, Matrix, Point, Polyhedron, Rational};
use crate::net::{active_sets, Parameter, SignPattern};

/// `sqrt(scale2) · direction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalWeight {
    pub direction: Vec<Rational>,
    pub scale2: Rational,
}

impl TropicalWeight {
    pub fn is_zero(&self) -> bool {
        self.scale2.is_zero() || is_zero_vec(&self.direction)
    }

    /// Exact equality of the represented vectors.
    pub fn same_as(&self, other: &TropicalWeight) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return true,
            (false, false) => {}
            _ => return false,
        }
        match positive_multiple(&self.direction, &other.direction) {
            Some(k) => &k * &k * &self.scale2 == other.scale2,
            None => false,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let s = crate::exact::rational::to_f64(&self.scale2).sqrt();
        self.direction.iter().map(|x| s * crate::exact::rational::to_f64(x)).collect()
    }
}

/// The unnormalized weight of one facet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetWeight {
    /// `(A_P − A_Q)·n`.
    pub w: Vec<Rational>,
    /// Canonical primitive normal of the facet's affine hull, pointing into `P`.
    pub normal: Vec<Rational>,
    pub norm2: Rational,
}

impl FacetWeight {
    pub fn from_pieces(a_p: &Matrix, a_q: &Matrix, normal: &[Rational]) -> FacetWeight {
        let w = a_p.sub(a_q).mul_vec(normal);
        FacetWeight { w, normal: normal.to_vec(), norm2: dot(normal, normal) }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.w)
    }

    pub fn tropical(&self) -> TropicalWeight {
        TropicalWeight { direction: self.w.clone(), scale2: one() / &self.norm2 }
    }
}

fn output_linear(cx: &Complex, region: usize) -> Result<&Matrix> {
    cx.regions[region]
        .output
        .as_ref()
        .map(|m| &m.a)
        .ok_or_else(|| Error::Precondition("weights need the complex of every hidden layer".into()))
}

/// Region-difference weight of facet `f`.
pub fn facet_weight(cx: &Complex, f: usize) -> Result<FacetWeight> {
    let facet = cx.facets.get(f).ok_or_else(|| Error::Precondition(format!("no facet {f}")))?;
    let [p, q] = facet.regions;
    Ok(FacetWeight::from_pieces(output_linear(cx, p)?, output_linear(cx, q)?, &facet.hyperplane.normal))
}

/// Region-difference weights of every facet, in facet order.
pub fn facet_weights(cx: &Complex) -> Result<Vec<FacetWeight>> {
    (0..cx.facets.len()).into_par_iter().map(|f| facet_weight(cx, f)).collect()
}

/// Closed-form weight `‖g‖·v` of a facet on the bent hyperplane of a single neuron `(l, i)`,
/// where `g` is the gradient of `z^(l)_i` and `v` the forward column through the later layers,
/// both taken with the active sets of the facet's sign pattern.
pub fn closed_form_weight(theta: &Parameter, pattern: &SignPattern, layer: usize, index: usize) -> TropicalWeight {
    let sets = active_sets(pattern);
    let g = theta.linear_chain(1, layer, &sets).row(index).to_vec();
    let v = theta.linear_chain(layer + 1, theta.depth() + 1, &sets).col(index);
    TropicalWeight { direction: v, scale2: dot(&g, &g) }
}

/// Closed-form weight of facet `f`; requires a unique incident neuron.
pub fn facet_weight_closed_form(cx: &Complex, f: usize) -> Result<TropicalWeight> {
    let facet = cx.facets.get(f).ok_or_else(|| Error::Precondition(format!("no facet {f}")))?;
    match facet.incident.as_slice() {
        [n] => Ok(closed_form_weight(&cx.theta, &facet.pattern, n.layer, n.index)),
        other => Err(Error::Precondition(format!(
            "facet {f} lies on {} bent hyperplanes; the closed form needs exactly one",
            other.len()
        ))),
    }
}

/// Weight of a one-hidden-layer network on the hyperplane `h`: the sum of `‖W¹_i‖·W²_{:,i}` over
/// neurons whose hyperplane is `h`. All such rows are multiples `k_i·n` of the canonical normal,
/// so the sum equals `‖n‖·Σ|k_i|·W²_{:,i}`.
pub fn one_layer_weight(theta: &Parameter, h: &Hyperplane) -> Result<TropicalWeight> {
    if theta.depth() != 1 {
        return Err(Error::Precondition("one_layer_weight needs a single hidden layer".into()));
    }
    let w1 = theta.w(1);
    let w2 = theta.w(2);
    let m = w2.nrows();
    let mut dir = vec![Rational::zero(); m];
    let mut found = false;
    for i in 0..w1.nrows() {
        let row = w1.row(i);
        let form = crate::exact::AffineForm::new(row.to_vec(), theta.b(1)[i].clone());
        let Some((hi, _)) = form.hyperplane() else { continue };
        if &hi != h {
            continue;
        }
        found = true;
        let k = positive_multiple(row, &h.normal)
            .or_else(|| positive_multiple(&row.iter().map(|x| -x).collect::<Vec<_>>(), &h.normal))
            .expect("rows on the same hyperplane are parallel");
        for (r, d) in dir.iter_mut().enumerate() {
            *d += &k * &w2[(r, i)];
        }
    }
    if !found {
        return Err(Error::Precondition(format!("{h:?} is not a hyperplane of the first layer")));
    }
    Ok(TropicalWeight { direction: dir, scale2: h.norm2() })
}

/// Facets with nonzero weight and the ridges they touch.
#[derive(Clone, Debug)]
pub struct BreakpointComplex {
    pub weights: Vec<FacetWeight>,
    /// Facet ids with nonzero weight.
    pub facets: Vec<usize>,
    /// Ridge ids with at least one such facet in their star.
    pub ridges: Vec<usize>,
}

impl BreakpointComplex {
    pub fn contains(&self, f: usize) -> bool {
        !self.weights[f].is_zero()
    }

    /// Breakpoint facets around ridge `r`.
    pub fn star(&self, cx: &Complex, r: usize) -> Vec<usize> {
        cx.ridges[r].facets.iter().copied().filter(|&f| self.contains(f)).collect()
    }
}

pub fn breakpoint_complex(cx: &Complex) -> Result<BreakpointComplex> {
    let weights = facet_weights(cx)?;
    let facets: Vec<usize> = (0..weights.len()).filter(|&f| !weights[f].is_zero()).collect();
    let ridges = cx.ridges.iter().filter(|r| r.facets.iter().any(|&f| !weights[f].is_zero())).map(|r| r.id).collect();
    Ok(BreakpointComplex { weights, facets, ridges })
}

/// Outcome of the LRA check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LraReport {
    pub holds: bool,
    pub facets_checked: usize,
    /// Relative-interior points of zero-weight facets.
    pub offending: Vec<Vec<String>>,
}

/// Whether every facet of the canonical complex meeting the interior of `x` has nonzero weight.
/// The complex is rebuilt on `x` itself.
pub fn lra_check(theta: &Parameter, x: &Polyhedron) -> Result<LraReport> {
    let cx = Complex::build(theta, x)?;
    lra_on(&cx)
}

/// LRA over every facet of an already built complex.
pub fn lra_on(cx: &Complex) -> Result<LraReport> {
    let weights = facet_weights(cx)?;
    let offending: Vec<Vec<String>> = cx
        .facets
        .iter()
        .zip(&weights)
        .filter(|(_, w)| w.is_zero())
        .map(|(f, _)| f.point.iter().map(format_rational).collect())
        .collect();
    Ok(LraReport { holds: offending.is_empty(), facets_checked: cx.facets.len(), offending })
}

/// Outcome of a transparency check for one layer.
#[derive(Clone, Debug, PartialEq)]
pub struct TransparencyReport {
    pub layer: usize,
    pub holds: bool,
    pub regions_checked: usize,
    /// A point of `x` where every preactivation of the layer is negative.
    pub witness: Option<Point>,
}

/// Whether layer `l` is transparent on the image of `x` under the first `l − 1` layers: no
/// region of the complex of layers `1..l−1` on `x` has a point where every layer-`l`
/// preactivation is strictly negative.
pub fn transparency_check(theta: &Parameter, l: usize, x: &Polyhedron) -> Result<TransparencyReport> {
    if l == 0 || l > theta.depth() {
        return Err(Error::Precondition(format!("layer {l} is not a hidden layer")));
    }
    let mut levels = region_levels_upto(theta, x, l - 1)?;
    let regions = levels.pop().expect("nonempty");
    let layer = &theta.layers[l - 1];
    let witnesses: Vec<Option<Point>> = regions
        .par_iter()
        .map(|r| {
            let negs: Vec<_> = r.act.then(layer).forms().iter().map(|f| f.neg()).collect();
            if !r.cell.has_point_with_all_positive(&negs) {
                return None;
            }
            let mut cell = r.cell.clone();
            for f in &negs {
                cell = cell.restrict_ge(f);
            }
            cell.relint_point().or_else(|| Some(r.interior_point()))
        })
        .collect();
    let witness = witnesses.into_iter().flatten().next();
    Ok(TransparencyReport { layer: l, holds: witness.is_none(), regions_checked: regions.len(), witness })
}

fn region_levels_upto(theta: &Parameter, x: &Polyhedron, depth: usize) -> Result<Vec<Vec<crate::complex::Region>>> {
    if depth == theta.depth() {
        return region_levels(theta, x);
    }
    let mut t = theta.clone();
    t.layers.truncate(depth + 1);
    t.arch.0.truncate(depth + 2);
    region_levels(&t, x)
}

/// JSON row of the weight table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightJson {
    pub facet: usize,
    pub w: Vec<String>,
    pub n: Vec<String>,
    pub norm2: String,
    pub layer: Option<usize>,
}

pub fn weight_table(cx: &Complex, weights: &[FacetWeight]) -> Vec<WeightJson> {
    weights
        .iter()
        .enumerate()
        .map(|(f, w)| WeightJson {
            facet: f,
            w: w.w.iter().map(format_rational).collect(),
            n: w.normal.iter().map(format_rational).collect(),
            norm2: format_rational(&w.norm2),
            layer: cx.facet_layer(f),
        })
        .collect()
}

/// Exact equality of two region-difference weights as tropical weights.
pub fn weights_equal(a: &FacetWeight, b: &FacetWeight) -> bool {
    a.tropical().same_as(&b.tropical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::canonical_complex;
    use crate::exact::rational::{frac, int};
    use crate::fixtures::{corner_net, depth_hierarchy_realizations};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn weight_from_two_affine_pieces() {
        let a_p = Matrix::from_rows(2, vec![q(&[1, 1]), q(&[1, 0])]);
        let a_q = Matrix::from_rows(2, vec![q(&[1, 0]), q(&[1, 1])]);
        let w = FacetWeight::from_pieces(&a_p, &a_q, &q(&[0, 1]));
        assert_eq!(w.w, q(&[1, -1]));
        assert_eq!(w.norm2, int(1));
    }

    #[test]
    fn single_neuron_weight_is_scaled_norm() {
        let t = Parameter::from_rows(&[2, 1, 1], vec![(vec![q(&[3, 4])], q(&[0])), (vec![q(&[2])], q(&[0]))]).unwrap();
        let cx = canonical_complex(&t, &int(2)).unwrap();
        assert_eq!(cx.facets.len(), 1);
        let w = facet_weight(&cx, 0).unwrap().tropical();
        let ten = TropicalWeight { direction: q(&[10]), scale2: int(1) };
        assert!(w.same_as(&ten));
        assert!(facet_weight_closed_form(&cx, 0).unwrap().same_as(&ten));
        let h = cx.facets[0].hyperplane.clone();
        assert!(one_layer_weight(&t, &h).unwrap().same_as(&ten));
    }

    #[test]
    fn opposite_coincident_neurons_cancel() {
        let t = Parameter::from_rows(
            &[2, 2, 1],
            vec![(vec![q(&[1, 1]), q(&[-2, -2])], q(&[0, 0])), (vec![q(&[2, -1])], q(&[0]))],
        )
        .unwrap();
        let h = Hyperplane::from_form(&crate::exact::AffineForm::new(q(&[1, 1]), int(0)));
        assert!(one_layer_weight(&t, &h).unwrap().is_zero());
        let cx = canonical_complex(&t, &int(2)).unwrap();
        assert!(breakpoint_complex(&cx).unwrap().facets.is_empty());
    }

    #[test]
    fn equality_encoding_handles_irrational_norms() {
        let a = TropicalWeight { direction: q(&[1, 2]), scale2: int(2) };
        let b = TropicalWeight { direction: q(&[2, 4]), scale2: frac(1, 2) };
        let c = TropicalWeight { direction: q(&[-2, -4]), scale2: frac(1, 2) };
        assert!(a.same_as(&b));
        assert!(!a.same_as(&c));
        assert!(!a.same_as(&TropicalWeight { direction: q(&[2, 4]), scale2: int(1) }));
    }

    #[test]
    fn both_routes_agree_on_corner_net() {
        let cx = canonical_complex(&corner_net(), &int(4)).unwrap();
        for f in 0..cx.facets.len() {
            let a = facet_weight(&cx, f).unwrap().tropical();
            let b = facet_weight_closed_form(&cx, f).unwrap();
            assert!(a.same_as(&b), "facet {f}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn dead_network_has_empty_breakpoints() {
        let t = Parameter::from_rows(
            &[2, 2, 1],
            vec![(vec![q(&[1, 0]), q(&[0, 1])], q(&[-20, -20])), (vec![q(&[1, 1])], q(&[0]))],
        )
        .unwrap();
        let cx = canonical_complex(&t, &int(4)).unwrap();
        assert!(breakpoint_complex(&cx).unwrap().facets.is_empty());
        assert!(lra_on(&cx).unwrap().holds);
    }

    #[test]
    fn depth_hierarchy_support_is_three_segments() {
        for t in depth_hierarchy_realizations() {
            let cx = canonical_complex(&t, &int(8)).unwrap();
            let bp = breakpoint_complex(&cx).unwrap();
            let lines = [(q(&[0, 1]), int(0)), (q(&[1, -1]), int(-1)), (q(&[1, -2]), int(-1))];
            for &f in &bp.facets {
                let p = &cx.facets[f].point;
                assert!(p[0] > int(1), "stray breakpoint facet at {p:?}");
                assert!(lines.iter().any(|(a, b)| dot(a, p) + b == int(0)), "stray breakpoint facet at {p:?}");
            }
        }
    }

    #[test]
    fn transparency_detects_all_negative_points() {
        let live = Parameter::from_rows(
            &[2, 2, 2, 1],
            vec![
                (vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])),
                (vec![q(&[1, 1]), q(&[-1, 0])], q(&[5, -1])),
                (vec![q(&[1, 1])], q(&[0])),
            ],
        )
        .unwrap();
        let x = Polyhedron::axis_box(&q(&[0, 0]), &q(&[1, 1]));
        assert!(transparency_check(&live, 2, &x).unwrap().holds);
        let mut dead = live.clone();
        dead.layers[1].b = q(&[-5, -5]);
        let r = transparency_check(&dead, 2, &x).unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_some());
        assert!(transparency_check(&live, 3, &x).is_err());
    }
}
