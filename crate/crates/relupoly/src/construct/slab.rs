use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::exact::rational::{frac, int, to_f64};
use crate::exact::{AffineForm, FormJson, Matrix, Point, Polyhedron, Rational};
use crate::net::{AffineMap, Architecture, Layer, Parameter};
use crate::random::{signed_unit, Rng64, DENOMINATOR};
use crate::tropical::transparency_check;

const NUDGE_TRIES: usize = 16;
const MAX_HALVINGS: usize = 20;

/// Where a new layer is placed: the earlier layers, the input polytope `P` (the layer must be
/// transparent on the image of `P`), the current sub-polytope `P^(l)` and the affine map
/// that the earlier layers induce on it.
#[derive(Clone, Debug)]
pub struct SlabSite<'a> {
    pub prefix: &'a [Layer],
    pub input: &'a Polyhedron,
    pub polytope: &'a Polyhedron,
    pub map: &'a AffineMap,
    /// The slab placed just before this one, whose hyperplanes the new layer must cross.
    pub previous: Option<PreviousSlab<'a>>,
}

/// A slab already in place: the layer together with its polytope and the map into its input space.
#[derive(Clone, Copy, Debug)]
pub struct PreviousSlab<'a> {
    pub polytope: &'a Polyhedron,
    pub map: &'a AffineMap,
    pub layer: &'a Layer,
}

impl<'a> SlabSite<'a> {
    /// First layer: no prefix, identity map, `P^(0) = P`.
    pub fn first(input: &'a Polyhedron, identity: &'a AffineMap) -> Self {
        SlabSite { prefix: &[], input, polytope: input, map: identity, previous: None }
    }

    fn image_dim(&self) -> usize {
        self.map.c.len()
    }
}

/// An oriented slab layer. Its hyperplanes, pulled back to the input space, cut the polytope
/// into regions `R_0, …, R_n` with active sets `{1..i} △ {n}`.
#[derive(Clone, Debug)]
pub struct SlabLayer {
    pub layer: Layer,
    /// The hyperplane the slab follows, in the layer's input space.
    pub target: AffineForm,
    pub eps: Rational,
    /// Normalized sup-distance of the farthest slab hyperplane from the target.
    pub closeness: f64,
    /// The layer's preactivations pulled back to the input space on the polytope.
    pub pulled_back: Vec<AffineForm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlabJson {
    pub target: FormJson,
    pub eps: String,
    pub closeness: f64,
    pub hyperplanes: Vec<FormJson>,
}

impl SlabLayer {
    pub fn to_json(&self) -> SlabJson {
        SlabJson {
            target: FormJson::from(&self.target),
            eps: crate::exact::format_rational(&self.eps),
            closeness: self.closeness,
            hyperplanes: (0..self.layer.b.len()).map(|i| FormJson::from(&row_form(&self.layer, i))).collect(),
        }
    }
}

pub(crate) fn row_form(layer: &Layer, i: usize) -> AffineForm {
    AffineForm::new(layer.w.row(i).to_vec(), layer.b[i].clone())
}

/// A rational close to `sqrt(q)` on the `2^-16` grid, never zero for positive `q`.
pub(crate) fn approx_sqrt(q: &Rational) -> Rational {
    let s = (to_f64(q).sqrt() * DENOMINATOR as f64).round().max(1.0) as i64;
    frac(s, DENOMINATOR)
}

fn normalized(f: &AffineForm) -> Vec<f64> {
    let n = f.a.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt();
    f.a.iter().chain(std::iter::once(&f.b)).map(|x| to_f64(x) / n).collect()
}

/// Distance in the closeness metric: sup-norm between unit-normal representatives, minimized
/// over the sign of the second form. Computed in floating point.
pub fn closeness(f: &AffineForm, target: &AffineForm) -> f64 {
    let (a, b) = (normalized(f), normalized(target));
    let plus = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let minus = a.iter().zip(&b).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
    plus.min(minus)
}

/// Whether the zero set of `g` cuts `p` into two full-dimensional pieces.
pub fn inside(g: &AffineForm, p: &Polyhedron) -> bool {
    let d = p.dimension();
    !g.is_constant()
        && p.clone().with_ineq(g.clone()).dimension() == d
        && p.clone().with_ineq(g.neg()).dimension() == d
        && p.clone().with_eq(g.clone()).dimension() == d - 1
}

/// The unnudged slab: neuron `k < n` is `h − c_k`, neuron `n` is `c_n − h`, with `h` the
/// target rescaled to an almost unit normal and `c_1 < … < c_n` spread over `[−ε/2, ε/2]`.
fn parallel_slab(target: &AffineForm, n: usize, eps: &Rational) -> Vec<AffineForm> {
    let top = target.a.iter().map(|x| x.abs()).max().expect("non-constant target");
    let unit = target.scaled(&top.recip());
    let norm = approx_sqrt(&crate::exact::rational::norm2(&unit.a));
    let h = unit.scaled(&norm.recip());
    (0..n)
        .map(|k| {
            let c = eps * (frac(-1, 2) + Rational::new((k as i64).into(), ((n - 1) as i64).into()));
            let shifted = AffineForm::new(h.a.clone(), &h.b - c);
            if k + 1 == n {
                shifted.neg()
            } else {
                shifted
            }
        })
        .collect()
}

fn nudge(f: &AffineForm, size: &Rational, rng: &mut Rng64) -> AffineForm {
    let a = f.a.iter().map(|x| x + size * signed_unit(rng)).collect();
    AffineForm::new(a, &f.b + size * signed_unit(rng))
}

fn to_layer(forms: &[AffineForm]) -> Layer {
    let cols = forms[0].dim();
    Layer {
        w: Matrix::from_rows(cols, forms.iter().map(|f| f.a.clone()).collect()),
        b: forms.iter().map(|f| f.b.clone()).collect(),
    }
}

/// The earlier layers followed by `layer` and a zero output neuron.
pub(crate) fn with_dummy_output(input_dim: usize, prefix: &[Layer], layer: &Layer) -> Parameter {
    let mut layers = prefix.to_vec();
    layers.push(layer.clone());
    let n = layer.b.len();
    layers.push(Layer { w: Matrix::zeros(1, n), b: vec![Rational::zero()] });
    let mut widths = vec![input_dim];
    widths.extend(layers.iter().map(|l| l.b.len()));
    Parameter::new(Architecture(widths), layers).expect("consistent shapes")
}

/// Active set of `layer` at `x`, where the earlier layers induce `map`.
fn active_at(map: &AffineMap, layer: &Layer, x: &[Rational]) -> Vec<bool> {
    map.then(layer).apply(x).iter().map(|z| z.is_positive()).collect()
}

/// Slab orientation: on the `k`-th pulled-back hyperplane exactly neurons `1..k-1` and `n`
/// are active (`k < n`), and neurons `1..n-1` on the last one.
fn oriented(site: &SlabSite, layer: &Layer, pulled: &[AffineForm]) -> bool {
    let n = pulled.len();
    pulled.iter().enumerate().all(|(k, g)| {
        let Some(x) = site.polytope.clone().with_eq(g.clone()).relint_point() else { return false };
        let act = active_at(site.map, layer, &x);
        (0..n).all(|j| {
            let want = if k + 1 < n { j < k || j + 1 == n } else { j + 1 < n };
            j == k || act[j] == want
        })
    })
}

fn disjoint_in(p: &Polyhedron, forms: &[AffineForm]) -> bool {
    (0..forms.len())
        .all(|i| (i + 1..forms.len()).all(|j| p.clone().with_eq(forms[i].clone()).with_eq(forms[j].clone()).is_empty()))
}

/// Each new neuron's bent hyperplane crosses every hyperplane of the previous slab inside its
/// polytope. On one previous hyperplane the previous layer has a fixed active set, so the new
/// preactivation is affine there and crossing means taking both signs.
fn crosses_previous(prev: PreviousSlab, layer: &Layer) -> bool {
    let pre = prev.map.then(prev.layer);
    (0..pre.c.len()).all(|j| {
        let on = prev.polytope.clone().with_eq(pre.form(j));
        let Some(x) = on.relint_point() else { return false };
        let act: Vec<bool> = pre.apply(&x).iter().map(|z| z.is_positive()).collect();
        let next = pre.masked(&act).then(layer);
        (0..layer.b.len()).all(|i| inside(&next.form(i), &on))
    })
}

/// Every requirement of an oriented slab on the site, checked exactly.
fn certify(site: &SlabSite, layer: &Layer) -> Result<Option<Vec<AffineForm>>> {
    let pulled = site.map.then(layer).forms();
    if !pulled.iter().all(|g| inside(g, site.polytope)) || !disjoint_in(site.polytope, &pulled) {
        return Ok(None);
    }
    if !oriented(site, layer, &pulled) {
        return Ok(None);
    }
    if let Some(prev) = site.previous {
        if !crosses_previous(prev, layer) {
            return Ok(None);
        }
    }
    let d = site.input.dim;
    let theta = with_dummy_output(d, site.prefix, layer);
    let t = transparency_check(&theta, site.prefix.len() + 1, site.input)?;
    Ok(t.holds.then_some(pulled))
}

/// A generic oriented slab layer of width `n` following `target`, placed on `site`.
/// The hyperplanes start `ε`-close to the target and receive random nudges of size `ε/100`;
/// `ε` is halved whenever no nudge certifies.
pub fn make_slab_layer(
    site: &SlabSite,
    target: &AffineForm,
    n: usize,
    eps: &Rational,
    rng: &mut Rng64,
) -> Result<SlabLayer> {
    if n < 2 {
        return Err(Error::Precondition("a slab layer needs at least two neurons".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    if target.dim() != site.image_dim() || target.is_constant() {
        return Err(Error::Precondition("target hyperplane does not live in the layer's input space".into()));
    }
    let mut eps = eps.clone();
    for _ in 0..=MAX_HALVINGS {
        let base = parallel_slab(target, n, &eps);
        let size = &eps / int(100);
        for _ in 0..NUDGE_TRIES {
            let forms: Vec<AffineForm> = base.iter().map(|f| nudge(f, &size, rng)).collect();
            let close = forms.iter().map(|f| closeness(f, target)).fold(0.0, f64::max);
            if close >= to_f64(&eps) {
                continue;
            }
            let layer = to_layer(&forms);
            if let Some(pulled) = certify(site, &layer)? {
                return Ok(SlabLayer { layer, target: target.clone(), eps, closeness: close, pulled_back: pulled });
            }
        }
        eps /= int(2);
    }
    Err(Error::Construction(format!("no slab layer certified after {MAX_HALVINGS} halvings of ε")))
}

/// The pivot hyperplane of a slab and the sub-polytope `R_{n-1}` on which every slab neuron is active.
#[derive(Clone, Debug)]
pub struct Pivot {
    /// In the slab's output space.
    pub hyperplane: AffineForm,
    /// Points on the pulled-back slab hyperplanes and their images.
    pub points: Vec<Point>,
    pub images: Vec<Point>,
    /// `R_{n-1}` as a polytope in the input space.
    pub region: Polyhedron,
}

/// The hyperplane through the images of one point on each slab hyperplane. Fails when the
/// images are affinely dependent.
pub fn pivot_through(map: &AffineMap, layer: &Layer, points: &[Point]) -> Result<(AffineForm, Vec<Point>)> {
    let n = layer.b.len();
    let pre = map.then(layer);
    let images: Vec<Point> = points
        .iter()
        .map(|x| pre.apply(x).into_iter().map(|z| if z.is_positive() { z } else { Rational::zero() }).collect())
        .collect();
    let rows: Vec<Vec<Rational>> =
        images.iter().map(|y| y.iter().cloned().chain(std::iter::once(int(1))).collect()).collect();
    let kernel = Matrix::from_rows(n + 1, rows).nullspace();
    if kernel.len() != 1 {
        return Err(Error::Degenerate("slab not generic: image points are affinely dependent".into()));
    }
    let v = &kernel[0];
    let form = AffineForm::new(v[..n].to_vec(), v[n].clone());
    if form.is_constant() {
        return Err(Error::Degenerate("slab not generic: image points are affinely dependent".into()));
    }
    Ok((form, images))
}

/// Pivot of a slab placed on `site`: points are taken in the relative interior of each
/// pulled-back hyperplane within the polytope.
pub fn pivot_hyperplane(site: &SlabSite, slab: &SlabLayer) -> Result<Pivot> {
    let points: Vec<Point> = slab
        .pulled_back
        .iter()
        .map(|g| {
            site.polytope
                .clone()
                .with_eq(g.clone())
                .relint_point()
                .ok_or_else(|| Error::Degenerate("slab hyperplane misses the polytope".into()))
        })
        .collect::<Result<_>>()?;
    let (hyperplane, images) = pivot_through(site.map, &slab.layer, &points)?;
    let mut region = site.polytope.clone();
    for g in &slab.pulled_back {
        region = region.with_ineq(g.clone());
    }
    Ok(Pivot { hyperplane, points, images, region })
}

/// Number of connected pieces of the pullback of `h` through `layer` inside the site's
/// polytope, counting facets that share a ridge as connected.
pub fn pullback_pieces(site: &SlabSite, layer: &Layer, h: &AffineForm) -> Result<usize> {
    let d = site.input.dim;
    let mut layers = site.prefix.to_vec();
    layers.push(layer.clone());
    layers.push(Layer { w: Matrix::from_rows(h.dim(), vec![h.a.clone()]), b: vec![h.b.clone()] });
    layers.push(Layer { w: Matrix::from_rows(1, vec![vec![int(1)]]), b: vec![Rational::zero()] });
    let mut widths = vec![d];
    widths.extend(layers.iter().map(|l| l.b.len()));
    let theta = Parameter::new(Architecture(widths), layers)?;
    let cx = Complex::build(&theta, site.polytope)?;
    let neuron = crate::net::NeuronId { layer: site.prefix.len() + 2, index: 0 };
    let facets = cx.facets_of(neuron);
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(facets.len());
    for a in 0..facets.len() {
        for b in a + 1..facets.len() {
            let ra = &cx.facets[facets[a]].ridges;
            if cx.facets[facets[b]].ridges.iter().any(|r| ra.contains(r)) {
                uf.union(a, b);
            }
        }
    }
    let roots: std::collections::BTreeSet<usize> = (0..facets.len()).map(|k| uf.find(k)).collect();
    Ok(roots.len())
}
