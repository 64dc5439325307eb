use serde::{Deserialize, Serialize};

use super::slab::{
    inside, make_slab_layer, pivot_hyperplane, with_dummy_output, PreviousSlab, SlabJson, SlabLayer, SlabSite,
};
use crate::checks::{all_verdicts, genericity_check, Verdict};
use crate::complex::region_levels;
use crate::error::{Error, Result};
use crate::exact::arrangement::enumerate_vertices;
use crate::exact::rational::{dot, frac, int};
use crate::exact::{format_rational, parse_rational, AffineForm, Cell, FormJson, Matrix, Point, Polyhedron, Rational};
use crate::net::{AffineMap, Architecture, Layer, Parameter};
use crate::random::{point_in_box, rng, signed_unit, Rng64};

pub const MAX_OUTPUT_RESAMPLES: usize = 50;
const MAX_ATTEMPTS: u64 = 4;

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// `P = [−r, r]^d`.
    pub radius: Rational,
    /// Initial `ε` for every slab; halved per slab as needed.
    pub eps: Rational,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { radius: int(1), eps: frac(1, 4), seed: 0 }
    }
}

/// One slab of the construction together with where it was placed.
#[derive(Clone, Debug)]
pub struct Stage {
    /// Hidden layer index `l` of the slab.
    pub layer: usize,
    /// `P^(l-1)`: the slab's hyperplanes, pulled back, cut this polytope.
    pub polytope: Polyhedron,
    /// The map the earlier layers induce on `polytope`.
    pub map: AffineMap,
    pub slab: SlabLayer,
    /// Pivot hyperplane handed to the next slab, absent for the last hidden layer.
    pub pivot: Option<AffineForm>,
}

#[derive(Clone, Debug)]
pub struct ConstructionTrail {
    pub arch: Architecture,
    pub input: Polyhedron,
    pub stages: Vec<Stage>,
    pub output_resamples: usize,
    pub attempts: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageJson {
    pub layer: usize,
    pub polytope: Vec<FormJson>,
    pub polytope_vertices: Vec<Vec<String>>,
    /// Vertices of `Q^(l-1)`, the image of the polytope in the slab's input space.
    pub image_vertices: Vec<Vec<String>>,
    /// Componentwise bounds of `X^(l-1)`, the image of `P` in the slab's input space.
    pub image_bounds: [Vec<String>; 2],
    pub slab: SlabJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivot: Option<FormJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrailJson {
    pub architecture: Vec<usize>,
    pub input: Vec<FormJson>,
    pub seed: u64,
    pub attempts: u64,
    pub output_resamples: usize,
    pub stages: Vec<StageJson>,
}

fn strings(p: &[Rational]) -> Vec<String> {
    p.iter().map(format_rational).collect()
}

pub(crate) fn vertices(p: &Polyhedron) -> Vec<Point> {
    let cell = Cell::new(p.clone());
    match cell.vertices() {
        Some(v) => v.to_vec(),
        None => enumerate_vertices(p),
    }
}

/// Componentwise bounds of the image of `input` under the first `depth` layers.
fn image_bounds(input: &Polyhedron, prefix: &[Layer]) -> Result<(Point, Point)> {
    let pts: Vec<Point> = if prefix.is_empty() {
        vertices(input)
    } else {
        let theta = with_dummy_output(input.dim, &prefix[..prefix.len() - 1], &prefix[prefix.len() - 1]);
        let regions = region_levels(&theta, input)?.pop().expect("levels");
        regions
            .iter()
            .flat_map(|r| vertices(&r.cell.poly).into_iter().map(|v| r.act.apply(&v)).collect::<Vec<_>>())
            .collect()
    };
    let dim = pts[0].len();
    let lo = (0..dim).map(|k| pts.iter().map(|p| p[k].clone()).min().expect("points")).collect();
    let hi = (0..dim).map(|k| pts.iter().map(|p| p[k].clone()).max().expect("points")).collect();
    Ok((lo, hi))
}

#[derive(Deserialize)]
struct TrailPolytopes {
    input: Vec<FormJson>,
    stages: Vec<StagePolytope>,
}

#[derive(Deserialize)]
struct StagePolytope {
    layer: usize,
    polytope: Vec<FormJson>,
}

fn polyhedron_from_json(forms: &[FormJson]) -> Result<Polyhedron> {
    let ineqs = forms
        .iter()
        .map(|f| {
            let a = f.normal.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>()?;
            Ok(AffineForm::new(a, parse_rational(&f.offset)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = ineqs.first().map_or(0, |f| f.a.len());
    if ineqs.iter().any(|f| f.a.len() != dim) {
        return Err(Error::Shape("polytope inequalities of mixed dimension".into()));
    }
    Ok(Polyhedron { dim, ineqs, eqs: Vec::new() })
}

/// Reads the candidate polytopes back from a serialized trail, named as in
/// [`ConstructionTrail::polytopes`].
pub fn trail_polytopes(text: &str) -> Result<Vec<(String, Polyhedron)>> {
    let t: TrailPolytopes = serde_json::from_str(text)?;
    let mut out = vec![("P".to_string(), polyhedron_from_json(&t.input)?)];
    for s in t.stages.iter().skip(1) {
        out.push((format!("P^({})", s.layer - 1), polyhedron_from_json(&s.polytope)?));
    }
    Ok(out)
}

impl ConstructionTrail {
    /// Candidate polytopes for the identifiability search: `P` and every `P^(l)`.
    pub fn polytopes(&self) -> Vec<(String, Polyhedron)> {
        let mut out = vec![("P".to_string(), self.input.clone())];
        for s in self.stages.iter().skip(1) {
            out.push((format!("P^({})", s.layer - 1), s.polytope.clone()));
        }
        out
    }

    /// The prefix layers used by stage `k`.
    fn prefix<'a>(&self, theta: &'a Parameter, k: usize) -> &'a [Layer] {
        &theta.layers[..self.stages[k].layer - 1]
    }

    pub fn to_json(&self, theta: &Parameter) -> Result<TrailJson> {
        let stages = self
            .stages
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let verts = vertices(&s.polytope);
                let (lo, hi) = image_bounds(&self.input, self.prefix(theta, k))?;
                Ok(StageJson {
                    layer: s.layer,
                    polytope: s.polytope.ineqs.iter().map(FormJson::from).collect(),
                    polytope_vertices: verts.iter().map(|v| strings(v)).collect(),
                    image_vertices: verts.iter().map(|v| strings(&s.map.apply(v))).collect(),
                    image_bounds: [strings(&lo), strings(&hi)],
                    slab: s.slab.to_json(),
                    pivot: s.pivot.as_ref().map(FormJson::from),
                })
            })
            .collect::<Result<_>>()?;
        Ok(TrailJson {
            architecture: self.arch.0.clone(),
            input: self.input.ineqs.iter().map(FormJson::from).collect(),
            seed: self.seed,
            attempts: self.attempts,
            output_resamples: self.output_resamples,
            stages,
        })
    }
}

/// A random hyperplane through a point near the centre of `p`, cutting `p`.
pub(crate) fn random_cut(p: &Polyhedron, radius: &Rational, rng: &mut Rng64) -> AffineForm {
    let quarter = radius / int(4);
    loop {
        let a: Vec<Rational> = (0..p.dim).map(|_| signed_unit(rng)).collect();
        let lo = vec![-quarter.clone(); p.dim];
        let hi = vec![quarter.clone(); p.dim];
        let x0 = point_in_box(rng, &lo, &hi);
        let f = AffineForm::new(a.clone(), -dot(&a, &x0));
        if inside(&f, p) {
            return f;
        }
    }
}

fn random_layer(rows: usize, cols: usize, rng: &mut Rng64) -> Layer {
    let w = (0..rows).map(|_| (0..cols).map(|_| signed_unit(rng)).collect()).collect();
    Layer { w: Matrix::from_rows(cols, w), b: (0..rows).map(|_| signed_unit(rng)).collect() }
}

/// Slab layers for every hidden layer of `widths[..=depth]`, each following the pivot of the
/// previous one. Returns the layers and their stages.
pub(crate) fn slab_stack(
    widths: &[usize],
    input: &Polyhedron,
    radius: &Rational,
    eps: &Rational,
    rng: &mut Rng64,
) -> Result<(Vec<Layer>, Vec<Stage>)> {
    let d = widths[0];
    let depth = widths.len() - 1;
    let identity = AffineMap::identity(d);
    let first = SlabSite::first(input, &identity);
    let target = random_cut(input, radius, rng);
    let slab = make_slab_layer(&first, &target, widths[1], eps, rng)?;
    let mut layers = vec![slab.layer.clone()];
    let mut stages = vec![Stage { layer: 1, polytope: input.clone(), map: identity, slab, pivot: None }];
    for l in 1..depth {
        let (polytope, map, slab) = {
            let s = &stages[l - 1];
            let site = SlabSite { prefix: &layers[..l - 1], input, polytope: &s.polytope, map: &s.map, previous: None };
            let pivot = pivot_hyperplane(&site, &s.slab)?;
            let map = s.map.then(&layers[l - 1]);
            let previous = PreviousSlab { polytope: &s.polytope, map: &s.map, layer: &layers[l - 1] };
            let next =
                SlabSite { prefix: &layers[..l], input, polytope: &pivot.region, map: &map, previous: Some(previous) };
            let slab = make_slab_layer(&next, &pivot.hyperplane, widths[l + 1], eps, rng)?;
            (pivot.region, map, slab)
        };
        stages[l - 1].pivot = Some(slab.target.clone());
        layers.push(slab.layer.clone());
        stages.push(Stage { layer: l + 1, polytope, map, slab, pivot: None });
    }
    Ok((layers, stages))
}

fn precondition(arch: &Architecture) -> Result<()> {
    let depth = arch.depth();
    if let Some(i) = (0..=depth).find(|&i| arch.0[i] < 2) {
        return Err(Error::Precondition(format!(
            "every input and hidden width must be at least 2, layer {i} of {arch} has width {}",
            arch.0[i]
        )));
    }
    Ok(())
}

/// Random output layers until the parameter passes the genericity check on `input`.
pub(crate) fn generic_output(
    arch: &Architecture,
    hidden: Vec<Layer>,
    input: &Polyhedron,
    seed: u64,
    rng: &mut Rng64,
) -> Result<(Parameter, usize)> {
    let depth = arch.depth();
    for k in 0..MAX_OUTPUT_RESAMPLES {
        let mut layers = hidden.clone();
        layers.push(random_layer(arch.output_dim(), arch.width(depth), rng));
        let theta = Parameter::new(arch.clone(), layers)?;
        if genericity_check(&theta, input, seed)?.passed() {
            return Ok((theta, k + 1));
        }
    }
    Err(Error::Construction(format!("no generic output layer after {MAX_OUTPUT_RESAMPLES} resamples")))
}

/// A parameter with cTPIC and LRA on `P = [−r, r]^d`: a slab layer on `P`, then for each
/// further hidden layer a slab that follows the pivot hyperplane of the previous one on its
/// all-active region, and a random generic output layer. Every verdict is rechecked on `P`;
/// a failed attempt restarts from a fresh random stream.
pub fn build_identifiable(arch: &Architecture, opts: &BuildOptions) -> Result<(Parameter, ConstructionTrail)> {
    precondition(arch)?;
    let d = arch.input_dim();
    let input = Polyhedron::cube(d, &opts.radius);
    let depth = arch.depth();
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut g = rng(opts.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9)));
        let built = slab_stack(&arch.0[..=depth], &input, &opts.radius, &opts.eps, &mut g)
            .and_then(|(hidden, stages)| Ok((generic_output(arch, hidden, &input, opts.seed, &mut g)?, stages)));
        let ((theta, resamples), stages) = match built {
            Ok(b) => b,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        let failed: Vec<Verdict> =
            all_verdicts(&theta, &input, opts.seed)?.into_iter().filter(|v| !v.passed()).collect();
        if failed.is_empty() {
            let trail = ConstructionTrail {
                arch: arch.clone(),
                input,
                stages,
                output_resamples: resamples,
                attempts: attempt + 1,
                seed: opts.seed,
            };
            return Ok((theta, trail));
        }
        last = failed
            .iter()
            .map(|v| format!("{}: {}", v.property, v.witnesses.join("; ")))
            .collect::<Vec<_>>()
            .join(" | ");
    }
    Err(Error::Construction(format!("{MAX_ATTEMPTS} attempts failed, last: {last}")))
}
