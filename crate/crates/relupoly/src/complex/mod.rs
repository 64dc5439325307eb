//! The canonical polyhedral complex of a ReLU network inside a bounded working domain.
//!
//! Regions are produced layer by layer: every region of the complex of layers `1..l-1` is split
//! by the zero sets of the layer-`l` preactivations, which are affine on it. Facets are the
//! `(d-1)`-dimensional intersections of two regions, ridges the `(d-2)`-dimensional faces of
//! facets that do not lie on the domain boundary. Every face is identified by the sign pattern
//! at a relative-interior point.

mod dump;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{Cell, Hyperplane, Point, Polyhedron, Rational};
use crate::net::{AffineMap, NeuronId, Parameter, Sign, SignPattern};

pub use dump::{ComplexJson, FacetJson, RegionJson, RidgeJson};

/// A full-dimensional cell with constant sign pattern.
#[derive(Clone, Debug)]
pub struct Region {
    pub id: usize,
    pub pattern: SignPattern,
    pub cell: Cell,
    /// Preactivation maps `z^(l)` on this region for `l = 1..=depth`.
    pub pre: Vec<AffineMap>,
    /// Post-activation map `a^(depth)` on this region.
    pub act: AffineMap,
    /// The network output on this region, present when every hidden layer is included.
    pub output: Option<AffineMap>,
}

impl Region {
    /// Whether neuron `n`'s preactivation is non-constant on this region.
    pub fn varies(&self, n: NeuronId) -> bool {
        !self.pre[n.layer - 1].form(n.index).is_constant()
    }

    pub fn interior_point(&self) -> Point {
        self.cell.relint_point().expect("regions are nonempty")
    }
}

/// A codimension-one face shared by two regions.
#[derive(Clone, Debug)]
pub struct Facet {
    pub id: usize,
    /// `[P, Q]`; the hyperplane normal points into `P`.
    pub regions: [usize; 2],
    pub hyperplane: Hyperplane,
    pub cell: Cell,
    pub point: Point,
    pub pattern: SignPattern,
    /// Neurons whose bent hyperplane contains the facet.
    pub incident: Vec<NeuronId>,
    /// Touches the boundary of the working domain.
    pub box_clipped: bool,
    pub ridges: Vec<usize>,
}

/// A codimension-two face in the interior of the working domain.
#[derive(Clone, Debug)]
pub struct Ridge {
    pub id: usize,
    pub point: Point,
    pub cell: Cell,
    pub pattern: SignPattern,
    pub facets: Vec<usize>,
    pub regions: Vec<usize>,
    pub incident: Vec<NeuronId>,
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub theta: Parameter,
    pub domain: Cell,
    /// Number of hidden layers refined into the complex.
    pub depth: usize,
    pub regions: Vec<Region>,
    pub facets: Vec<Facet>,
    pub ridges: Vec<Ridge>,
}

/// Regions of the complexes of layers `1..=l` for `l = 0..=L`.
pub fn region_levels(theta: &Parameter, domain: &Polyhedron) -> Result<Vec<Vec<Region>>> {
    let base = base_region(theta, domain)?;
    let mut levels = vec![vec![base]];
    for l in 1..=theta.depth() {
        let next = refine(theta, levels.last().expect("nonempty"), l);
        levels.push(next);
    }
    Ok(levels)
}

fn base_region(theta: &Parameter, domain: &Polyhedron) -> Result<Region> {
    let d = theta.input_dim();
    if domain.dim != d {
        return Err(Error::Shape(format!("domain in R^{} for a network on R^{d}", domain.dim)));
    }
    let cell = Cell::new(domain.clone());
    if cell.dim() != d as i64 {
        return Err(Error::Degenerate("working domain must be bounded and full-dimensional".into()));
    }
    let act = AffineMap::identity(d);
    let output = (theta.depth() == 0).then(|| act.then(&theta.layers[0]));
    Ok(Region { id: 0, pattern: Vec::new(), cell, pre: Vec::new(), act, output })
}

fn refine(theta: &Parameter, prev: &[Region], l: usize) -> Vec<Region> {
    let layer = &theta.layers[l - 1];
    let last = l == theta.depth();
    let pieces: Vec<Vec<Region>> = prev
        .par_iter()
        .map(|r| {
            let z = r.act.then(layer);
            let mut cells: Vec<(Cell, Vec<Sign>)> = vec![(r.cell.clone(), Vec::new())];
            for j in 0..z.c.len() {
                let f = z.form(j);
                let mut next = Vec::with_capacity(cells.len() * 2);
                for (cell, signs) in cells {
                    let push = |next: &mut Vec<(Cell, Vec<Sign>)>, c: Cell, s: Sign| {
                        let mut sg = signs.clone();
                        sg.push(s);
                        next.push((c, sg));
                    };
                    if f.is_constant() {
                        push(&mut next, cell, Sign::of(&f.b));
                        continue;
                    }
                    match cell.sign_range(&f) {
                        (true, true) => {
                            push(&mut next, cell.restrict_ge(&f), Sign::Pos);
                            push(&mut next, cell.restrict_ge(&f.neg()), Sign::Neg);
                        }
                        (true, false) => push(&mut next, cell.restrict_ge(&f), Sign::Pos),
                        (false, true) => push(&mut next, cell.restrict_ge(&f.neg()), Sign::Neg),
                        (false, false) => push(&mut next, cell, Sign::Zero),
                    }
                }
                cells = next;
            }
            cells
                .into_iter()
                .map(|(cell, signs)| {
                    let keep: Vec<bool> = signs.iter().map(|s| s.is_active()).collect();
                    let act = z.masked(&keep);
                    let output = last.then(|| act.then(&theta.layers[l]));
                    let mut pattern = r.pattern.clone();
                    pattern.push(signs);
                    let mut pre = r.pre.clone();
                    pre.push(z.clone());
                    Region { id: 0, pattern, cell, pre, act, output }
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Region> = pieces.into_iter().flatten().collect();
    for (i, r) in out.iter_mut().enumerate() {
        r.id = i;
    }
    out
}

/// Sign pattern of the first `depth` hidden layers at `x`.
pub fn pattern_at(theta: &Parameter, x: &[Rational], depth: usize) -> SignPattern {
    let mut p = theta.activation_pattern(x);
    p.truncate(depth);
    p
}

impl Complex {
    /// Canonical complex of all hidden layers inside `domain`.
    pub fn build(theta: &Parameter, domain: &Polyhedron) -> Result<Complex> {
        let mut levels = region_levels(theta, domain)?;
        let regions = levels.pop().expect("nonempty");
        Ok(Complex::from_regions(theta, domain, theta.depth(), regions))
    }

    /// Complex of the first `depth` hidden layers inside `domain`.
    pub fn build_partial(theta: &Parameter, domain: &Polyhedron, depth: usize) -> Result<Complex> {
        let mut levels = region_levels(theta, domain)?;
        levels.truncate(depth + 1);
        let regions = levels.pop().expect("nonempty");
        Ok(Complex::from_regions(theta, domain, depth, regions))
    }

    /// Computes facets and ridges over a given list of regions.
    pub fn from_regions(theta: &Parameter, domain: &Polyhedron, depth: usize, regions: Vec<Region>) -> Complex {
        let domain_cell = Cell::new(domain.clone());
        let mut cx = Complex {
            theta: theta.clone(),
            domain: domain_cell,
            depth,
            regions,
            facets: Vec::new(),
            ridges: Vec::new(),
        };
        cx.facets = cx.find_facets(domain);
        cx.ridges = cx.find_ridges(domain);
        cx
    }

    pub fn dim(&self) -> usize {
        self.theta.input_dim()
    }

    fn find_facets(&self, domain: &Polyhedron) -> Vec<Facet> {
        let skip = domain.ineqs.len();
        let mut sides: BTreeMap<Hyperplane, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for r in &self.regions {
            for f in r.cell.poly.ineqs.iter().skip(skip) {
                let Some((h, positive)) = f.hyperplane() else { continue };
                let entry = sides.entry(h).or_default();
                let list = if positive { &mut entry.0 } else { &mut entry.1 };
                if !list.contains(&r.id) {
                    list.push(r.id);
                }
            }
        }
        let d = self.dim() as i64;
        let candidates: Vec<(Hyperplane, usize, usize)> = sides
            .into_iter()
            .flat_map(|(h, (plus, minus))| {
                let mut v = Vec::new();
                for &p in &plus {
                    for &q in &minus {
                        if p != q {
                            v.push((h.clone(), p, q));
                        }
                    }
                }
                v
            })
            .collect();
        let found: Vec<Option<Facet>> = candidates
            .par_iter()
            .map(|(h, p, q)| {
                let mut cell = self.regions[*p].cell.restrict_eq(&h.form());
                for f in self.regions[*q].cell.poly.ineqs.iter().skip(skip) {
                    cell = cell.restrict_ge(f);
                    if cell.is_empty() {
                        return None;
                    }
                }
                if cell.dim() != d - 1 {
                    return None;
                }
                let point = cell.relint_point().expect("nonempty");
                let pattern = pattern_at(&self.theta, &point, self.depth);
                let incident = self.incident(&pattern, &[*p, *q]);
                let box_clipped = cell.touches_any(&domain.ineqs);
                Some(Facet {
                    id: 0,
                    regions: [*p, *q],
                    hyperplane: h.clone(),
                    cell,
                    point,
                    pattern,
                    incident,
                    box_clipped,
                    ridges: Vec::new(),
                })
            })
            .collect();
        let mut facets: Vec<Facet> = found.into_iter().flatten().collect();
        facets.sort_by_key(|a| a.regions);
        for (i, f) in facets.iter_mut().enumerate() {
            f.id = i;
        }
        facets
    }

    /// Zero entries of `pattern` whose preactivation varies on one of `regions`.
    fn incident(&self, pattern: &SignPattern, regions: &[usize]) -> Vec<NeuronId> {
        let mut out = Vec::new();
        for (li, layer) in pattern.iter().enumerate() {
            for (j, s) in layer.iter().enumerate() {
                let n = NeuronId { layer: li + 1, index: j };
                if *s == Sign::Zero && regions.iter().any(|&r| self.regions[r].varies(n)) {
                    out.push(n);
                }
            }
        }
        out
    }

    fn find_ridges(&mut self, domain: &Polyhedron) -> Vec<Ridge> {
        let d = self.dim() as i64;
        if d < 2 {
            return Vec::new();
        }
        let per_facet: Vec<Vec<(SignPattern, Point, Cell)>> = self
            .facets
            .par_iter()
            .map(|f| {
                let mut out: Vec<(SignPattern, Point, Cell)> = Vec::new();
                let mut push = |point: Point, cell: Cell| {
                    if domain.ineqs.iter().any(|g| num_traits::Zero::is_zero(&g.eval(&point))) {
                        return;
                    }
                    let pattern = pattern_at(&self.theta, &point, self.depth);
                    if !out.iter().any(|(p, _, _)| *p == pattern) {
                        out.push((pattern, point, cell));
                    }
                };
                match f.cell.vertices() {
                    Some(vs) if d == 2 => {
                        for v in vs {
                            push(v.clone(), Cell::from_point(v));
                        }
                    }
                    _ => {
                        for g in &f.cell.poly.ineqs {
                            let sub = f.cell.restrict_eq(g);
                            if sub.dim() == d - 2 {
                                let point = sub.relint_point().expect("nonempty");
                                push(point, sub);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        let mut index: HashMap<SignPattern, usize> = HashMap::new();
        let mut ridges: Vec<Ridge> = Vec::new();
        for (fi, list) in per_facet.into_iter().enumerate() {
            for (pattern, point, cell) in list {
                let id = *index.entry(pattern.clone()).or_insert_with(|| {
                    ridges.push(Ridge {
                        id: ridges.len(),
                        point,
                        cell,
                        pattern,
                        facets: Vec::new(),
                        regions: Vec::new(),
                        incident: Vec::new(),
                    });
                    ridges.len() - 1
                });
                ridges[id].facets.push(fi);
                self.facets[fi].ridges.push(id);
            }
        }
        for r in ridges.iter_mut() {
            let mut regs: Vec<usize> = r.facets.iter().flat_map(|&f| self.facets[f].regions).collect();
            regs.sort_unstable();
            regs.dedup();
            r.regions = regs;
        }
        let incidents: Vec<Vec<NeuronId>> = ridges.iter().map(|r| self.incident(&r.pattern, &r.regions)).collect();
        for (r, inc) in ridges.iter_mut().zip(incidents) {
            r.incident = inc;
        }
        ridges
    }

    /// Region containing `x` in its interior, if any.
    pub fn locate(&self, x: &[Rational]) -> Option<usize> {
        self.regions.iter().position(|r| r.cell.poly.contains_strictly(x))
    }

    /// Facets incident to a neuron.
    pub fn facets_of(&self, n: NeuronId) -> Vec<usize> {
        self.facets.iter().filter(|f| f.incident.contains(&n)).map(|f| f.id).collect()
    }

    /// Layer of the unique incident neuron, if exactly one.
    pub fn facet_layer(&self, facet: usize) -> Option<usize> {
        match self.facets[facet].incident.as_slice() {
            [n] => Some(n.layer),
            _ => None,
        }
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson::from_complex(self)
    }
}

/// The cube `[-r, r]^d`.
pub fn working_box(d: usize, r: &Rational) -> Polyhedron {
    Polyhedron::cube(d, r)
}

/// `canonical_complex(θ, box)`.
pub fn canonical_complex(theta: &Parameter, r: &Rational) -> Result<Complex> {
    Complex::build(theta, &working_box(theta.input_dim(), r))
}

/// `local_complex(θ, P)`.
pub fn local_complex(theta: &Parameter, p: &Polyhedron) -> Result<Complex> {
    Complex::build(theta, p)
}

/// Default half-width of the working box.
pub fn default_box() -> Rational {
    int(8)
}

#[cfg(test)]
mod tests;
