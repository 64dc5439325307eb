//! Discrete fiber configurations and the polynomial systems they cut out.
//!
//! A configuration sends every candidate bent hyperplane to a hidden neuron of a target
//! architecture and fixes an activation pattern on every breakpoint facet. The emitted system
//! uses one scalar `mu[σ]` per facet with `g_σ(η) = μ_σ ā_σ` and `t_σ(η) = μ_σ β̄_σ`, where
//! `ā_σ, β̄_σ` are the primitive integer normal and offset of the facet, and matches weights in
//! the squared form `μ_σ² ‖ā_σ‖⁴ v_σ(η)_k² = w_k²` with `w` the unnormalized facet weight.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::depgraph::DependencyGraph;
use crate::error::{Error, Result};
use crate::exact::{format_rational, Polyhedron, Rational};
use crate::net::{active_sets, Architecture, NeuronId, Parameter};
use crate::tropical::breakpoint_complex;

/// Rational data of one breakpoint facet of the source function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetDatum {
    /// Facet id in the source complex.
    pub facet: usize,
    pub candidate: usize,
    #[serde(with = "rationals")]
    pub normal: Vec<Rational>,
    #[serde(with = "rational")]
    pub offset: Rational,
    /// `(A_P − A_Q)·ā`, with `P` on the positive side of `ā·x + β̄`.
    #[serde(with = "rationals")]
    pub weight: Vec<Rational>,
    #[serde(with = "rational")]
    pub norm2: Rational,
}

/// Breakpoint facets and the candidate precedence edges of a source function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberData {
    pub input_dim: usize,
    pub output_dim: usize,
    pub num_candidates: usize,
    pub edges: Vec<(usize, usize)>,
    pub facets: Vec<FacetDatum>,
}

/// `φ` on candidates and the active sets `s(σ)` on facets, both in `FiberData` order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub phi: Vec<NeuronId>,
    /// `s[σ][l-1][i]` is whether neuron `(l, i)` is active on facet `σ`.
    pub s: Vec<Vec<Vec<bool>>>,
}

mod rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        parse_rational(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

mod rationals {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect()
    }
}

/// Facet data of `f_θ` on `p` together with the ground-truth configuration of `θ` itself:
/// each candidate goes to the neuron whose bent hyperplane carries it, each facet keeps the
/// pattern `θ` induces there. Fails when that assignment is not a valid configuration, as when
/// a candidate carries several neurons or one neuron carries several candidates.
pub fn fiber_data(theta: &Parameter, p: &Polyhedron) -> Result<(FiberData, Configuration)> {
    let cx = Complex::build(theta, p)?;
    let bp = breakpoint_complex(&cx)?;
    let g = DependencyGraph::from_breakpoints(&cx, &bp);
    let truth = g.ground_truth(&cx);
    let phi = truth
        .iter()
        .enumerate()
        .map(|(c, ns)| match ns.iter().collect::<Vec<_>>().as_slice() {
            [n] => Ok(**n),
            _ => Err(Error::Degenerate(format!("candidate {c} lies on {} neurons", ns.len()))),
        })
        .collect::<Result<_>>()?;
    let mut facets = Vec::new();
    let mut s = Vec::new();
    for &f in &bp.facets {
        let facet = &cx.facets[f];
        let w = &bp.weights[f];
        facets.push(FacetDatum {
            facet: f,
            candidate: g.candidate_of(f).expect("breakpoint facets belong to candidates"),
            normal: facet.hyperplane.normal.clone(),
            offset: facet.hyperplane.offset.clone(),
            weight: w.w.clone(),
            norm2: w.norm2.clone(),
        });
        s.push(active_sets(&facet.pattern));
    }
    let data = FiberData {
        input_dim: theta.input_dim(),
        output_dim: theta.arch.output_dim(),
        num_candidates: g.num_vertices(),
        edges: g.edges.iter().map(|e| (e.from, e.to)).collect(),
        facets,
    };
    let config = Configuration { phi, s };
    validate_configuration(&data, &theta.arch, &config)
        .map_err(|e| Error::Degenerate(format!("the network's own assignment is not a configuration: {e}")))?;
    Ok((data, config))
}

/// Injective, order-respecting maps from candidates to hidden neurons of `arch`, one per
/// orbit under permutations within each layer, with at most `cap` results. The flag reports
/// truncation.
pub fn enumerate_configurations(data: &FiberData, arch: &Architecture, cap: usize) -> (Vec<Vec<NeuronId>>, bool) {
    let n = data.num_candidates;
    let depth = arch.depth();
    let mut out = Vec::new();
    let mut layer_of = vec![0usize; n];
    let mut used = vec![0usize; depth + 1];
    let mut truncated = false;

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        data: &FiberData,
        arch: &Architecture,
        cap: usize,
        layer_of: &mut [usize],
        used: &mut [usize],
        out: &mut Vec<Vec<NeuronId>>,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if k == layer_of.len() {
            if out.len() == cap {
                *truncated = true;
                return;
            }
            let mut next = vec![0usize; arch.depth() + 1];
            out.push(
                layer_of
                    .iter()
                    .map(|&l| {
                        next[l] += 1;
                        NeuronId { layer: l, index: next[l] - 1 }
                    })
                    .collect(),
            );
            return;
        }
        for l in 1..=arch.depth() {
            if used[l] == arch.width(l) {
                continue;
            }
            let ordered = data.edges.iter().all(|&(u, v)| match (u == k, v == k) {
                (true, false) if v < k => l < layer_of[v],
                (false, true) if u < k => layer_of[u] < l,
                _ => true,
            });
            if !ordered {
                continue;
            }
            layer_of[k] = l;
            used[l] += 1;
            go(k + 1, data, arch, cap, layer_of, used, out, truncated);
            used[l] -= 1;
        }
    }

    go(0, data, arch, cap, &mut layer_of, &mut used, &mut out, &mut truncated);
    (out, truncated)
}

/// Rejects configurations that break an edge order, reuse a neuron or do not fit `arch`.
pub fn validate_configuration(data: &FiberData, arch: &Architecture, config: &Configuration) -> Result<()> {
    if arch.input_dim() != data.input_dim || arch.output_dim() != data.output_dim {
        return Err(Error::Shape(format!("{arch} does not match the source input and output dimensions")));
    }
    if config.phi.len() != data.num_candidates || config.s.len() != data.facets.len() {
        return Err(Error::Shape("configuration does not cover every candidate and facet".into()));
    }
    for n in &config.phi {
        if n.layer == 0 || n.layer > arch.depth() || n.index >= arch.width(n.layer) {
            return Err(Error::Shape(format!("{n} is not a hidden neuron of {arch}")));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    if let Some(n) = config.phi.iter().find(|n| !seen.insert(**n)) {
        return Err(Error::Precondition(format!("{n} receives two candidates")));
    }
    if let Some(&(u, v)) = data.edges.iter().find(|&&(u, v)| config.phi[u].layer >= config.phi[v].layer) {
        return Err(Error::Precondition(format!("edge {u} -> {v} needs {} below {}", config.phi[u], config.phi[v])));
    }
    for s in &config.s {
        if s.len() != arch.depth() || s.iter().enumerate().any(|(l, row)| row.len() != arch.width(l + 1)) {
            return Err(Error::Shape("activation pattern does not fit the architecture".into()));
        }
    }
    Ok(())
}

/// A polynomial with rational coefficients; monomials are sorted variable-index multisets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly(BTreeMap<Vec<usize>, Rational>);

impl Poly {
    fn constant(c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn var(i: usize) -> Poly {
        Poly(BTreeMap::from([(vec![i], Rational::one())]))
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            let e = out.entry(m.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.remove(m);
            }
        }
        Poly(out)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut acc = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m: Vec<usize> = m1.iter().chain(m2).copied().collect();
                m.sort_unstable();
                acc = acc.add(&Poly(BTreeMap::from([(m, c1 * c2)])));
            }
        }
        acc
    }

    fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * s)).collect())
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.0.iter().map(|(m, c)| m.iter().fold(c.clone(), |acc, &i| acc * &values[i])).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.0.iter()
    }
}

/// Variable layout of a target architecture: the flattened parameters, then one `mu` per facet.
#[derive(Clone, Debug)]
struct Vars {
    names: Vec<String>,
    /// Index of `W[l][i][j]` and `b[l][i]` per layer.
    w: Vec<Vec<Vec<usize>>>,
    b: Vec<Vec<usize>>,
    mu0: usize,
}

impl Vars {
    fn new(arch: &Architecture, facets: usize) -> Vars {
        let mut names = Vec::new();
        let (mut w, mut b) = (Vec::new(), Vec::new());
        for l in 1..=arch.depth() + 1 {
            let (rows, cols) = (arch.0[l], arch.0[l - 1]);
            let mut wl = Vec::new();
            for i in 0..rows {
                wl.push(
                    (0..cols)
                        .map(|j| {
                            names.push(format!("W[{l}][{}][{}]", i + 1, j + 1));
                            names.len() - 1
                        })
                        .collect(),
                );
            }
            w.push(wl);
            b.push(
                (0..rows)
                    .map(|i| {
                        names.push(format!("b[{l}][{}]", i + 1));
                        names.len() - 1
                    })
                    .collect(),
            );
        }
        let mu0 = names.len();
        names.extend((0..facets).map(|s| format!("mu[{s}]")));
        Vars { names, w, b, mu0 }
    }
}

/// Symbolic `W^(hi) D W^(hi-1) ⋯` chains as matrices of polynomials.
type PolyMatrix = Vec<Vec<Poly>>;

fn symbolic_w(vars: &Vars, l: usize) -> PolyMatrix {
    vars.w[l - 1].iter().map(|row| row.iter().map(|&v| Poly::var(v)).collect()).collect()
}

fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols).map(|j| (0..inner).fold(Poly::default(), |acc, k| acc.add(&row[k].mul(&b[k][j])))).collect()
        })
        .collect()
}

fn mask(m: &PolyMatrix, keep: &[bool]) -> PolyMatrix {
    m.iter().zip(keep).map(|(r, &k)| if k { r.clone() } else { vec![Poly::default(); r.len()] }).collect()
}

/// `g_σ`, `t_σ` and `v_σ` of neuron `n` under active sets `s`, symbolically.
fn neuron_polys(vars: &Vars, arch: &Architecture, s: &[Vec<bool>], n: NeuronId) -> (Vec<Poly>, Poly, Vec<Poly>) {
    let d = arch.input_dim();
    // Affine map of the preactivation of layer l as [linear | constant].
    let mut lin: PolyMatrix = (0..d)
        .map(|i| (0..d).map(|j| Poly::constant(if i == j { Rational::one() } else { Rational::zero() })).collect())
        .collect();
    let mut cst: Vec<Poly> = vec![Poly::default(); d];
    for l in 1..=n.layer {
        let w = symbolic_w(vars, l);
        let (prev_lin, prev_cst) =
            if l == 1 { (lin.clone(), cst.clone()) } else { (mask(&lin, &s[l - 2]), mask_vec(&cst, &s[l - 2])) };
        lin = mat_mul(&w, &prev_lin);
        cst = w
            .iter()
            .zip(&vars.b[l - 1])
            .map(|(row, &bv)| row.iter().zip(&prev_cst).fold(Poly::var(bv), |acc, (x, c)| acc.add(&x.mul(c))))
            .collect();
    }
    let g = lin[n.index].clone();
    let t = cst[n.index].clone();
    // Forward column through the later layers.
    let mut col: Vec<Poly> = (0..arch.width(n.layer))
        .map(|i| Poly::constant(if i == n.index { Rational::one() } else { Rational::zero() }))
        .collect();
    for l in n.layer + 1..=arch.depth() + 1 {
        let w = symbolic_w(vars, l);
        let masked = if l == n.layer + 1 { col.clone() } else { mask_vec(&col, &s[l - 2]) };
        col = w
            .iter()
            .map(|row| row.iter().zip(&masked).fold(Poly::default(), |acc, (x, c)| acc.add(&x.mul(c))))
            .collect();
    }
    (g, t, col)
}

fn mask_vec(v: &[Poly], keep: &[bool]) -> Vec<Poly> {
    v.iter().zip(keep).map(|(p, &k)| if k { p.clone() } else { Poly::default() }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Alignment,
    Offset,
    Weight,
}

/// `poly = 0`, attached to one facet.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub facet: usize,
    pub kind: ConstraintKind,
    pub poly: Poly,
}

#[derive(Clone, Debug)]
pub struct ConfigurationSystem {
    pub arch: Architecture,
    pub variables: Vec<String>,
    pub facets: Vec<FacetDatum>,
    pub equations: Vec<Constraint>,
    /// Variables that must not vanish: one `mu[σ]` per facet.
    pub nonzero: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialJson {
    pub coeff: String,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintJson {
    pub facet: usize,
    pub kind: ConstraintKind,
    pub terms: Vec<MonomialJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemJson {
    pub architecture: Vec<usize>,
    pub variables: Vec<String>,
    pub facets: Vec<FacetDatum>,
    pub equations: Vec<ConstraintJson>,
    pub nonzero: Vec<String>,
}

/// The polynomial system of `config` on `data` for the target `arch`.
pub fn emit_configuration_system(
    data: &FiberData,
    arch: &Architecture,
    config: &Configuration,
) -> Result<ConfigurationSystem> {
    validate_configuration(data, arch, config)?;
    let vars = Vars::new(arch, data.facets.len());
    let mut equations = Vec::new();
    for (k, fd) in data.facets.iter().enumerate() {
        if fd.weight.len() != data.output_dim || fd.normal.len() != data.input_dim {
            return Err(Error::Shape(format!("facet {k} lacks weight or normal data")));
        }
        let n = config.phi[fd.candidate];
        let (g, t, v) = neuron_polys(&vars, arch, &config.s[k], n);
        let mu = Poly::var(vars.mu0 + k);
        for (gi, ai) in g.iter().zip(&fd.normal) {
            equations.push(Constraint { facet: k, kind: ConstraintKind::Alignment, poly: gi.add(&mu.scale(&-ai)) });
        }
        equations.push(Constraint { facet: k, kind: ConstraintKind::Offset, poly: t.add(&mu.scale(&-&fd.offset)) });
        let n4 = &fd.norm2 * &fd.norm2;
        let mu2 = mu.mul(&mu).scale(&n4);
        for (vk, wk) in v.iter().zip(&fd.weight) {
            let lhs = mu2.mul(&vk.mul(vk));
            equations.push(Constraint {
                facet: k,
                kind: ConstraintKind::Weight,
                poly: lhs.add(&Poly::constant(-(wk * wk))),
            });
        }
    }
    Ok(ConfigurationSystem {
        arch: arch.clone(),
        variables: vars.names,
        facets: data.facets.clone(),
        equations,
        nonzero: (0..data.facets.len()).map(|k| vars.mu0 + k).collect(),
    })
}

impl ConfigurationSystem {
    fn monomial(&self, m: &[usize]) -> Vec<String> {
        m.iter().map(|&i| self.variables[i].clone()).collect()
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            architecture: self.arch.0.clone(),
            variables: self.variables.clone(),
            facets: self.facets.clone(),
            equations: self
                .equations
                .iter()
                .map(|c| ConstraintJson {
                    facet: c.facet,
                    kind: c.kind,
                    terms: c
                        .poly
                        .terms()
                        .map(|(m, q)| MonomialJson { coeff: format_rational(q), vars: self.monomial(m) })
                        .collect(),
                })
                .collect(),
            nonzero: self.nonzero.iter().map(|&i| self.variables[i].clone()).collect(),
        }
    }

    /// One equation per line, `term + term + … = 0`, then the nonvanishing conditions.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.equations {
            let terms: Vec<String> = c
                .poly
                .terms()
                .map(|(m, q)| {
                    let vars = self.monomial(m).join("*");
                    match (vars.is_empty(), q.is_one()) {
                        (true, _) => format_rational(q),
                        (false, true) => vars,
                        (false, false) => format!("{}*{vars}", format_rational(q)),
                    }
                })
                .collect();
            let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            let _ = writeln!(s, "[facet {} {:?}] {body} = 0", c.facet, c.kind);
        }
        for &i in &self.nonzero {
            let _ = writeln!(s, "{} != 0", self.variables[i]);
        }
        s
    }

    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.equations.iter().filter(|c| c.kind == kind).count()
    }
}

/// Whether some nonzero `μ` satisfies the emitted system at `η`. Each `μ_σ` is solved from
/// one nonzero normal coordinate and then checked against every equation of its facet.
pub fn verify_membership(eta: &Parameter, data: &FiberData, config: &Configuration) -> Result<bool> {
    let system = emit_configuration_system(data, &eta.arch, config)?;
    let mut values = eta.flatten();
    for (k, fd) in data.facets.iter().enumerate() {
        let n = config.phi[fd.candidate];
        let sets = &config.s[k];
        let g = eta.linear_chain(1, n.layer, sets).row(n.index).to_vec();
        let j = fd.normal.iter().position(|x| !x.is_zero()).expect("facet normals are nonzero");
        let mu = &g[j] / &fd.normal[j];
        if mu.is_zero() {
            return Ok(false);
        }
        values.push(mu);
    }
    Ok(system.equations.iter().all(|c| c.poly.eval(&values).is_zero())
        && system.nonzero.iter().all(|&i| !values[i].is_zero()))
}

/// `g_σ`, `t_σ` and `v_σ` of neuron `n` evaluated on `η` under active sets `sets`.
pub fn facet_quantities(eta: &Parameter, sets: &[Vec<bool>], n: NeuronId) -> (Vec<Rational>, Rational, Vec<Rational>) {
    let pre = eta.preactivation_map(sets, n.layer);
    let v = eta.linear_chain(n.layer + 1, eta.depth() + 1, sets).col(n.index);
    (pre.a.row(n.index).to_vec(), pre.c[n.index].clone(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_identifiable, build_minimal_nonidentifiable, gl2_fiber_walk, BuildOptions};
    use crate::exact::rational::int;
    use crate::exact::Matrix;

    fn graph(n: usize, edges: &[(usize, usize)]) -> FiberData {
        FiberData { input_dim: 2, output_dim: 1, num_candidates: n, edges: edges.to_vec(), facets: Vec::new() }
    }

    fn arch(w: &[usize]) -> Architecture {
        Architecture::new(w.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let chain = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(enumerate_configurations(&chain, &arch(&[2, 1, 1, 1, 1]), 100).0.len(), 1);
        assert_eq!(enumerate_configurations(&chain, &arch(&[2, 1, 1, 1]), 100).0.len(), 0);
        assert_eq!(enumerate_configurations(&graph(2, &[]), &arch(&[2, 1, 1, 1]), 100).0.len(), 2);
        let (maps, truncated) = enumerate_configurations(&graph(2, &[]), &arch(&[2, 1, 1, 1]), 1);
        assert_eq!(maps.len(), 1);
        assert!(truncated);
        // Reversed edge direction forces the reversed layer order.
        let back = enumerate_configurations(&graph(2, &[(1, 0)]), &arch(&[2, 1, 1, 1]), 100).0;
        assert_eq!(back, vec![vec![NeuronId { layer: 2, index: 0 }, NeuronId { layer: 1, index: 0 }]]);
    }

    fn single_neuron() -> Parameter {
        Parameter::from_rows(
            &[2, 1, 1],
            vec![(vec![vec![int(1), int(2)]], vec![int(-1)]), (vec![vec![int(3)]], vec![int(0)])],
        )
        .unwrap()
    }

    #[test]
    fn one_facet_system_has_five_conditions() {
        let (data, config) = fiber_data(&single_neuron(), &Polyhedron::cube(2, &int(2))).unwrap();
        assert_eq!(data.facets.len(), 1);
        let sys = emit_configuration_system(&data, &arch(&[2, 1, 1]), &config).unwrap();
        assert_eq!(sys.count(ConstraintKind::Alignment) + sys.count(ConstraintKind::Offset), 3);
        assert_eq!(sys.count(ConstraintKind::Weight), 1);
        assert_eq!(sys.nonzero.len(), 1);
        assert!(sys.to_text().contains("mu[0] != 0"));
        assert!(verify_membership(&single_neuron(), &data, &config).unwrap());
    }

    #[test]
    fn constructed_parameter_satisfies_its_own_system() {
        let (theta, trail) = build_identifiable(&arch(&[2, 2, 2, 1]), &BuildOptions::default()).unwrap();
        let (data, config) = fiber_data(&theta, &trail.input).unwrap();
        let sys = emit_configuration_system(&data, &theta.arch, &config).unwrap();
        let d = theta.input_dim();
        assert_eq!(sys.equations.len(), data.facets.len() * (d + 1 + 1));
        // The symbolic expansion agrees with direct evaluation of each facet quantity.
        let vars = Vars::new(&theta.arch, data.facets.len());
        let values = theta.flatten();
        for (k, fd) in data.facets.iter().enumerate() {
            let n = config.phi[fd.candidate];
            let (g, t, v) = neuron_polys(&vars, &theta.arch, &config.s[k], n);
            let (g0, t0, v0) = facet_quantities(&theta, &config.s[k], n);
            assert_eq!(g.iter().map(|p| p.eval(&values)).collect::<Vec<_>>(), g0);
            assert_eq!(t.eval(&values), t0);
            assert_eq!(v.iter().map(|p| p.eval(&values)).collect::<Vec<_>>(), v0);
        }
        assert!(verify_membership(&theta, &data, &config).unwrap());
        let mut bumped = theta.clone();
        bumped.layers[2].w.row_mut(0)[0] += int(1);
        assert!(!verify_membership(&bumped, &data, &config).unwrap());
    }

    #[test]
    fn edge_order_violation_is_rejected() {
        let (theta, trail) = build_identifiable(&arch(&[2, 2, 2, 1]), &BuildOptions::default()).unwrap();
        let (data, mut config) = fiber_data(&theta, &trail.input).unwrap();
        let &(u, v) = data.edges.first().expect("a layered graph has edges");
        config.phi.swap(u, v);
        assert!(emit_configuration_system(&data, &theta.arch, &config).is_err());
    }

    #[test]
    fn linear_block_walk_stays_in_the_configuration_set() {
        let (theta, block) = build_minimal_nonidentifiable(&arch(&[2, 2, 4, 2]), &BuildOptions::default()).unwrap();
        let p = Polyhedron::cube(2, &int(1));
        let (data, config) = fiber_data(&theta, &p).unwrap();
        let shear = Matrix::from_rows(2, vec![vec![int(1), int(1)], vec![int(0), int(1)]]);
        let eta = gl2_fiber_walk(&theta, &block, &shear).unwrap();
        assert!(verify_membership(&eta, &data, &config).unwrap());
    }
}
