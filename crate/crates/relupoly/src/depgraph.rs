//! Candidate bent hyperplanes from classified ridges, and the dependency graph between them.
//!
//! Everything here is read off the function alone, from the weighted breakpoint facets and the
//! regions where the output is constant. Neuron incidences from the complex are only used to
//! label vertices with ground truth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::Result;
use crate::net::{Architecture, NeuronId};
use crate::tropical::{breakpoint_complex, weights_equal, BreakpointComplex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RidgeKind {
    NonBending,
    /// `earlier` lies on the bent hyperplane that `later` bends along.
    Bending {
        earlier: Vec<usize>,
        later: Vec<usize>,
    },
    /// Star shapes that the bending rules do not cover; no merges or edges are drawn.
    Ambiguous {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RidgeClass {
    pub ridge: usize,
    /// Breakpoint facets around the ridge.
    pub star: Vec<usize>,
    #[serde(flatten)]
    pub kind: RidgeKind,
}

impl RidgeClass {
    pub fn is_bending(&self) -> bool {
        matches!(self.kind, RidgeKind::Bending { .. })
    }
}

fn opposite(cx: &Complex, a: usize, b: usize) -> bool {
    a != b && cx.facets[a].hyperplane == cx.facets[b].hyperplane
}

fn touches_constant_region(cx: &Complex, f: usize) -> bool {
    cx.facets[f].regions.iter().any(|&r| cx.regions[r].output.as_ref().is_some_and(|m| m.a.is_zero()))
}

/// Classifies ridge `r` of the breakpoint complex.
pub fn classify_ridge(cx: &Complex, bp: &BreakpointComplex, r: usize) -> RidgeClass {
    let star = bp.star(cx, r);
    let class = |kind| RidgeClass { ridge: r, star: star.clone(), kind };
    let partner = |f: usize| star.iter().copied().find(|&g| opposite(cx, f, g));
    let straight = star.iter().all(|&f| partner(f).is_some_and(|g| weights_equal(&bp.weights[f], &bp.weights[g])));
    if straight {
        return class(RidgeKind::NonBending);
    }
    let full = &cx.ridges[r];
    if full.facets.len() != 4 || full.regions.len() != 4 {
        return class(RidgeKind::Ambiguous {
            reason: format!("{} facets and {} regions meet at the ridge", full.facets.len(), full.regions.len()),
        });
    }
    let earlier: Vec<usize> = match star.len() {
        4 => {
            let pairs: Vec<(usize, usize)> = star
                .iter()
                .flat_map(|&a| star.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a < b && opposite(cx, a, b))
                .collect();
            match pairs.as_slice() {
                [(a, b)] => vec![*a, *b],
                _ => {
                    return class(RidgeKind::Ambiguous { reason: format!("{} opposite pairs", pairs.len()) });
                }
            }
        }
        3 => {
            let free: Vec<usize> = star.iter().copied().filter(|&f| !touches_constant_region(cx, f)).collect();
            match free.as_slice() {
                [f] => vec![*f],
                _ => {
                    return class(RidgeKind::Ambiguous {
                        reason: format!("{} facets avoid constant regions", free.len()),
                    });
                }
            }
        }
        n => return class(RidgeKind::Ambiguous { reason: format!("{n} breakpoint facets") }),
    };
    let later = star.iter().copied().filter(|f| !earlier.contains(f)).collect();
    class(RidgeKind::Bending { earlier, later })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Bending ridges witnessing the edge.
    pub ridges: Vec<usize>,
}

/// Candidate bent hyperplanes with bend-precedence edges.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DependencyGraph {
    /// Facet ids of each candidate, sorted; candidates ordered by their smallest facet.
    pub candidates: Vec<Vec<usize>>,
    pub edges: Vec<Edge>,
    pub ridge_classes: Vec<RidgeClass>,
}

impl DependencyGraph {
    /// Builds the graph of the function computed on the whole complex.
    pub fn build(cx: &Complex) -> Result<DependencyGraph> {
        let bp = breakpoint_complex(cx)?;
        Ok(Self::from_breakpoints(cx, &bp))
    }

    pub fn from_breakpoints(cx: &Complex, bp: &BreakpointComplex) -> DependencyGraph {
        let classes: Vec<RidgeClass> = bp.ridges.iter().map(|&r| classify_ridge(cx, bp, r)).collect();
        let candidates = candidate_bent_hyperplanes(cx, bp, &classes);
        let mut owner = BTreeMap::new();
        for (i, c) in candidates.iter().enumerate() {
            for &f in c {
                owner.insert(f, i);
            }
        }
        let mut witnessed: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for rc in &classes {
            if let RidgeKind::Bending { earlier, later } = &rc.kind {
                let (u, v) = (owner[&earlier[0]], owner[&later[0]]);
                if u != v {
                    witnessed.entry((u, v)).or_default().push(rc.ridge);
                }
            }
        }
        let edges = witnessed.into_iter().map(|((from, to), ridges)| Edge { from, to, ridges }).collect();
        DependencyGraph { candidates, edges, ridge_classes: classes }
    }

    pub fn num_vertices(&self) -> usize {
        self.candidates.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|e| e.from == u && e.to == v)
    }

    pub fn successors(&self, u: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.from == u).map(|e| e.to).collect()
    }

    pub fn candidate_of(&self, facet: usize) -> Option<usize> {
        self.candidates.iter().position(|c| c.contains(&facet))
    }

    /// Neurons incident to the facets of each candidate.
    pub fn ground_truth(&self, cx: &Complex) -> Vec<BTreeSet<NeuronId>> {
        self.candidates
            .iter()
            .map(|c| c.iter().flat_map(|&f| cx.facets[f].incident.iter().copied()).collect())
            .collect()
    }

    /// The candidate whose facets are exactly the visible facets of neuron `n`, if any.
    pub fn candidate_of_neuron(&self, cx: &Complex, n: NeuronId) -> Option<usize> {
        let truth = self.ground_truth(cx);
        let hits: Vec<usize> = (0..truth.len()).filter(|&i| truth[i].contains(&n)).collect();
        match hits.as_slice() {
            [i] => Some(*i),
            _ => None,
        }
    }

    /// Graphviz text. With `truth`, every vertex is labelled by its incident neurons.
    pub fn to_dot(&self, truth: Option<&[BTreeSet<NeuronId>]>) -> String {
        let mut s = String::from("digraph dependency {\n  rankdir=LR;\n  node [shape=ellipse];\n");
        for (i, c) in self.candidates.iter().enumerate() {
            let mut label = format!("c{i}\\n{} facets", c.len());
            let mut layer_attr = String::new();
            if let Some(t) = truth {
                let names: Vec<String> = t[i].iter().map(|n| n.to_string()).collect();
                let _ = write!(label, "\\n{}", names.join(","));
                let layers: BTreeSet<usize> = t[i].iter().map(|n| n.layer).collect();
                if let [l] = layers.iter().copied().collect::<Vec<_>>().as_slice() {
                    let _ = write!(layer_attr, ", layer={l}");
                }
            }
            let _ = writeln!(s, "  c{i} [label=\"{label}\"{layer_attr}];");
        }
        for e in &self.edges {
            let ridges: Vec<String> = e.ridges.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, "  c{} -> c{} [label=\"ridges {}\"];", e.from, e.to, ridges.join(","));
        }
        s.push_str("}\n");
        s
    }
}

/// Union-find over breakpoint facets: opposite equal-weight facets merge at non-bending ridges,
/// and facets on the same side of the bending rule merge at bending ridges.
pub fn candidate_bent_hyperplanes(cx: &Complex, bp: &BreakpointComplex, classes: &[RidgeClass]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(cx.facets.len());
    for rc in classes {
        match &rc.kind {
            RidgeKind::NonBending => {
                for &a in &rc.star {
                    for &b in &rc.star {
                        if a < b && opposite(cx, a, b) && weights_equal(&bp.weights[a], &bp.weights[b]) {
                            uf.union(a, b);
                        }
                    }
                }
            }
            RidgeKind::Bending { earlier, later } => {
                for group in [earlier, later] {
                    for w in group.windows(2) {
                        uf.union(w[0], w[1]);
                    }
                }
            }
            RidgeKind::Ambiguous { .. } => {}
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &f in &bp.facets {
        groups.entry(uf.find(f)).or_default().push(f);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Assignment of hidden neurons to candidates such that every neuron of layer `l` has an edge to
/// every neuron of layer `l + 1`. Returned as `assignment[l - 1][j]`.
pub fn layered_subgraph(g: &DependencyGraph, arch: &Architecture) -> Option<Vec<Vec<usize>>> {
    let widths = arch.hidden_widths().to_vec();
    let slots: Vec<(usize, usize)> =
        widths.iter().enumerate().flat_map(|(l, &w)| (0..w).map(move |j| (l, j))).collect();
    let mut assign: Vec<Vec<usize>> = widths.iter().map(|&w| vec![usize::MAX; w]).collect();
    let mut used = vec![false; g.num_vertices()];
    fn go(
        g: &DependencyGraph,
        slots: &[(usize, usize)],
        k: usize,
        assign: &mut Vec<Vec<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let Some(&(l, j)) = slots.get(k) else { return true };
        for v in 0..g.num_vertices() {
            if used[v] {
                continue;
            }
            // Within a layer candidates are taken in increasing order to skip permutations.
            if j > 0 && v < assign[l][j - 1] {
                continue;
            }
            if l > 0 && !assign[l - 1].iter().all(|&u| g.has_edge(u, v)) {
                continue;
            }
            used[v] = true;
            assign[l][j] = v;
            if go(g, slots, k + 1, assign, used) {
                return true;
            }
            used[v] = false;
        }
        assign[l][j] = usize::MAX;
        false
    }
    go(g, &slots, 0, &mut assign, &mut used).then_some(assign)
}

pub fn layered_subgraph_check(g: &DependencyGraph, arch: &Architecture) -> bool {
    layered_subgraph(g, arch).is_some()
}

/// Longest simple directed path, by exhaustive search.
pub fn longest_chain(g: &DependencyGraph) -> Vec<usize> {
    fn go(g: &DependencyGraph, path: &mut Vec<usize>, on: &mut [bool], best: &mut Vec<usize>) {
        if path.len() > best.len() {
            *best = path.clone();
        }
        let u = *path.last().expect("nonempty");
        for v in g.successors(u) {
            if !on[v] {
                on[v] = true;
                path.push(v);
                go(g, path, on, best);
                path.pop();
                on[v] = false;
            }
        }
    }
    let mut best = Vec::new();
    let mut on = vec![false; g.num_vertices()];
    for s in 0..g.num_vertices() {
        on[s] = true;
        go(g, &mut vec![s], &mut on, &mut best);
        on[s] = false;
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DepthCertificate {
    /// No chain with more than `L'` candidates was found.
    Accept,
    /// A chain of candidates that no network with `L'` hidden layers can order.
    Reject { chain: Vec<usize> },
}

/// Rejects when the graph has a directed chain of more than `layers` candidates.
pub fn depth_certificate(g: &DependencyGraph, layers: usize) -> DepthCertificate {
    let chain = longest_chain(g);
    if chain.len() > layers {
        DepthCertificate::Reject { chain }
    } else {
        DepthCertificate::Accept
    }
}

#[cfg(test)]
mod tests;
