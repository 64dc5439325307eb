use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;

use super::Verdict;
use crate::complex::Complex;
use crate::error::Result;
use crate::exact::Polyhedron;
use crate::net::{NeuronId, Parameter};
use crate::tropical::{breakpoint_complex, BreakpointComplex};

/// A connected piece of one neuron's visible bent hyperplane.
#[derive(Clone, Debug)]
struct Piece {
    facets: Vec<usize>,
    ridges: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct CtpicResult {
    pub verdict: Verdict,
    /// Facets of the chosen connected piece per neuron, when the check passes.
    pub chosen: BTreeMap<NeuronId, Vec<usize>>,
}

fn pieces(cx: &Complex, bp: &BreakpointComplex, n: NeuronId) -> Vec<Piece> {
    let facets: Vec<usize> = bp.facets.iter().copied().filter(|&f| cx.facets[f].incident.contains(&n)).collect();
    let mut uf = UnionFind::<usize>::new(facets.len());
    for a in 0..facets.len() {
        for b in a + 1..facets.len() {
            let ra = &cx.facets[facets[a]].ridges;
            if cx.facets[facets[b]].ridges.iter().any(|r| ra.contains(r)) {
                uf.union(a, b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Piece> = BTreeMap::new();
    for (k, &f) in facets.iter().enumerate() {
        let p = groups.entry(uf.find(k)).or_insert_with(|| Piece { facets: Vec::new(), ridges: BTreeSet::new() });
        p.facets.push(f);
        p.ridges.extend(cx.facets[f].ridges.iter().copied());
    }
    let mut out: Vec<Piece> = groups.into_values().collect();
    out.sort_by(|a, b| b.facets.len().cmp(&a.facets.len()).then(a.facets.cmp(&b.facets)));
    out
}

fn cross(a: &Piece, b: &Piece) -> bool {
    !a.ridges.is_disjoint(&b.ridges)
}

const SEARCH_LIMIT: usize = 1_000_000;

/// cTPIC on the domain of `cx`: every hidden neuron gets one connected visible piece, and the
/// pieces of every adjacent-layer pair share a ridge. The largest pieces are tried first, then
/// every combination.
pub fn ctpic_on(cx: &Complex, bp: &BreakpointComplex) -> CtpicResult {
    let theta = &cx.theta;
    let depth = theta.depth();
    let neurons = theta.arch.neurons();
    if depth < 2 {
        let v = Verdict::pass("cTPIC").with_note("a single hidden layer has no adjacent pairs");
        return CtpicResult { verdict: v, chosen: BTreeMap::new() };
    }
    let options: BTreeMap<NeuronId, Vec<Piece>> = neurons.iter().map(|&n| (n, pieces(cx, bp, n))).collect();
    let missing: Vec<String> =
        options.iter().filter(|(_, p)| p.is_empty()).map(|(n, _)| format!("{n} has no visible facets")).collect();
    if !missing.is_empty() {
        return CtpicResult { verdict: Verdict::fail("cTPIC", missing), chosen: BTreeMap::new() };
    }
    let layer = |l: usize| -> Vec<NeuronId> { neurons.iter().copied().filter(|n| n.layer == l).collect() };
    let pairs_fail = |choice: &BTreeMap<NeuronId, usize>| -> Vec<String> {
        let mut bad = Vec::new();
        for l in 1..depth {
            for a in layer(l) {
                for b in layer(l + 1) {
                    if !cross(&options[&a][choice[&a]], &options[&b][choice[&b]]) {
                        bad.push(format!("{a} and {b} do not cross"));
                    }
                }
            }
        }
        bad
    };
    let greedy: BTreeMap<NeuronId, usize> = neurons.iter().map(|&n| (n, 0)).collect();
    let first_failures = pairs_fail(&greedy);
    let found = if first_failures.is_empty() {
        Some(greedy)
    } else {
        let mut choice = BTreeMap::new();
        let mut budget = SEARCH_LIMIT;
        search(&neurons, 0, &options, &mut choice, &mut budget).then_some(choice)
    };
    match found {
        Some(choice) => {
            let chosen = choice.iter().map(|(n, &k)| (*n, options[n][k].facets.clone())).collect();
            CtpicResult { verdict: Verdict::pass("cTPIC"), chosen }
        }
        None => CtpicResult { verdict: Verdict::fail("cTPIC", first_failures), chosen: BTreeMap::new() },
    }
}

/// Backtracking over piece choices in layer order; a choice is checked against the previous layer.
fn search(
    neurons: &[NeuronId],
    k: usize,
    options: &BTreeMap<NeuronId, Vec<Piece>>,
    choice: &mut BTreeMap<NeuronId, usize>,
    budget: &mut usize,
) -> bool {
    let Some(&n) = neurons.get(k) else { return true };
    for c in 0..options[&n].len() {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let ok = choice
            .iter()
            .filter(|(m, _)| m.layer + 1 == n.layer)
            .all(|(m, &cm)| cross(&options[m][cm], &options[&n][c]));
        if ok {
            choice.insert(n, c);
            if search(neurons, k + 1, options, choice, budget) {
                return true;
            }
            choice.remove(&n);
        }
    }
    false
}

/// cTPIC on the polytope `p`, using the canonical complex built on `p`.
pub fn ctpic_check(theta: &Parameter, p: &Polyhedron) -> Result<CtpicResult> {
    let cx = Complex::build(theta, p)?;
    let bp = breakpoint_complex(&cx)?;
    Ok(ctpic_on(&cx, &bp))
}
