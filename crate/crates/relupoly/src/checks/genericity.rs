use rand::Rng;
use rayon::prelude::*;

use super::{Status, Verdict};
use crate::complex::region_levels;
use crate::error::Result;
use crate::exact::arrangement::{enumerate_vertices, generic_arrangement_in};
use crate::exact::{Point, Polyhedron};
use crate::net::{pattern_string, Parameter};
use crate::random::rng;

/// Above this many subset sequences in total the rank condition is sampled.
pub const RANK_EXHAUSTIVE_LIMIT: u64 = 1 << 16;
const SAMPLES_PER_PAIR: u64 = 1024;

/// Vertices of a region that are not created by the working domain.
fn region_vertices(cell: &crate::exact::Cell, domain: &Polyhedron) -> Vec<Point> {
    let all = match cell.vertices() {
        Some(v) => v.to_vec(),
        None => enumerate_vertices(&cell.poly),
    };
    all.into_iter().filter(|v| domain.ineqs.iter().all(|f| !num_traits::Zero::is_zero(&f.eval(v)))).collect()
}

/// For every layer `l` and region `R` of the complex of layers `1..l-1`, the layer-`l` zero sets
/// on `R` form a generic arrangement after essentialization and miss the vertices of `R`.
/// Only regions meeting `domain` are visited.
pub fn region_condition(theta: &Parameter, domain: &Polyhedron) -> Result<Vec<String>> {
    let levels = region_levels(theta, domain)?;
    let d = theta.input_dim();
    let mut out = Vec::new();
    for l in 1..=theta.depth() {
        let layer = &theta.layers[l - 1];
        let defects: Vec<String> = levels[l - 1]
            .par_iter()
            .filter_map(|r| {
                let forms = r.act.then(layer).forms();
                let verts = region_vertices(&r.cell, domain);
                generic_arrangement_in(d, &[], &forms, &verts)
                    .err()
                    .map(|e| format!("layer {l}, region [{}]: {e:?}", pattern_string(&r.pattern)))
            })
            .collect();
        out.extend(defects);
    }
    Ok(out)
}

fn describe(sets: &[Vec<bool>], k: usize, l: usize) -> String {
    let parts: Vec<String> = (k..l)
        .map(|i| {
            let idx: Vec<String> =
                sets[i - 1].iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| (j + 1).to_string()).collect();
            format!("{{{}}}", idx.join(","))
        })
        .collect();
    format!("({})", parts.join(","))
}

/// Products `W^l D_{S_{l-1}} ⋯ D_{S_k} W^k` must reach rank `min(n_{k-1}, n_l, min |S_i|)`.
/// Returns the witnesses and whether every subset sequence was visited.
pub fn rank_condition(theta: &Parameter, seed: u64) -> (Vec<String>, bool) {
    let widths = &theta.arch.0;
    let top = theta.depth() + 1;
    let bits = |k: usize, l: usize| -> u32 { (k..l).map(|i| widths[i] as u32).sum() };
    let total: u64 =
        (1..=top).flat_map(|k| (k..=top).map(move |l| (k, l))).map(|(k, l)| 1u64 << bits(k, l).min(63)).sum();
    let exhaustive = total <= RANK_EXHAUSTIVE_LIMIT;
    let mut rng = rng(seed);
    let mut witnesses = Vec::new();
    for k in 1..=top {
        for l in k..=top {
            let b = bits(k, l);
            let masks: Vec<u64> = if exhaustive || b < 10 {
                (0..1u64 << b).collect()
            } else {
                (0..SAMPLES_PER_PAIR).map(|_| rng.gen::<u64>() & ((1u64 << b.min(63)) - 1)).collect()
            };
            let found: Option<String> = masks.par_iter().find_map_first(|&mask| {
                let mut sets: Vec<Vec<bool>> = (1..=theta.depth()).map(|i| vec![true; widths[i]]).collect();
                let mut off = 0;
                for i in k..l {
                    for (j, s) in sets[i - 1].iter_mut().enumerate() {
                        *s = mask >> (off + j) & 1 == 1;
                    }
                    off += widths[i];
                }
                let min_s = (k..l).map(|i| sets[i - 1].iter().filter(|&&x| x).count()).min().unwrap_or(usize::MAX);
                let expected = widths[k - 1].min(widths[l]).min(min_s);
                let rank = theta.linear_chain(k, l, &sets).rank();
                (rank < expected)
                    .then(|| format!("W^{l}..W^{k} with S = {} has rank {rank} < {expected}", describe(&sets, k, l)))
            });
            witnesses.extend(found);
        }
    }
    (witnesses, exhaustive)
}

/// Both genericity conditions; condition 1 inside `domain`.
pub fn genericity_check(theta: &Parameter, domain: &Polyhedron, seed: u64) -> Result<Verdict> {
    let mut witnesses = region_condition(theta, domain)?;
    let (rank, exhaustive) = rank_condition(theta, seed);
    witnesses.extend(rank);
    let mut v = Verdict::from_witnesses("generic", witnesses);
    if !exhaustive {
        v = v.with_note(format!("rank condition sampled with {SAMPLES_PER_PAIR} subset sequences per layer pair"));
        if v.status == Status::Pass {
            v.status = Status::ProbabilisticPass;
        }
    }
    Ok(v)
}
