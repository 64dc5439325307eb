use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{region_levels, Region};
use crate::error::{Error, Result};
use crate::exact::arrangement::enumerate_vertices;
use crate::exact::rational::to_f64;
use crate::exact::{Point, Polyhedron, Rational};
use crate::net::{Architecture, Parameter};
use crate::random::{rng, Rng64, DENOMINATOR};

/// Relative singular-value cutoff for the numeric rank.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Samples whose hidden preactivations come closer to zero than this are redrawn.
const KINK_TOLERANCE: f64 = 1e-9;
const MAX_REDRAWS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalDimension {
    pub rank: usize,
    pub expected: usize,
    pub samples: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `σ_rank / σ_{rank+1}`; absent when the Jacobian has full column rank.
    pub gap: Option<f64>,
}

/// `Σ n_l n_{l-1} + n_{L+1}`, which equals the parameter count minus the number of hidden neurons.
pub fn expected_functional_dimension(arch: &Architecture) -> usize {
    arch.num_params() - arch.num_hidden()
}

/// Jacobian of `θ ↦ f_θ(x)` at `θ`, one row per output coordinate, columns in flatten order.
/// Computed by backpropagation in floating point; a neuron with zero preactivation counts as off.
pub fn jacobian(theta: &Parameter, x: &[Rational]) -> Vec<Vec<f64>> {
    let w: Vec<Vec<Vec<f64>>> = theta.layers.iter().map(|l| l.w.to_f64()).collect();
    let b: Vec<Vec<f64>> = theta.layers.iter().map(|l| l.b.iter().map(to_f64).collect()).collect();
    let depth = theta.depth();
    let mut acts: Vec<Vec<f64>> = vec![x.iter().map(to_f64).collect()];
    let mut live: Vec<Vec<bool>> = Vec::new();
    let trace = theta.trace(x);
    for l in 0..depth {
        let on: Vec<bool> = trace.pre[l].iter().map(num_traits::Signed::is_positive).collect();
        let z: Vec<f64> =
            (0..w[l].len()).map(|i| w[l][i].iter().zip(&acts[l]).map(|(a, v)| a * v).sum::<f64>() + b[l][i]).collect();
        acts.push(z.iter().zip(&on).map(|(&z, &o)| if o { z } else { 0.0 }).collect());
        live.push(on);
    }
    let offsets: Vec<usize> = {
        let mut o = vec![0];
        for l in &theta.layers {
            o.push(o.last().unwrap() + l.w.nrows() * l.w.ncols() + l.b.len());
        }
        o
    };
    let m = theta.arch.output_dim();
    (0..m)
        .map(|out| {
            let mut row = vec![0.0; *offsets.last().unwrap()];
            let mut delta: Vec<f64> = (0..m).map(|k| if k == out { 1.0 } else { 0.0 }).collect();
            for l in (0..=depth).rev() {
                let (rows, cols) = (w[l].len(), acts[l].len());
                for i in 0..rows {
                    for j in 0..cols {
                        row[offsets[l] + i * cols + j] = delta[i] * acts[l][j];
                    }
                    row[offsets[l] + rows * cols + i] = delta[i];
                }
                if l > 0 {
                    delta = (0..cols)
                        .map(|j| if live[l - 1][j] { (0..rows).map(|i| w[l][i][j] * delta[i]).sum() } else { 0.0 })
                        .collect();
                }
            }
            row
        })
        .collect()
}

fn grid(rng: &mut Rng64) -> Rational {
    Rational::new(rng.gen_range(1..DENOMINATOR).into(), DENOMINATOR.into())
}

/// A random point strictly inside `r`: a random convex combination of its vertices pulled toward
/// an interior point.
fn point_in_region(rng: &mut Rng64, r: &Region, center: &Point) -> Point {
    let verts = match r.cell.vertices() {
        Some(v) => v.to_vec(),
        None => enumerate_vertices(&r.cell.poly),
    };
    if verts.is_empty() {
        return center.clone();
    }
    let weights: Vec<Rational> = verts.iter().map(|_| grid(rng)).collect();
    let total: Rational = weights.iter().sum();
    let t = grid(rng);
    (0..center.len())
        .map(|k| {
            let combo: Rational = verts.iter().zip(&weights).map(|(v, w)| &v[k] * w).sum::<Rational>() / &total;
            &center[k] + (combo - &center[k]) * &t
        })
        .collect()
}

fn near_kink(theta: &Parameter, x: &[Rational]) -> bool {
    let t = theta.trace(x);
    t.pre[..theta.depth()].iter().flatten().any(|z| to_f64(z).abs() < KINK_TOLERANCE && !num_traits::Zero::is_zero(z))
}

/// Numeric rank of the stacked parameter Jacobian at `samples` rational points of `domain`.
/// Points are spread round-robin over the linear regions of `θ` on `domain`, so thin regions
/// are sampled too.
pub fn functional_dimension_estimate(
    theta: &Parameter,
    domain: &Polyhedron,
    samples: usize,
    seed: u64,
) -> Result<FunctionalDimension> {
    let regions = region_levels(theta, domain)?.pop().expect("at least one level");
    if regions.is_empty() {
        return Err(Error::Degenerate("domain has no full-dimensional region".into()));
    }
    let centers: Vec<Point> = regions.iter().map(Region::interior_point).collect();
    let mut rng = rng(seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for s in 0..samples {
        let k = s % regions.len();
        let mut x = point_in_region(&mut rng, &regions[k], &centers[k]);
        let mut redraws = 0;
        while near_kink(theta, &x) {
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(Error::Degenerate(format!("samples in region {k} keep landing on a kink")));
            }
            x = point_in_region(&mut rng, &regions[k], &centers[k]);
        }
        rows.extend(jacobian(theta, &x));
    }
    let cols = theta.arch.num_params();
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > RANK_CUTOFF * top).count();
    let gap = sv.get(rank).map(|&next| if rank == 0 { 0.0 } else { sv[rank - 1] / next });
    Ok(FunctionalDimension {
        rank,
        expected: expected_functional_dimension(&theta.arch),
        samples,
        singular_values: sv,
        gap,
    })
}
