use num_traits::{Signed, Zero};
use serde::Serialize;

use super::identifiable::{generic_output, slab_stack, BuildOptions, MAX_OUTPUT_RESAMPLES};
use super::slab::{make_slab_layer, pivot_hyperplane, PreviousSlab, SlabSite};
use crate::error::{Error, Result};
use crate::exact::{format_rational, Matrix, Polyhedron, Rational};
use crate::net::{Architecture, Layer, Parameter};
use crate::random::{rng, signed_unit, Rng64};

/// The two always-active neurons of the last hidden layer and their output columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearBlock {
    /// Hidden layer `L` holding the block.
    pub layer: usize,
    /// Zero-based indices of the two linear neurons in that layer.
    pub neurons: [usize; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearBlockJson {
    pub layer: usize,
    pub neurons: [usize; 2],
    /// `[W_lin | b_lin]`, one row per linear neuron.
    pub w_lin: Vec<Vec<String>>,
    /// `V_lin`, the two output columns side by side.
    pub v_lin: Vec<Vec<String>>,
}

fn strings(m: &Matrix) -> Vec<Vec<String>> {
    m.rows_vec().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

impl LinearBlock {
    /// `[W_lin | b_lin]` as a `2 × (n_{L-1} + 1)` matrix.
    pub fn w_lin(&self, theta: &Parameter) -> Matrix {
        let (w, b) = (theta.w(self.layer), theta.b(self.layer));
        let rows = self.neurons.iter().map(|&i| w.row(i).iter().cloned().chain([b[i].clone()]).collect()).collect();
        Matrix::from_rows(w.ncols() + 1, rows)
    }

    /// `V_lin` as an `m × 2` matrix.
    pub fn v_lin(&self, theta: &Parameter) -> Matrix {
        theta.w(self.layer + 1).select_cols(&self.neurons)
    }

    pub fn to_json(&self, theta: &Parameter) -> LinearBlockJson {
        LinearBlockJson {
            layer: self.layer,
            neurons: self.neurons,
            w_lin: strings(&self.w_lin(theta)),
            v_lin: strings(&self.v_lin(theta)),
        }
    }
}

fn precondition(arch: &Architecture) -> Result<()> {
    let depth = arch.depth();
    if depth < 2 {
        return Err(Error::Precondition(format!("{arch} needs at least two hidden layers")));
    }
    if let Some(i) = (0..depth).find(|&i| arch.0[i] < 2) {
        return Err(Error::Precondition(format!("layer {i} of {arch} is narrower than 2")));
    }
    if arch.width(depth) < 4 {
        return Err(Error::Precondition(format!("the last hidden layer of {arch} needs at least 4 neurons")));
    }
    Ok(())
}

fn positive_unit(rng: &mut Rng64) -> Rational {
    loop {
        let x = signed_unit(rng).abs();
        if !x.is_zero() {
            return x;
        }
    }
}

/// A generic parameter whose last hidden layer is a slab of `n_L − 2` neurons following the
/// pivot of an identifiable prefix, plus two neurons with entrywise positive weights and biases.
/// Those two see only nonnegative inputs, so they are active everywhere and form a linear block
/// whose output columns have rank 2.
pub fn build_minimal_nonidentifiable(arch: &Architecture, opts: &BuildOptions) -> Result<(Parameter, LinearBlock)> {
    precondition(arch)?;
    let depth = arch.depth();
    let input = Polyhedron::cube(arch.input_dim(), &opts.radius);
    let mut g = rng(opts.seed);
    let (mut layers, stages) = slab_stack(&arch.0[..depth], &input, &opts.radius, &opts.eps, &mut g)?;
    let last = stages.last().expect("at least one stage");
    let site = SlabSite {
        prefix: &layers[..depth - 2],
        input: &input,
        polytope: &last.polytope,
        map: &last.map,
        previous: None,
    };
    let pivot = pivot_hyperplane(&site, &last.slab)?;
    let map = last.map.then(&layers[depth - 2]);
    let previous = PreviousSlab { polytope: &last.polytope, map: &last.map, layer: &layers[depth - 2] };
    let next =
        SlabSite { prefix: &layers, input: &input, polytope: &pivot.region, map: &map, previous: Some(previous) };
    let slab = make_slab_layer(&next, &pivot.hyperplane, arch.width(depth) - 2, &opts.eps, &mut g)?;

    let cols = arch.width(depth - 1);
    let mut w = slab.layer.w.rows_vec();
    let mut b = slab.layer.b.clone();
    for _ in 0..2 {
        w.push((0..cols).map(|_| positive_unit(&mut g)).collect());
        b.push(positive_unit(&mut g));
    }
    layers.push(Layer { w: Matrix::from_rows(cols, w), b });
    let n = arch.width(depth);
    let block = LinearBlock { layer: depth, neurons: [n - 2, n - 1] };
    for _ in 0..MAX_OUTPUT_RESAMPLES {
        let (theta, _) = generic_output(arch, layers.clone(), &input, opts.seed, &mut g)?;
        if block.v_lin(&theta).rank() == 2 {
            return Ok((theta, block));
        }
    }
    Err(Error::Construction("no output layer with a rank-2 linear block".into()))
}

/// `W_lin ↦ M·W_lin`, `V_lin ↦ V_lin·M⁻¹`. The function is unchanged wherever both linear
/// neurons stay active, which the positivity of the new augmented rows guarantees.
pub fn gl2_fiber_walk(theta: &Parameter, block: &LinearBlock, m: &Matrix) -> Result<Parameter> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::Shape(format!("M is {}x{}, expected 2x2", m.nrows(), m.ncols())));
    }
    let inv = m.inverse().ok_or_else(|| Error::Precondition("M is singular".into()))?;
    let w_new = m.mul(&block.w_lin(theta));
    if w_new.rows_vec().iter().flatten().any(|x| !x.is_positive()) {
        return Err(Error::Precondition("the moved linear rows are not entrywise positive".into()));
    }
    let v_new = block.v_lin(theta).mul(&inv);
    let mut out = theta.clone();
    let cols = theta.w(block.layer).ncols();
    let hidden = &mut out.layers[block.layer - 1];
    for (k, &i) in block.neurons.iter().enumerate() {
        let row = w_new.row(k);
        hidden.w.row_mut(i).clone_from_slice(&row[..cols]);
        hidden.b[i] = row[cols].clone();
    }
    let output = &mut out.layers[block.layer];
    for (k, &i) in block.neurons.iter().enumerate() {
        output.w.set_col(i, &v_new.col(k));
    }
    Ok(out)
}
