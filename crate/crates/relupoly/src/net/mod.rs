//! Fully connected ReLU networks with exact rational parameters.

mod json;
mod symmetry;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{AffineForm, Matrix, Point, Rational};

pub use json::{LayerJson, NetworkJson};
pub use symmetry::{canonicalize, equivalent_mod_symmetries, Symmetry};

/// Layer widths `(n_0, n_1, …, n_L, n_{L+1})`: input, hidden layers, output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Architecture(pub Vec<usize>);

impl Architecture {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::Shape(format!("invalid architecture {widths:?}")));
        }
        Ok(Architecture(widths))
    }

    pub fn input_dim(&self) -> usize {
        self.0[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.0.len() - 2
    }

    /// Width of layer `l`, with `l = 0` the input and `l = L + 1` the output.
    pub fn width(&self, l: usize) -> usize {
        self.0[l]
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.0[1..self.0.len() - 1]
    }

    pub fn num_params(&self) -> usize {
        self.0.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }

    pub fn num_hidden(&self) -> usize {
        self.hidden_widths().iter().sum()
    }

    /// All hidden neurons, layer by layer.
    pub fn neurons(&self) -> Vec<NeuronId> {
        (1..=self.depth()).flat_map(|l| (0..self.width(l)).map(move |i| NeuronId { layer: l, index: i })).collect()
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A hidden neuron: `layer` in `1..=L`, `index` zero-based within the layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct NeuronId {
    pub layer: usize,
    pub index: usize,
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}.{}", self.layer, self.index + 1)
    }
}

/// Sign of a preactivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(x: &Rational) -> Sign {
        if x.is_positive() {
            Sign::Pos
        } else if x.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }

    pub fn is_active(self) -> bool {
        self == Sign::Pos
    }
}

/// Signs of every hidden neuron, indexed `[layer - 1][index]`.
pub type SignPattern = Vec<Vec<Sign>>;

pub fn pattern_string(p: &SignPattern) -> String {
    p.iter().map(|l| l.iter().map(|s| s.symbol()).collect::<String>()).collect::<Vec<_>>().join("|")
}

/// Strictly active sets `S_l` of a sign pattern.
pub fn active_sets(p: &SignPattern) -> Vec<Vec<bool>> {
    p.iter().map(|l| l.iter().map(|s| s.is_active()).collect()).collect()
}

/// `W` is `n_l × n_{l-1}`, `b` has length `n_l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    pub w: Matrix,
    pub b: Vec<Rational>,
}

/// An affine map `x ↦ A x + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub a: Matrix,
    pub c: Vec<Rational>,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        AffineMap { a: Matrix::identity(d), c: vec![Rational::zero(); d] }
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.a.mul_vec(x).into_iter().zip(&self.c).map(|(y, c)| y + c).collect()
    }

    /// `layer ∘ self`, the preactivation of the next layer.
    pub fn then(&self, layer: &Layer) -> AffineMap {
        let a = layer.w.mul(&self.a);
        let c = layer.w.mul_vec(&self.c).into_iter().zip(&layer.b).map(|(x, b)| x + b).collect();
        AffineMap { a, c }
    }

    /// Zeroes the coordinates outside `keep`.
    pub fn masked(&self, keep: &[bool]) -> AffineMap {
        let c = self.c.iter().zip(keep).map(|(x, &k)| if k { x.clone() } else { Rational::zero() }).collect();
        AffineMap { a: self.a.mask_rows(keep), c }
    }

    /// The `i`-th output coordinate as an affine form.
    pub fn form(&self, i: usize) -> AffineForm {
        AffineForm::new(self.a.row(i).to_vec(), self.c[i].clone())
    }

    pub fn forms(&self) -> Vec<AffineForm> {
        (0..self.c.len()).map(|i| self.form(i)).collect()
    }
}

/// Full parameter `θ = (W^(1), b^(1), …, W^(L+1), b^(L+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Parameter {
    pub arch: Architecture,
    pub layers: Vec<Layer>,
}

/// Preactivations of every layer at one input.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// `z^(l)` for `l = 1..=L+1`.
    pub pre: Vec<Vec<Rational>>,
    pub output: Vec<Rational>,
}

impl Parameter {
    pub fn new(arch: Architecture, layers: Vec<Layer>) -> Result<Self> {
        if layers.len() != arch.0.len() - 1 {
            return Err(Error::Shape(format!("{} layers for architecture {arch}", layers.len())));
        }
        for (l, layer) in layers.iter().enumerate() {
            let (rows, cols) = (arch.0[l + 1], arch.0[l]);
            if layer.w.nrows() != rows || layer.w.ncols() != cols || layer.b.len() != rows {
                return Err(Error::Shape(format!(
                    "layer {} has W {}x{} and b of length {}, expected {rows}x{cols}",
                    l + 1,
                    layer.w.nrows(),
                    layer.w.ncols(),
                    layer.b.len()
                )));
            }
        }
        Ok(Parameter { arch, layers })
    }

    /// Builds from nested rows; convenient in tests and fixtures.
    pub fn from_rows(widths: &[usize], layers: Vec<(Vec<Vec<Rational>>, Vec<Rational>)>) -> Result<Self> {
        let arch = Architecture::new(widths.to_vec())?;
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(l, (w, b))| {
                if w.iter().any(|r| r.len() != widths[l]) {
                    return Err(Error::Shape(format!("layer {} rows must have length {}", l + 1, widths[l])));
                }
                Ok(Layer { w: Matrix::from_rows(widths[l], w), b })
            })
            .collect::<Result<Vec<_>>>()?;
        Parameter::new(arch, layers)
    }

    pub fn depth(&self) -> usize {
        self.arch.depth()
    }

    pub fn input_dim(&self) -> usize {
        self.arch.input_dim()
    }

    /// `W^(l)` for `l = 1..=L+1`.
    pub fn w(&self, l: usize) -> &Matrix {
        &self.layers[l - 1].w
    }

    pub fn b(&self, l: usize) -> &[Rational] {
        &self.layers[l - 1].b
    }

    pub fn eval(&self, x: &[Rational]) -> Vec<Rational> {
        self.trace(x).output
    }

    pub fn trace(&self, x: &[Rational]) -> Trace {
        assert_eq!(x.len(), self.input_dim(), "input dimension mismatch");
        let mut a = x.to_vec();
        let mut pre = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let z: Vec<Rational> = layer.w.mul_vec(&a).into_iter().zip(&layer.b).map(|(v, b)| v + b).collect();
            a = if l + 1 < self.layers.len() {
                z.iter().map(|v| if v.is_positive() { v.clone() } else { Rational::zero() }).collect()
            } else {
                z.clone()
            };
            pre.push(z);
        }
        Trace { pre, output: a }
    }

    /// Signs of all hidden preactivations at `x`.
    pub fn activation_pattern(&self, x: &[Rational]) -> SignPattern {
        let t = self.trace(x);
        t.pre[..self.depth()].iter().map(|z| z.iter().map(Sign::of).collect()).collect()
    }

    /// The output's affine map on the region with strictly active sets `active`.
    pub fn affine_map_for_pattern(&self, active: &[Vec<bool>]) -> AffineMap {
        let mut m = AffineMap::identity(self.input_dim());
        for l in 1..=self.depth() {
            m = m.then(&self.layers[l - 1]).masked(&active[l - 1]);
        }
        m.then(&self.layers[self.depth()])
    }

    /// Preactivations of layer `l` given the active sets of layers `1..l`.
    pub fn preactivation_map(&self, active: &[Vec<bool>], l: usize) -> AffineMap {
        let mut m = AffineMap::identity(self.input_dim());
        for k in 1..l {
            m = m.then(&self.layers[k - 1]).masked(&active[k - 1]);
        }
        m.then(&self.layers[l - 1])
    }

    /// `W^(hi) D_{S_{hi-1}} ⋯ D_{S_lo} W^(lo)` for `lo ≤ hi`, with `sets[i]` the active set of layer `i + 1`.
    pub fn linear_chain(&self, lo: usize, hi: usize, sets: &[Vec<bool>]) -> Matrix {
        let mut m = self.w(lo).clone();
        for k in lo + 1..=hi {
            m = self.w(k).mul(&m.mask_rows(&sets[k - 2]));
        }
        m
    }

    /// Applies a neuron permutation or rescaling; see [`Symmetry`].
    pub fn apply_symmetry(&self, s: &Symmetry) -> Result<Parameter> {
        s.apply(self)
    }

    /// Rational parameter vector in layer order: rows of `W`, then `b`, per layer.
    pub fn flatten(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity(self.arch.num_params());
        for layer in &self.layers {
            for i in 0..layer.w.nrows() {
                v.extend(layer.w.row(i).iter().cloned());
            }
            v.extend(layer.b.iter().cloned());
        }
        v
    }

    pub fn unflatten(arch: &Architecture, v: &[Rational]) -> Result<Parameter> {
        if v.len() != arch.num_params() {
            return Err(Error::Shape(format!("{} values for {} parameters", v.len(), arch.num_params())));
        }
        let mut k = 0;
        let mut layers = Vec::new();
        for w in arch.0.windows(2) {
            let (cols, rows) = (w[0], w[1]);
            let mut m = Matrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = v[k].clone();
                    k += 1;
                }
            }
            let b = v[k..k + rows].to_vec();
            k += rows;
            layers.push(Layer { w: m, b });
        }
        Parameter::new(arch.clone(), layers)
    }

    pub fn from_json_str(s: &str) -> Result<Parameter> {
        let j: NetworkJson = serde_json::from_str(s)?;
        j.to_parameter()
    }

    pub fn to_json(&self) -> NetworkJson {
        NetworkJson::from_parameter(self)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }
}

/// `eval` as a free function.
pub fn eval(theta: &Parameter, x: &[Rational]) -> Vec<Rational> {
    theta.eval(x)
}

/// `activation_pattern` as a free function.
pub fn activation_pattern(theta: &Parameter, x: &[Rational]) -> SignPattern {
    theta.activation_pattern(x)
}

/// `affine_map_for_pattern` as a free function.
pub fn affine_map_for_pattern(theta: &Parameter, active: &[Vec<bool>]) -> AffineMap {
    theta.affine_map_for_pattern(active)
}

/// Sign pattern of the cell entered from `x` in direction `u`: the sign of each preactivation
/// at `x + t u` for all sufficiently small `t > 0`, computed by a first-order forward pass.
pub fn directional_pattern(theta: &Parameter, x: &[Rational], u: &[Rational]) -> SignPattern {
    let mut a: Point = x.to_vec();
    let mut da: Point = u.to_vec();
    let mut out = Vec::with_capacity(theta.depth());
    for l in 1..=theta.depth() {
        let layer = &theta.layers[l - 1];
        let z: Vec<Rational> = layer.w.mul_vec(&a).into_iter().zip(&layer.b).map(|(v, b)| v + b).collect();
        let dz = layer.w.mul_vec(&da);
        let mut signs = Vec::with_capacity(z.len());
        let mut na = Vec::with_capacity(z.len());
        let mut nda = Vec::with_capacity(z.len());
        for (zi, dzi) in z.iter().zip(&dz) {
            let s = match Sign::of(zi) {
                Sign::Zero => Sign::of(dzi),
                s => s,
            };
            signs.push(s);
            if s == Sign::Pos {
                na.push(zi.clone());
                nda.push(dzi.clone());
            } else {
                na.push(Rational::zero());
                nda.push(Rational::zero());
            }
        }
        out.push(signs);
        a = na;
        da = nda;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{frac, int};

    pub(crate) fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn section6_first() -> Parameter {
        Parameter::from_rows(
            &[2, 2, 2, 1],
            vec![
                (vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])),
                (vec![q(&[1, -1]), q(&[1, -2])], q(&[-1, -1])),
                (vec![q(&[-1, 1])], q(&[0])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_and_pattern_by_hand() {
        let t = section6_first();
        // f(3, 1) = min{0, max{-1, -1}} = -1.
        assert_eq!(t.eval(&q(&[3, 1])), q(&[-1]));
        let p = t.activation_pattern(&q(&[3, 1]));
        assert_eq!(pattern_string(&p), "++|+0");
    }

    #[test]
    fn affine_map_matches_evaluation() {
        let t = section6_first();
        let x = vec![frac(7, 2), frac(1, 3)];
        let p = t.activation_pattern(&x);
        let m = t.affine_map_for_pattern(&active_sets(&p));
        assert_eq!(m.apply(&x), t.eval(&x));
    }

    #[test]
    fn affine_map_for_fixed_pattern() {
        let t = section6_first();
        // S = ({1,2}, {1}): A = W3 D W2 W1 = (-1, 0)·W2 = (-1, 1).
        let m = t.affine_map_for_pattern(&[vec![true, true], vec![true, false]]);
        assert_eq!(m.a.row(0), &q(&[-1, 1])[..]);
        assert_eq!(m.c, q(&[1]));
    }

    #[test]
    fn directional_pattern_breaks_ties() {
        let t = section6_first();
        // At the origin, moving into the positive quadrant activates both first-layer neurons.
        let p = directional_pattern(&t, &q(&[0, 0]), &q(&[1, 1]));
        assert_eq!(p[0], vec![Sign::Pos, Sign::Pos]);
        let p = directional_pattern(&t, &q(&[0, 0]), &q(&[-1, 1]));
        assert_eq!(p[0], vec![Sign::Neg, Sign::Pos]);
    }

    #[test]
    fn flatten_round_trip() {
        let t = section6_first();
        let v = t.flatten();
        assert_eq!(v.len(), t.arch.num_params());
        assert_eq!(Parameter::unflatten(&t.arch, &v).unwrap(), t);
    }

    #[test]
    fn shape_errors() {
        assert!(Parameter::from_rows(&[2, 1], vec![(vec![q(&[1])], q(&[0]))]).is_err());
        assert!(Architecture::new(vec![2]).is_err());
    }
}
