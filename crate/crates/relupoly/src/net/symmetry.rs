//! Neuron permutations and positive rescalings, with the canonical representative they induce.

use num_traits::Signed;

use super::Parameter;
use crate::error::{Error, Result};
use crate::exact::rational::{is_zero_vec, primitive_positive_multiple};
use crate::exact::Rational;

/// A function-preserving reparametrization of one hidden layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Symmetry {
    /// New neuron `i` of `layer` is old neuron `perm[i]`.
    Permute { layer: usize, perm: Vec<usize> },
    /// Incoming row and bias of `neuron` times `factor > 0`, its outgoing column divided by `factor`.
    Scale { layer: usize, neuron: usize, factor: Rational },
}

impl Symmetry {
    pub fn apply(&self, theta: &Parameter) -> Result<Parameter> {
        let depth = theta.depth();
        let mut out = theta.clone();
        match self {
            Symmetry::Permute { layer, perm } => {
                let l = *layer;
                if l == 0 || l > depth {
                    return Err(Error::Precondition(format!("layer {l} is not hidden")));
                }
                let n = theta.arch.width(l);
                let mut seen = vec![false; n];
                if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
                    return Err(Error::Precondition(format!("{perm:?} is not a permutation of {n} neurons")));
                }
                out.layers[l - 1].w = theta.w(l).select_rows(perm);
                out.layers[l - 1].b = perm.iter().map(|&p| theta.b(l)[p].clone()).collect();
                out.layers[l].w = theta.w(l + 1).select_cols(perm);
            }
            Symmetry::Scale { layer, neuron, factor } => {
                let (l, i) = (*layer, *neuron);
                if l == 0 || l > depth || i >= theta.arch.width(l) {
                    return Err(Error::Precondition(format!("no hidden neuron ({l}, {i})")));
                }
                if !factor.is_positive() {
                    return Err(Error::Precondition("scaling factor must be positive".into()));
                }
                for x in out.layers[l - 1].w.row_mut(i) {
                    *x *= factor;
                }
                out.layers[l - 1].b[i] *= factor;
                let next = &mut out.layers[l].w;
                for r in 0..next.nrows() {
                    next[(r, i)] /= factor;
                }
            }
        }
        Ok(out)
    }
}

fn augmented_row(theta: &Parameter, l: usize, i: usize) -> Vec<Rational> {
    let mut r = theta.w(l).row(i).to_vec();
    r.push(theta.b(l)[i].clone());
    r
}

/// Orderings of tied neurons tried per layer before falling back to ordering ties by their
/// outgoing columns.
const TIE_ORDERINGS: usize = 5040;

/// Every ordering of `order` that only permutes within runs of equal keys.
fn tie_orderings(order: &[usize], keys: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    while start < order.len() {
        let end = (start..order.len()).find(|&k| keys[order[k]] != keys[order[start]]).unwrap_or(order.len());
        let mut run: Vec<usize> = order[start..end].to_vec();
        let mut perms = Vec::new();
        permutations(&mut run, 0, &mut perms);
        out = out.iter().flat_map(|o| perms.iter().map(move |p| [o.as_slice(), p].concat())).collect();
        start = end;
    }
    out
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Smallest flattened parameter over the tie orderings of layers `l..`.
fn least_ordering(t: &Parameter, l: usize) -> Parameter {
    if l > t.depth() {
        return t.clone();
    }
    let n = t.arch.width(l);
    let keys: Vec<Vec<Rational>> = (0..n).map(|i| augmented_row(t, l, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let orderings = tie_orderings(&order, &keys);
    if orderings.len() > TIE_ORDERINGS {
        let cols: Vec<Vec<Rational>> = (0..n).map(|i| t.w(l + 1).col(i)).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(cols[a].cmp(&cols[b])));
        let next = Symmetry::Permute { layer: l, perm: order }.apply(t).expect("valid permutation");
        return least_ordering(&next, l + 1);
    }
    orderings
        .into_iter()
        .map(|perm| least_ordering(&Symmetry::Permute { layer: l, perm }.apply(t).expect("valid permutation"), l + 1))
        .min_by(|a, b| a.flatten().cmp(&b.flatten()))
        .expect("at least one ordering")
}

/// Canonical representative modulo permutations and positive scalings: each neuron's
/// augmented incoming row is rescaled to a primitive integer vector (sign kept) with the factor
/// pushed into the outgoing column, neurons are sorted lexicographically by incoming row, and
/// neurons with equal rows are ordered to make the flattened parameter smallest.
///
/// Neurons whose incoming row and bias are all zero keep their scaling freedom, so two
/// parameters that differ only by rescaling such a neuron get different representatives.
pub fn canonicalize(theta: &Parameter) -> Parameter {
    let mut t = theta.clone();
    for l in 1..=t.depth() {
        for i in 0..t.arch.width(l) {
            let row = augmented_row(&t, l, i);
            if is_zero_vec(&row) {
                continue;
            }
            let (_, factor) = primitive_positive_multiple(&row);
            t = Symmetry::Scale { layer: l, neuron: i, factor }.apply(&t).expect("valid scaling");
        }
    }
    least_ordering(&t, 1)
}

/// Equality of canonical forms.
pub fn equivalent_mod_symmetries(a: &Parameter, b: &Parameter) -> bool {
    a.arch == b.arch && canonicalize(a) == canonicalize(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{frac, int};
    use crate::net::Parameter;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn net() -> Parameter {
        Parameter::from_rows(
            &[2, 2, 1],
            vec![(vec![q(&[1, 2]), q(&[-3, 1])], q(&[1, 0])), (vec![q(&[2, -1])], q(&[3]))],
        )
        .unwrap()
    }

    #[test]
    fn scaling_and_permutation_are_symmetries() {
        let t = net();
        let s = t.apply_symmetry(&Symmetry::Scale { layer: 1, neuron: 0, factor: frac(5, 2) }).unwrap();
        let p = s.apply_symmetry(&Symmetry::Permute { layer: 1, perm: vec![1, 0] }).unwrap();
        for x in [q(&[0, 0]), q(&[1, -1]), vec![frac(1, 3), frac(-7, 2)]] {
            assert_eq!(t.eval(&x), p.eval(&x));
        }
        assert!(equivalent_mod_symmetries(&t, &p));
    }

    #[test]
    fn sign_flip_is_not_a_symmetry() {
        let t = net();
        assert!(t.apply_symmetry(&Symmetry::Scale { layer: 1, neuron: 0, factor: int(-1) }).is_err());
        let mut flipped = t.clone();
        for x in flipped.layers[0].w.row_mut(0) {
            *x = -x.clone();
        }
        flipped.layers[0].b[0] = -flipped.layers[0].b[0].clone();
        assert!(!equivalent_mod_symmetries(&t, &flipped));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let c = canonicalize(&net());
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn bad_permutation_rejected() {
        assert!(net().apply_symmetry(&Symmetry::Permute { layer: 1, perm: vec![0, 0] }).is_err());
    }
}
