use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::slab::inside;
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::exact::rational::positive_multiple;
use crate::exact::{AffineForm, Hyperplane, Matrix, Polyhedron, Rational};
use crate::net::{Architecture, Layer, Parameter};
use crate::tropical::one_layer_weight;

fn one_layer(theta: &Parameter) -> Result<()> {
    if theta.depth() != 1 {
        return Err(Error::Precondition("a single hidden layer is required".into()));
    }
    Ok(())
}

fn neuron_form(theta: &Parameter, i: usize) -> AffineForm {
    AffineForm::new(theta.w(1).row(i).to_vec(), theta.b(1)[i].clone())
}

/// `λ` with `form = λ · h.form()`.
fn scale_of(form: &AffineForm, h: &Hyperplane) -> Rational {
    positive_multiple(&form.a, &h.normal)
        .unwrap_or_else(|| -positive_multiple(&form.neg().a, &h.normal).expect("form lies on the hyperplane"))
}

/// A visible hyperplane oriented like the first neuron found on it, with the summed output
/// column `Σ V_i |λ_i|`.
struct Group {
    form: AffineForm,
    column: Vec<Rational>,
}

/// `f(x) = Σ_G u_G [g_G(x)]_+ + A x + c` on `p`, grouping neurons by their hyperplane inside `p`
/// and rewriting `[−g]_+ = [g]_+ − g` for neurons oriented against their group. Neurons whose
/// hyperplane misses the interior of `p` are folded into the affine part.
fn decompose(theta: &Parameter, p: &Polyhedron) -> (Vec<Group>, Matrix, Vec<Rational>) {
    let (d, m) = (theta.input_dim(), theta.arch.output_dim());
    let v = theta.w(2);
    let mut a = Matrix::zeros(m, d);
    let mut c = theta.b(2).to_vec();
    let mut add_affine = |col: &[Rational], f: &AffineForm, s: &Rational| {
        for r in 0..m {
            let k = &col[r] * s;
            for (j, x) in f.a.iter().enumerate() {
                a.row_mut(r)[j] += &k * x;
            }
            c[r] += &k * &f.b;
        }
    };
    let mut groups: BTreeMap<Hyperplane, Group> = BTreeMap::new();
    for i in 0..theta.w(1).nrows() {
        let f = neuron_form(theta, i);
        let col = v.col(i);
        if inside(&f, p) {
            let (h, _) = f.hyperplane().expect("non-constant");
            let lambda = scale_of(&f, &h);
            let g = groups.entry(h.clone()).or_insert_with(|| Group {
                form: h.form().scaled(&lambda.signum()),
                column: vec![Rational::zero(); m],
            });
            for (e, x) in g.column.iter_mut().zip(&col) {
                *e += x * lambda.abs();
            }
            if positive_multiple(&f.a, &g.form.a).is_none() {
                add_affine(&col, &g.form.clone(), &-lambda.abs());
            }
        } else if p.clone().with_ineq(f.neg()).dimension() < p.dimension() {
            // `f` is nonnegative throughout `p`.
            add_affine(&col, &f, &Rational::one());
        }
    }
    let groups = groups.into_values().filter(|g| g.column.iter().any(|x| !x.is_zero())).collect();
    (groups, a, c)
}

/// `min_p g`, for bounded nonempty `p`.
fn min_over(p: &Polyhedron, g: &AffineForm) -> Rational {
    let (v, _) = p.sup(&g.neg()).expect("nonempty").expect("bounded");
    -v
}

/// An equivalent one-hidden-layer network on `p` of the same width in which each visible
/// breakpoint hyperplane carries exactly one neuron. The affine remainder is realized by
/// rank-one neurons that stay active on all of `p`; leftover neurons stay inactive on `p`.
pub fn compress_one_layer(theta: &Parameter, p: &Polyhedron) -> Result<Parameter> {
    one_layer(theta)?;
    if p.dimension() != p.dim as i64 || p.bounding_box().is_none() {
        return Err(Error::Precondition("the polytope must be bounded and full-dimensional".into()));
    }
    let width = theta.w(1).nrows();
    let (d, m) = (theta.input_dim(), theta.arch.output_dim());
    let (groups, a, mut c) = decompose(theta, p);
    let (rref, pivots) = a.rref();
    let rank = pivots.len();
    if groups.len() + rank > width {
        return Err(Error::Precondition(format!(
            "{} visible hyperplanes and an affine remainder of rank {rank} do not fit in {width} neurons",
            groups.len()
        )));
    }
    let mut rows = Vec::with_capacity(width);
    let mut bias = Vec::with_capacity(width);
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(width);
    for g in &groups {
        rows.push(g.form.a.clone());
        bias.push(g.form.b.clone());
        cols.push(g.column.clone());
    }
    // A = C·R with R the nonzero rows of rref(A) and C the pivot columns of A.
    for (k, &j) in pivots.iter().enumerate() {
        let r = rref.row(k).to_vec();
        let u = a.col(j);
        let shift = -min_over(p, &AffineForm::new(r.clone(), Rational::zero())) + Rational::one();
        for (ci, ui) in c.iter_mut().zip(&u) {
            *ci -= ui * &shift;
        }
        rows.push(r);
        bias.push(shift);
        cols.push(u);
    }
    let mut e1 = vec![Rational::zero(); d];
    e1[0] = Rational::one();
    let off = min_over(p, &AffineForm::new(e1.iter().map(|x| -x).collect(), Rational::zero())) - Rational::one();
    while rows.len() < width {
        rows.push(e1.clone());
        bias.push(off.clone());
        cols.push(vec![Rational::zero(); m]);
    }
    let w2 = Matrix::from_rows(width, (0..m).map(|r| cols.iter().map(|col| col[r].clone()).collect()).collect());
    Parameter::new(
        Architecture(vec![d, width, m]),
        vec![Layer { w: Matrix::from_rows(d, rows), b: bias }, Layer { w: w2, b: c }],
    )
}

/// Linear part of `f_θ − f_η`, which must agree on every region of their joint complex on `p`.
fn affine_difference(theta: &Parameter, eta: &Parameter, p: &Polyhedron) -> Result<Matrix> {
    let (d, m) = (theta.input_dim(), theta.arch.output_dim());
    let (n1, n2) = (theta.w(1).nrows(), eta.w(1).nrows());
    let w = theta.w(1).rows_vec().into_iter().chain(eta.w(1).rows_vec()).collect();
    let b = theta.b(1).iter().chain(eta.b(1)).cloned().collect();
    let v =
        (0..m).map(|r| theta.w(2).row(r).iter().cloned().chain(eta.w(2).row(r).iter().map(|x| -x)).collect()).collect();
    let c = theta.b(2).iter().zip(eta.b(2)).map(|(x, y)| x - y).collect();
    let joint = Parameter::new(
        Architecture(vec![d, n1 + n2, m]),
        vec![Layer { w: Matrix::from_rows(d, w), b }, Layer { w: Matrix::from_rows(n1 + n2, v), b: c }],
    )?;
    let cx = Complex::build(&joint, p)?;
    let mut parts = cx.regions.iter().map(|r| r.output.as_ref().expect("full depth").a.clone());
    let first = parts.next().ok_or_else(|| Error::Degenerate("empty polytope".into()))?;
    if parts.any(|a| a != first) {
        return Err(Error::Precondition("the difference of the two functions is not affine on the polytope".into()));
    }
    Ok(first)
}

/// The `α ∈ {−1,0,1}^n` with `f_θ − f_η` having linear part `Σ α_i W²_{:,i} W¹_i` on `p`, after
/// checking that both networks place the same breakpoint weight on each of θ's hyperplanes.
/// Among several solutions the one with fewest nonzero entries is returned.
pub fn affine_difference_signature(theta: &Parameter, eta: &Parameter, p: &Polyhedron) -> Result<Vec<i8>> {
    one_layer(theta)?;
    one_layer(eta)?;
    if theta.arch != eta.arch {
        return Err(Error::Shape(format!("architectures {} and {} differ", theta.arch, eta.arch)));
    }
    let n = theta.w(1).nrows();
    for i in 0..n {
        let f = neuron_form(theta, i);
        if !inside(&f, p) {
            return Err(Error::Precondition(format!("hyperplane of neuron {} does not cross the polytope", i + 1)));
        }
        let (h, _) = f.hyperplane().expect("crosses, so non-constant");
        let ct = one_layer_weight(theta, &h)?;
        let ce = one_layer_weight(eta, &h)?;
        if !ct.same_as(&ce) {
            return Err(Error::Precondition(format!(
                "breakpoint weights on the hyperplane of neuron {} differ",
                i + 1
            )));
        }
    }
    let diff = affine_difference(theta, eta, p)?;
    let terms: Vec<Matrix> = (0..n)
        .map(|i| {
            let col = Matrix::from_rows(1, theta.w(2).col(i).into_iter().map(|x| vec![x]).collect());
            col.mul(&Matrix::from_rows(theta.input_dim(), vec![theta.w(1).row(i).to_vec()]))
        })
        .collect();
    let mut best: Option<Vec<i8>> = None;
    let mut alpha = vec![-1i8; n];
    loop {
        let mut s = Matrix::zeros(diff.nrows(), diff.ncols());
        for (t, &x) in terms.iter().zip(&alpha) {
            if x != 0 {
                s = s.add(&t.scale(&Rational::from_integer(x.into())));
            }
        }
        let support = |v: &[i8]| v.iter().filter(|&&x| x != 0).count();
        if s == diff && best.as_ref().is_none_or(|b| support(&alpha) < support(b)) {
            best = Some(alpha.clone());
        }
        let Some(k) = alpha.iter().position(|&x| x < 1) else { break };
        alpha[k] += 1;
        for x in &mut alpha[..k] {
            *x = -1;
        }
    }
    best.ok_or_else(|| Error::Precondition("no α in {-1,0,1}^n matches the affine difference".into()))
}
