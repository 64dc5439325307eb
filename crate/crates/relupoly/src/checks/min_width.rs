use crate::error::{Error, Result};
use crate::exact::{AffineForm, Matrix, Polyhedron, Rational};
use crate::net::Parameter;

/// Basis of the direction space of `aff(p)`, as the columns of the returned matrix.
fn direction_basis(p: &Polyhedron) -> Result<Matrix> {
    let hull = p.affine_hull().ok_or_else(|| Error::Degenerate("polytope is empty".into()))?;
    if hull.is_empty() {
        return Ok(Matrix::identity(p.dim));
    }
    let normals = Matrix::from_rows(p.dim, hull.iter().map(|f| f.a.clone()).collect());
    let basis = normals.nullspace();
    let mut q = Matrix::zeros(p.dim, basis.len());
    for (j, v) in basis.iter().enumerate() {
        q.set_col(j, v);
    }
    Ok(q)
}

/// Lower bound on the hidden width of any one-hidden-layer network that agrees with
/// `f_θ + A x` on `p`: `n + min_α rank((A + Σ α_i W²_{:,i} W¹_i) Q)` over `α ∈ {-1,0,1}^n`, where
/// `Q` spans the directions of `aff(p)`. Every hidden hyperplane of `θ` must cross the interior of `p`.
pub fn min_width_lower_bound(theta: &Parameter, a: &Matrix, p: &Polyhedron) -> Result<usize> {
    if theta.depth() != 1 {
        return Err(Error::Precondition("a single hidden layer is required".into()));
    }
    let (w1, w2) = (theta.w(1), theta.w(2));
    if a.nrows() != w2.nrows() || a.ncols() != theta.input_dim() {
        return Err(Error::Shape(format!("A is {}x{}", a.nrows(), a.ncols())));
    }
    let dim_p = p.dimension();
    let n = w1.nrows();
    for i in 0..n {
        let h = AffineForm::new(w1.row(i).to_vec(), theta.b(1)[i].clone());
        let crosses = p.clone().with_ineq(h.clone()).dimension() == dim_p
            && p.clone().with_ineq(h.neg()).dimension() == dim_p
            && p.clone().with_eq(h).dimension() < dim_p;
        if !crosses {
            return Err(Error::Precondition(format!("hyperplane of neuron {} does not cross the polytope", i + 1)));
        }
    }
    let q = direction_basis(p)?;
    let terms: Vec<Matrix> = (0..n)
        .map(|i| {
            let col = Matrix::from_rows(1, w2.col(i).into_iter().map(|x| vec![x]).collect());
            col.mul(&Matrix::from_rows(w1.ncols(), vec![w1.row(i).to_vec()]))
        })
        .collect();
    let mut best = usize::MAX;
    let mut alpha = vec![-1i64; n];
    loop {
        let mut m = a.clone();
        for (t, &s) in terms.iter().zip(&alpha) {
            if s != 0 {
                m = m.add(&t.scale(&Rational::from_integer(s.into())));
            }
        }
        best = best.min(m.mul(&q).rank());
        let Some(k) = alpha.iter().position(|&s| s < 1) else { break };
        alpha[k] += 1;
        for s in &mut alpha[..k] {
            *s = -1;
        }
    }
    Ok(n + best)
}
