//! H-described polyhedra and the LP-backed queries on them.

use num_traits::{One, Signed, Zero};

use super::hyperplane::AffineForm;
use super::lp::{maximize, LpOutcome};
use super::matrix::Matrix;
use super::rational::{int, Point, Rational};

/// `{x ∈ R^d : f(x) ≥ 0 for f in ineqs, f(x) = 0 for f in eqs}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub dim: usize,
    pub ineqs: Vec<AffineForm>,
    pub eqs: Vec<AffineForm>,
}

/// Result of a feasibility query.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Witness(Point),
    Empty,
}

impl Polyhedron {
    pub fn whole_space(dim: usize) -> Self {
        Polyhedron { dim, ineqs: Vec::new(), eqs: Vec::new() }
    }

    /// The cube `[-r, r]^d`.
    pub fn cube(dim: usize, r: &Rational) -> Self {
        let mut p = Polyhedron::whole_space(dim);
        for i in 0..dim {
            let mut a = vec![Rational::zero(); dim];
            a[i] = Rational::one();
            p.ineqs.push(AffineForm::new(a.clone(), r.clone()));
            a[i] = -Rational::one();
            p.ineqs.push(AffineForm::new(a, r.clone()));
        }
        p
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`.
    pub fn axis_box(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut p = Polyhedron::whole_space(dim);
        for i in 0..dim {
            let mut a = vec![Rational::zero(); dim];
            a[i] = Rational::one();
            p.ineqs.push(AffineForm::new(a.clone(), -&lo[i]));
            a[i] = -Rational::one();
            p.ineqs.push(AffineForm::new(a, hi[i].clone()));
        }
        p
    }

    pub fn with_ineq(mut self, f: AffineForm) -> Self {
        self.ineqs.push(f);
        self
    }

    pub fn with_eq(mut self, f: AffineForm) -> Self {
        self.eqs.push(f);
        self
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        assert_eq!(self.dim, other.dim);
        let mut p = self.clone();
        p.ineqs.extend(other.ineqs.iter().cloned());
        p.eqs.extend(other.eqs.iter().cloned());
        p
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.ineqs.iter().all(|f| !f.eval(x).is_negative()) && self.eqs.iter().all(|f| f.eval(x).is_zero())
    }

    /// Whether every inequality is strict at `x` (equalities must still hold).
    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        self.ineqs.iter().all(|f| f.eval(x).is_positive()) && self.eqs.iter().all(|f| f.eval(x).is_zero())
    }

    pub fn feasible(&self) -> Feasibility {
        match maximize(&vec![Rational::zero(); self.dim], &self.ineqs, &self.eqs) {
            LpOutcome::Optimal { x, .. } => Feasibility::Witness(x),
            LpOutcome::Infeasible => Feasibility::Empty,
            LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.feasible() == Feasibility::Empty
    }

    /// Supremum of `f` over the polyhedron; `None` if empty, `Some(None)` if unbounded.
    pub fn sup(&self, f: &AffineForm) -> Option<Option<(Rational, Point)>> {
        match maximize(&f.a, &self.ineqs, &self.eqs) {
            LpOutcome::Optimal { value, x } => Some(Some((value + &f.b, x))),
            LpOutcome::Unbounded => Some(None),
            LpOutcome::Infeasible => None,
        }
    }

    /// Maximizes the common slack `t ≤ 1` of all inequalities. `None` when empty (negative optimum).
    pub fn max_slack(&self) -> Option<(Rational, Point)> {
        let d = self.dim;
        let lift = |f: &AffineForm, t_coef: Rational| {
            let mut a = f.a.clone();
            a.push(t_coef);
            AffineForm::new(a, f.b.clone())
        };
        let mut ineqs: Vec<AffineForm> = self.ineqs.iter().map(|f| lift(f, -Rational::one())).collect();
        let mut cap = vec![Rational::zero(); d];
        cap.push(-Rational::one());
        ineqs.push(AffineForm::new(cap, Rational::one()));
        let eqs: Vec<AffineForm> = self.eqs.iter().map(|f| lift(f, Rational::zero())).collect();
        let mut obj = vec![Rational::zero(); d];
        obj.push(Rational::one());
        match maximize(&obj, &ineqs, &eqs) {
            LpOutcome::Optimal { value, .. } if value.is_negative() => None,
            LpOutcome::Optimal { value, mut x } => {
                x.pop();
                Some((value, x))
            }
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => unreachable!("slack is capped"),
        }
    }

    /// A point where every inequality holds strictly, if one exists.
    pub fn strict_point(&self) -> Option<Point> {
        let (t, x) = self.max_slack()?;
        t.is_positive().then_some(x)
    }

    /// Splits the inequalities into implicit equalities and the rest.
    /// Returns `None` for an empty polyhedron.
    pub fn implicit_equalities(&self) -> Option<(Vec<AffineForm>, Vec<AffineForm>)> {
        let (t, _) = self.max_slack()?;
        if t.is_positive() {
            return Some((Vec::new(), self.ineqs.clone()));
        }
        let mut implicit = Vec::new();
        let mut rest = Vec::new();
        for f in &self.ineqs {
            match self.sup(f) {
                Some(Some((v, _))) if !v.is_positive() => implicit.push(f.clone()),
                _ => rest.push(f.clone()),
            }
        }
        Some((implicit, rest))
    }

    /// Affine hull description: the equalities plus implicit equalities.
    pub fn affine_hull(&self) -> Option<Vec<AffineForm>> {
        let (implicit, _) = self.implicit_equalities()?;
        let mut eqs = self.eqs.clone();
        eqs.extend(implicit);
        Some(eqs)
    }

    /// Dimension of the polyhedron, `-1` when empty.
    pub fn dimension(&self) -> i64 {
        let Some(hull) = self.affine_hull() else { return -1 };
        self.dim as i64 - normal_rank(self.dim, &hull) as i64
    }

    /// A point in the relative interior, `None` when empty.
    pub fn relint_point(&self) -> Option<Point> {
        let (implicit, rest) = self.implicit_equalities()?;
        if implicit.is_empty() {
            return self.max_slack().map(|(_, x)| x);
        }
        let mut eqs = self.eqs.clone();
        eqs.extend(implicit);
        let reduced = Polyhedron { dim: self.dim, ineqs: rest, eqs };
        reduced.max_slack().map(|(_, x)| x)
    }

    /// Componentwise bounds, `None` if empty or unbounded.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut a = vec![Rational::zero(); self.dim];
            a[i] = Rational::one();
            let (h, _) = self.sup(&AffineForm::new(a.clone(), Rational::zero()))??;
            a[i] = -Rational::one();
            let (l, _) = self.sup(&AffineForm::new(a, Rational::zero()))??;
            lo.push(-l);
            hi.push(h);
        }
        Some((lo, hi))
    }
}

/// Rank of the linear parts of a family of forms.
pub fn normal_rank(dim: usize, forms: &[AffineForm]) -> usize {
    if forms.is_empty() {
        return 0;
    }
    Matrix::from_rows(dim, forms.iter().map(|f| f.a.clone()).collect()).rank()
}

/// Rank of the augmented rows `[a | b]`.
pub fn augmented_rank(dim: usize, forms: &[AffineForm]) -> usize {
    if forms.is_empty() {
        return 0;
    }
    Matrix::from_rows(
        dim + 1,
        forms
            .iter()
            .map(|f| {
                let mut r = f.a.clone();
                r.push(f.b.clone());
                r
            })
            .collect(),
    )
    .rank()
}

/// `lp_feasible` on an H-description.
pub fn lp_feasible(p: &Polyhedron) -> Feasibility {
    p.feasible()
}

/// `polyhedron_dim` on an H-description.
pub fn polyhedron_dim(p: &Polyhedron) -> i64 {
    p.dimension()
}

/// Convenience constructor for unit squares and similar boxes in tests and fixtures.
pub fn square(lo: i64, hi: i64, dim: usize) -> Polyhedron {
    Polyhedron::axis_box(&vec![int(lo); dim], &vec![int(hi); dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::int;

    fn form(a: &[i64], b: i64) -> AffineForm {
        AffineForm::new(a.iter().map(|&x| int(x)).collect(), int(b))
    }

    #[test]
    fn dimensions() {
        let sq = square(0, 1, 2);
        assert_eq!(sq.dimension(), 2);
        let edge = sq.clone().with_eq(form(&[1, 0], 0));
        assert_eq!(edge.dimension(), 1);
        let corner = edge.clone().with_eq(form(&[0, 1], 0));
        assert_eq!(corner.dimension(), 0);
        let empty = sq.clone().with_ineq(form(&[1, 0], -2));
        assert_eq!(empty.dimension(), -1);
        // Implicit equality: x ≤ 0 together with x ≥ 0.
        let flat = sq.with_ineq(form(&[-1, 0], 0));
        assert_eq!(flat.dimension(), 1);
        let p = flat.relint_point().unwrap();
        assert_eq!(p[0], int(0));
        assert!(p[1] > int(0) && p[1] < int(1));
    }

    #[test]
    fn feasibility_witness() {
        let sq = square(-1, 1, 3);
        match lp_feasible(&sq) {
            Feasibility::Witness(x) => assert!(sq.contains(&x)),
            Feasibility::Empty => panic!("cube is nonempty"),
        }
        assert_eq!(polyhedron_dim(&sq), 3);
        let (lo, hi) = sq.bounding_box().unwrap();
        assert_eq!(lo, vec![int(-1); 3]);
        assert_eq!(hi, vec![int(1); 3]);
    }
}
