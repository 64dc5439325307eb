//! Polytopes carried as an H-description, with an exact vertex cycle kept alongside
//! whenever the ambient dimension is at most two. Queries use the vertices when present
//! and fall back to the simplex otherwise.

use num_traits::{Signed, Zero};

use super::hyperplane::AffineForm;
use super::polyhedron::Polyhedron;
use super::rational::{add_vec, scale_vec, sub_vec, Point, Rational};

#[derive(Clone, Debug)]
pub struct Cell {
    pub poly: Polyhedron,
    verts: Option<Vec<Point>>,
}

impl Cell {
    /// Wraps a bounded polyhedron. Vertices are computed when `dim ≤ 2`.
    pub fn new(poly: Polyhedron) -> Cell {
        if poly.dim > 2 {
            return Cell { poly, verts: None };
        }
        let verts = match poly.bounding_box() {
            None => Vec::new(),
            Some((lo, hi)) => {
                let mut v = box_cycle(&lo, &hi);
                for f in &poly.ineqs {
                    v = clip(&v, f);
                }
                for f in &poly.eqs {
                    v = clip(&clip(&v, f), &f.neg());
                }
                v
            }
        };
        Cell { poly, verts: Some(verts) }
    }

    /// The single point `x`.
    pub fn from_point(x: &[Rational]) -> Cell {
        let d = x.len();
        let mut poly = Polyhedron::whole_space(d);
        for i in 0..d {
            let mut a = vec![Rational::zero(); d];
            a[i] = super::rational::one();
            poly.eqs.push(AffineForm::new(a, -&x[i]));
        }
        Cell { poly, verts: (d <= 2).then(|| vec![x.to_vec()]) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.poly.dim
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        self.verts.as_deref()
    }

    pub fn restrict_ge(&self, f: &AffineForm) -> Cell {
        let mut poly = self.poly.clone();
        poly.ineqs.push(f.clone());
        let verts = self.verts.as_ref().map(|v| clip(v, f));
        Cell { poly, verts }
    }

    pub fn restrict_eq(&self, f: &AffineForm) -> Cell {
        let mut poly = self.poly.clone();
        poly.eqs.push(f.clone());
        let verts = self.verts.as_ref().map(|v| clip(&clip(v, f), &f.neg()));
        Cell { poly, verts }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Cell {
        let mut c = self.clone();
        for f in &other.ineqs {
            c = c.restrict_ge(f);
        }
        for f in &other.eqs {
            c = c.restrict_eq(f);
        }
        c
    }

    /// Dimension, `-1` when empty.
    pub fn dim(&self) -> i64 {
        match &self.verts {
            Some(v) => match v.len() {
                0 => -1,
                1 => 0,
                2 => 1,
                _ => 2,
            },
            None => self.poly.dimension(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.verts {
            Some(v) => v.is_empty(),
            None => self.poly.is_empty(),
        }
    }

    /// Whether `f` takes strictly positive, respectively strictly negative, values on the cell.
    pub fn sign_range(&self, f: &AffineForm) -> (bool, bool) {
        match &self.verts {
            Some(v) => {
                let vals: Vec<Rational> = v.iter().map(|p| f.eval(p)).collect();
                (vals.iter().any(Signed::is_positive), vals.iter().any(Signed::is_negative))
            }
            None => {
                let pos = matches!(self.poly.sup(f), Some(Some((m, _))) if m.is_positive());
                let neg = matches!(self.poly.sup(&f.neg()), Some(Some((m, _))) if m.is_positive());
                (pos, neg)
            }
        }
    }

    /// A point in the relative interior.
    pub fn relint_point(&self) -> Option<Point> {
        match &self.verts {
            Some(v) if v.is_empty() => None,
            Some(v) => Some(centroid(v)),
            None => self.poly.relint_point(),
        }
    }

    /// Whether some point of the cell makes every form strictly positive.
    pub fn has_point_with_all_positive(&self, forms: &[AffineForm]) -> bool {
        match &self.verts {
            Some(v) => {
                let mut k = v.clone();
                for f in forms {
                    k = clip(&k, f);
                    if k.is_empty() {
                        return false;
                    }
                }
                let c = centroid(&k);
                forms.iter().all(|f| f.eval(&c).is_positive())
            }
            None => strict_on(&self.poly, forms),
        }
    }

    /// Whether the cell touches the zero set of any of the forms.
    pub fn touches_any(&self, forms: &[AffineForm]) -> bool {
        match &self.verts {
            Some(v) => v.iter().any(|p| forms.iter().any(|f| f.eval(p).is_zero())),
            None => forms.iter().any(|f| !self.poly.clone().with_eq(f.clone()).is_empty()),
        }
    }
}

/// LP test for a point of `p` where every form in `strict` is positive.
fn strict_on(p: &Polyhedron, strict: &[AffineForm]) -> bool {
    let d = p.dim;
    let lift = |f: &AffineForm, t: Rational| {
        let mut a = f.a.clone();
        a.push(t);
        AffineForm::new(a, f.b.clone())
    };
    let mut ineqs: Vec<AffineForm> = p.ineqs.iter().map(|f| lift(f, Rational::zero())).collect();
    ineqs.extend(strict.iter().map(|f| lift(f, -super::rational::one())));
    let mut cap = vec![Rational::zero(); d];
    cap.push(-super::rational::one());
    ineqs.push(AffineForm::new(cap, super::rational::one()));
    let eqs: Vec<AffineForm> = p.eqs.iter().map(|f| lift(f, Rational::zero())).collect();
    let mut obj = vec![Rational::zero(); d];
    obj.push(super::rational::one());
    match super::lp::maximize(&obj, &ineqs, &eqs).optimal() {
        Some((t, _)) => t.is_positive(),
        None => false,
    }
}

fn centroid(v: &[Point]) -> Point {
    let mut acc = v[0].clone();
    for p in &v[1..] {
        acc = add_vec(&acc, p);
    }
    scale_vec(&acc, &Rational::new(1.into(), (v.len() as i64).into()))
}

/// Vertex cycle of an axis box of dimension at most two.
fn box_cycle(lo: &[Rational], hi: &[Rational]) -> Vec<Point> {
    match lo.len() {
        0 => vec![Vec::new()],
        1 => dedupe(vec![lo.to_vec(), hi.to_vec()]),
        2 => dedupe(vec![
            vec![lo[0].clone(), lo[1].clone()],
            vec![hi[0].clone(), lo[1].clone()],
            vec![hi[0].clone(), hi[1].clone()],
            vec![lo[0].clone(), hi[1].clone()],
        ]),
        _ => unreachable!("vertex cycles are kept only up to dimension two"),
    }
}

/// Sutherland–Hodgman clip of a convex vertex cycle against `f ≥ 0`.
fn clip(v: &[Point], f: &AffineForm) -> Vec<Point> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let vals: Vec<Rational> = v.iter().map(|p| f.eval(p)).collect();
    if vals.iter().all(|x| !x.is_negative()) {
        return v.to_vec();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        if !vals[i].is_negative() {
            out.push(v[i].clone());
        }
        let crossing =
            (vals[i].is_positive() && vals[j].is_negative()) || (vals[i].is_negative() && vals[j].is_positive());
        if crossing {
            let t = &vals[i] / (&vals[i] - &vals[j]);
            out.push(add_vec(&v[i], &scale_vec(&sub_vec(&v[j], &v[i]), &t)));
        }
    }
    dedupe(out)
}

/// Drops repeated points and vertices interior to a straight run.
fn dedupe(mut v: Vec<Point>) -> Vec<Point> {
    v.dedup();
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    let mut changed = true;
    while changed && v.len() >= 3 {
        changed = false;
        let n = v.len();
        for i in 0..n {
            let p = &v[(i + n - 1) % n];
            let q = &v[i];
            let r = &v[(i + 1) % n];
            if straight_through(p, q, r) {
                v.remove(i);
                changed = true;
                break;
            }
        }
    }
    v
}

/// `q` lies strictly between `p` and `r` on one line.
fn straight_through(p: &[Rational], q: &[Rational], r: &[Rational]) -> bool {
    let u = sub_vec(q, p);
    let w = sub_vec(r, q);
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if &u[i] * &w[j] != &u[j] * &w[i] {
                return false;
            }
        }
    }
    super::rational::dot(&u, &w).is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{frac, int};

    fn form(a: &[i64], b: i64) -> AffineForm {
        AffineForm::new(a.iter().map(|&x| int(x)).collect(), int(b))
    }

    fn both(poly: Polyhedron) -> (Cell, Cell) {
        (Cell::new(poly.clone()), Cell { poly, verts: None })
    }

    #[test]
    fn vertex_and_lp_paths_agree() {
        let (v, l) = both(Polyhedron::cube(2, &int(1)));
        for f in [form(&[1, 1], 0), form(&[1, 0], 1), form(&[1, -1], 3), form(&[2, 1], -5)] {
            assert_eq!(v.sign_range(&f), l.sign_range(&f));
            let (vg, lg) = (v.restrict_ge(&f), l.restrict_ge(&f));
            assert_eq!(vg.dim(), lg.dim());
            let (ve, le) = (v.restrict_eq(&f), l.restrict_eq(&f));
            assert_eq!(ve.dim(), le.dim());
        }
    }

    #[test]
    fn clipping_square_to_triangle_and_edge() {
        let sq = Cell::new(Polyhedron::cube(2, &int(1)));
        let tri = sq.restrict_ge(&form(&[-1, -1], 0));
        assert_eq!(tri.vertices().unwrap().len(), 3);
        assert_eq!(tri.dim(), 2);
        let diag = sq.restrict_eq(&form(&[1, -1], 0));
        assert_eq!(diag.dim(), 1);
        let mid = diag.relint_point().unwrap();
        assert_eq!(mid, vec![int(0), int(0)]);
        let corner = sq.restrict_eq(&form(&[1, 1], -2));
        assert_eq!(corner.dim(), 0);
        let none = sq.restrict_ge(&form(&[1, 0], -3));
        assert!(none.is_empty());
    }

    #[test]
    fn strict_positivity() {
        let (v, l) = both(Polyhedron::cube(2, &int(1)));
        let fs = vec![form(&[1, 0], 0), form(&[0, 1], 0)];
        assert!(v.has_point_with_all_positive(&fs));
        assert!(l.has_point_with_all_positive(&fs));
        // x ≥ 1 only touches the boundary.
        let gs = vec![form(&[1, 0], -1)];
        assert!(!v.has_point_with_all_positive(&gs));
        assert!(!l.has_point_with_all_positive(&gs));
        let hs = vec![AffineForm::new(vec![frac(1, 2), int(0)], frac(-1, 4))];
        assert!(v.has_point_with_all_positive(&hs));
    }
}
