//! Essentialization and genericity of finite hyperplane arrangements.

use super::hyperplane::AffineForm;
use super::matrix::Matrix;
use super::polyhedron::{augmented_rank, normal_rank, Polyhedron};
use super::rational::{Point, Rational};

/// An arrangement projected onto the orthogonal complement of its lineality space.
#[derive(Clone, Debug)]
pub struct Essentialization {
    /// Rows span the normal space; projected coordinates are taken in this basis.
    pub basis: Vec<Vec<Rational>>,
    /// Basis of the common lineality space `⋂ lin(H)`.
    pub lineality: Vec<Vec<Rational>>,
    pub projected: Vec<AffineForm>,
}

/// Projects the arrangement to `R^r`, `r` the rank of the normals, via `x = Bᵀy + l`.
pub fn essentialize(dim: usize, hs: &[AffineForm]) -> Essentialization {
    let normals = Matrix::from_rows(dim, hs.iter().map(|h| h.a.clone()).collect());
    let (rref, pivots) = normals.rref();
    let basis: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| rref.row(i).to_vec()).collect();
    let lineality = normals.nullspace();
    let bt = Matrix::from_rows(dim, basis.clone()).transpose();
    let projected = hs.iter().map(|h| AffineForm::new(bt.vec_mul(&h.a), h.b.clone())).collect();
    Essentialization { basis, lineality, projected }
}

/// Why an arrangement fails to be generic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrangementDefect {
    /// These hyperplanes meet in the wrong codimension.
    WrongCodimension(Vec<usize>),
    /// More hyperplanes than the essential dimension share a point.
    CommonPoint(Vec<usize>),
    /// The hyperplane passes through a listed vertex.
    ThroughVertex { hyperplane: usize, vertex: usize },
}

/// Genericity of `hs` restricted to the flat `{ambient = 0}`. Forms constant on the flat are ignored.
pub fn generic_arrangement_in(
    dim: usize,
    ambient: &[AffineForm],
    hs: &[AffineForm],
    vertices: &[Point],
) -> Result<(), ArrangementDefect> {
    let e = normal_rank(dim, ambient);
    let live: Vec<usize> = (0..hs.len())
        .filter(|&i| {
            let mut fs = ambient.to_vec();
            fs.push(hs[i].clone());
            normal_rank(dim, &fs) > e
        })
        .collect();
    let mut all = ambient.to_vec();
    all.extend(live.iter().map(|&i| hs[i].clone()));
    let r = normal_rank(dim, &all) - e;
    let with = |subset: &[usize]| {
        let mut fs = ambient.to_vec();
        fs.extend(subset.iter().map(|&k| hs[live[k]].clone()));
        fs
    };
    let k = r.min(live.len());
    for subset in combinations(live.len(), k) {
        if normal_rank(dim, &with(&subset)) - e != subset.len() {
            return Err(ArrangementDefect::WrongCodimension(subset.iter().map(|&s| live[s]).collect()));
        }
    }
    if live.len() > r {
        for subset in combinations(live.len(), r + 1) {
            let fs = with(&subset);
            if augmented_rank(dim, &fs) == normal_rank(dim, &fs) {
                return Err(ArrangementDefect::CommonPoint(subset.iter().map(|&s| live[s]).collect()));
            }
        }
    }
    for &i in &live {
        for (vi, v) in vertices.iter().enumerate() {
            if num_traits::Zero::is_zero(&hs[i].eval(v)) {
                return Err(ArrangementDefect::ThroughVertex { hyperplane: i, vertex: vi });
            }
        }
    }
    Ok(())
}

/// Genericity of an arrangement in its own right: every `k ≤ r` of them meet in codimension `k`
/// and no `r + 1` share a point, `r` being the essential dimension.
pub fn is_generic_arrangement(dim: usize, hs: &[AffineForm]) -> bool {
    generic_arrangement_in(dim, &[], hs, &[]).is_ok()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Vertices of a bounded polyhedron by solving every full-rank choice of tight constraints.
/// Intended for small inputs in dimension at most three.
pub fn enumerate_vertices(p: &Polyhedron) -> Vec<Point> {
    let e = normal_rank(p.dim, &p.eqs);
    let need = p.dim - e;
    let mut out: Vec<Point> = Vec::new();
    for subset in combinations(p.ineqs.len(), need) {
        let mut fs = p.eqs.clone();
        fs.extend(subset.iter().map(|&i| p.ineqs[i].clone()));
        if normal_rank(p.dim, &fs) != p.dim {
            continue;
        }
        let m = Matrix::from_rows(p.dim, fs.iter().map(|f| f.a.clone()).collect());
        let rhs: Vec<Rational> = fs.iter().map(|f| -&f.b).collect();
        if let Some(x) = m.solve(&rhs) {
            if p.contains(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::int;

    fn form(a: &[i64], b: i64) -> AffineForm {
        AffineForm::new(a.iter().map(|&x| int(x)).collect(), int(b))
    }

    #[test]
    fn essentialization_dimensions() {
        let e = essentialize(2, &[form(&[1, 0], 0), form(&[1, 0], -1)]);
        assert_eq!(e.basis.len(), 1);
        assert_eq!(e.lineality.len(), 1);
        assert_eq!(e.projected.len(), 2);
        let e = essentialize(3, &[form(&[0, 0, 1], -2)]);
        assert_eq!(e.basis.len(), 1);
        assert_eq!(e.lineality.len(), 2);
    }

    #[test]
    fn genericity_cases() {
        assert!(is_generic_arrangement(2, &[form(&[1, 0], 0), form(&[1, 0], -1)]));
        assert!(is_generic_arrangement(2, &[form(&[1, 0], 0), form(&[0, 1], 0)]));
        assert!(!is_generic_arrangement(2, &[form(&[1, 0], 0), form(&[0, 1], 0), form(&[1, 1], 0)]));
        assert!(is_generic_arrangement(2, &[form(&[1, 0], 0), form(&[0, 1], 0), form(&[1, 1], -1)]));
        assert!(!is_generic_arrangement(2, &[form(&[1, 0], 0), form(&[2, 0], 0)]));
    }

    #[test]
    fn genericity_on_a_flat_and_vertices() {
        // On the line y = 0 two lines through (1, 0) collide.
        let amb = [form(&[0, 1], 0)];
        let r = generic_arrangement_in(2, &amb, &[form(&[1, 1], -1), form(&[1, -1], -1)], &[]);
        assert!(matches!(r, Err(ArrangementDefect::CommonPoint(_))));
        let verts = vec![vec![int(1), int(0)]];
        let r = generic_arrangement_in(2, &[], &[form(&[1, 1], -1)], &verts);
        assert!(matches!(r, Err(ArrangementDefect::ThroughVertex { .. })));
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn cube_vertices() {
        assert_eq!(enumerate_vertices(&Polyhedron::cube(3, &int(1))).len(), 8);
    }
}
