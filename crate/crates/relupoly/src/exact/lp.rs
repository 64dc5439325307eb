//! Dense two-phase simplex over exact rationals with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use super::hyperplane::AffineForm;
use super::rational::{Point, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Point },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Rational, Point)> {
        match self {
            LpOutcome::Optimal { value, x } => Some((value, x)),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    blocked: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (x, p) in cost.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j - c_B B⁻¹ A_j` for the current basis.
    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        let mut r = c.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            for (j, x) in self.rows[i].iter().enumerate() {
                if !x.is_zero() {
                    r[j] -= &c[b] * x;
                }
            }
        }
        r
    }

    /// Maximizes `c·x` from a feasible basis. Returns `false` when unbounded.
    fn optimize(&mut self, c: &[Rational]) -> bool {
        let mut cost = self.reduced_costs(c);
        loop {
            let Some(enter) = (0..self.ncols).find(|&j| !self.blocked[j] && cost[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, enter, &mut cost);
        }
    }

    fn value(&self, c: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).fold(Rational::zero(), |acc, (&b, v)| acc + &c[b] * v)
    }
}

/// Maximizes `obj·x` over `{x : f(x) ≥ 0 for f in ineqs, f(x) = 0 for f in eqs}` with `x` free.
pub fn maximize(obj: &[Rational], ineqs: &[AffineForm], eqs: &[AffineForm]) -> LpOutcome {
    let n = obj.len();
    let mi = ineqs.len();
    let m = mi + eqs.len();
    // Columns: x⁺ (n), x⁻ (n), one slack per inequality, then artificials.
    let base_cols = 2 * n + mi;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    let mut needs_art: Vec<bool> = Vec::with_capacity(m);
    for (k, f) in ineqs.iter().enumerate() {
        // a·x + b ≥ 0  ⇔  -a·x + s = b
        let mut row = vec![Rational::zero(); base_cols];
        for j in 0..n {
            row[j] = -&f.a[j];
            row[n + j] = f.a[j].clone();
        }
        row[2 * n + k] = Rational::one();
        let mut b = f.b.clone();
        if b.is_negative() {
            row.iter_mut().for_each(|x| *x = -&*x);
            b = -b;
            needs_art.push(true);
        } else {
            needs_art.push(false);
        }
        rows.push(row);
        rhs.push(b);
    }
    for f in eqs {
        let mut row = vec![Rational::zero(); base_cols];
        for j in 0..n {
            row[j] = f.a[j].clone();
            row[n + j] = -&f.a[j];
        }
        let mut b = -&f.b;
        if b.is_negative() {
            row.iter_mut().for_each(|x| *x = -&*x);
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
        needs_art.push(true);
    }
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let ncols = base_cols + n_art;
    let mut basis = vec![0; m];
    let mut art = base_cols;
    for i in 0..m {
        rows[i].resize(ncols, Rational::zero());
        if needs_art[i] {
            rows[i][art] = Rational::one();
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = 2 * n + i;
        }
    }
    let mut t = Tableau { rows, rhs, basis, ncols, blocked: vec![false; ncols] };

    if n_art > 0 {
        let mut c1 = vec![Rational::zero(); ncols];
        for x in c1.iter_mut().skip(base_cols) {
            *x = -Rational::one();
        }
        t.optimize(&c1);
        if t.value(&c1).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= base_cols {
                match (0..base_cols).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        let mut dummy = vec![Rational::zero(); ncols];
                        t.pivot(i, j, &mut dummy);
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for j in base_cols..ncols {
            t.blocked[j] = true;
        }
    }

    let mut c2 = vec![Rational::zero(); ncols];
    for j in 0..n {
        c2[j] = obj[j].clone();
        c2[n + j] = -&obj[j];
    }
    if !t.optimize(&c2) {
        return LpOutcome::Unbounded;
    }
    let mut full = vec![Rational::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        full[b] = t.rhs[i].clone();
    }
    let x: Point = (0..n).map(|j| &full[j] - &full[n + j]).collect();
    let value = super::rational::dot(obj, &x);
    LpOutcome::Optimal { value, x }
}
