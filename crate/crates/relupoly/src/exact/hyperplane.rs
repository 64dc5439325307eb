//! Affine forms `a·x + b` and canonically normalized hyperplanes.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, dot, format_rational, is_zero_vec, primitive_positive_multiple, Rational};

/// The affine function `x ↦ a·x + b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub a: Vec<Rational>,
    pub b: Rational,
}

impl AffineForm {
    pub fn new(a: Vec<Rational>, b: Rational) -> Self {
        AffineForm { a, b }
    }

    pub fn constant(dim: usize, b: Rational) -> Self {
        AffineForm { a: vec![Rational::zero(); dim], b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.a, x) + &self.b
    }

    pub fn is_constant(&self) -> bool {
        is_zero_vec(&self.a)
    }

    pub fn neg(&self) -> AffineForm {
        AffineForm { a: self.a.iter().map(|x| -x).collect(), b: -&self.b }
    }

    pub fn scaled(&self, s: &Rational) -> AffineForm {
        AffineForm { a: rational::scale_vec(&self.a, s), b: &self.b * s }
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        AffineForm { a: rational::sub_vec(&self.a, &other.a), b: &self.b - &other.b }
    }

    /// The zero set as a canonical hyperplane together with the orientation:
    /// `self = λ·(canonical form)` with `λ > 0` when the bool is `true`, `λ < 0` otherwise.
    /// `None` for constant forms.
    pub fn hyperplane(&self) -> Option<(Hyperplane, bool)> {
        if self.is_constant() {
            return None;
        }
        let h = Hyperplane::from_form(self);
        let lead = self.a.iter().find(|x| !x.is_zero()).expect("non-constant");
        Some((h, lead.is_positive()))
    }
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(format_rational).collect();
        write!(f, "{a:?}·x + {}", format_rational(&self.b))
    }
}

/// A hyperplane `{x : n·x + c = 0}` with `n` a primitive integer vector whose first nonzero entry is positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Hyperplane {
    /// Canonical hyperplane of a non-constant form.
    pub fn from_form(form: &AffineForm) -> Hyperplane {
        assert!(!form.is_constant(), "constant form has no hyperplane");
        let (mut normal, factor) = primitive_positive_multiple(&form.a);
        let mut offset = &form.b * &factor;
        let lead = normal.iter().find(|x| !x.is_zero()).expect("non-constant");
        if lead.is_negative() {
            normal = normal.iter().map(|x| -x).collect();
            offset = -offset;
        }
        Hyperplane { normal, offset }
    }

    pub fn form(&self) -> AffineForm {
        AffineForm { a: self.normal.clone(), b: self.offset.clone() }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) + &self.offset
    }

    pub fn norm2(&self) -> Rational {
        rational::norm2(&self.normal)
    }
}

impl fmt::Debug for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.normal.iter().map(format_rational).collect();
        write!(f, "{{{n:?}·x + {} = 0}}", format_rational(&self.offset))
    }
}

/// JSON shape for hyperplanes and forms.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FormJson {
    pub normal: Vec<String>,
    pub offset: String,
}

impl From<&Hyperplane> for FormJson {
    fn from(h: &Hyperplane) -> Self {
        FormJson { normal: h.normal.iter().map(format_rational).collect(), offset: format_rational(&h.offset) }
    }
}

impl From<&AffineForm> for FormJson {
    fn from(h: &AffineForm) -> Self {
        FormJson { normal: h.a.iter().map(format_rational).collect(), offset: format_rational(&h.b) }
    }
}
