//! Exact rational scalars and their textual form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A point or direction in rational coordinates.
pub type Point = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` and integers exactly, as well as decimal strings such as `"-0.45"` or `"1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fractional) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fractional.is_empty() {
        return Err(Error::Parse(format!("no digits in {s:?}")));
    }
    if !whole.chars().chain(fractional.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a rational: {s:?}")));
    }
    let all: BigInt = format!("0{whole}{fractional}").parse().expect("digits only");
    let scale = exponent - fractional.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // Shift both parts down until they fit in f64 range.
    let bits = q.numer().bits().max(q.denom().bits()) as i64;
    let shift = (bits - 1000).max(0) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Exact binary expansion of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite float {x}")))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn norm2(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(a: &[Rational], s: &Rational) -> Point {
    a.iter().map(|x| x * s).collect()
}

/// Least common multiple of all denominators.
pub fn common_denominator(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Gcd of the numerators of an integer-valued vector, zero if all entries vanish.
pub fn integer_content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// The positive multiple of `v` that is a primitive integer vector (unchanged if zero).
pub fn primitive_positive_multiple(v: &[Rational]) -> (Vec<Rational>, Rational) {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = integer_content(&ints);
    if g.is_zero() {
        return (v.to_vec(), Rational::one());
    }
    let factor = Rational::new(den, g.abs());
    (v.iter().map(|x| x * &factor).collect(), factor)
}

/// Cross-ratio test: is `a = k b` for some `k > 0`? Zero vectors are only parallel to zero vectors.
pub fn positive_multiple(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    let i = a.iter().position(|x| !x.is_zero())?;
    if b[i].is_zero() {
        return None;
    }
    let k = &a[i] / &b[i];
    if !k.is_positive() {
        return None;
    }
    a.iter().zip(b).all(|(x, y)| *x == &k * y).then_some(k)
}
