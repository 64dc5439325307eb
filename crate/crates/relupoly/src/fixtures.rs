//! Small hand-made networks for tests and CLI demos.

use crate::exact::rational::{frac, int};
use crate::exact::Rational;
use crate::net::Parameter;

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// `relu(x)`, `relu(y)`, then `relu(a1 + a2 − 1)`, output the last activation.
pub fn corner_net() -> Parameter {
    Parameter::from_rows(
        &[2, 2, 1, 1],
        vec![(vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])), (vec![q(&[1, 1])], q(&[-1])), (vec![q(&[1])], q(&[0]))],
    )
    .expect("valid shapes")
}

/// Three parameters realizing `min{0, max{x2 − x1 + 1, −x2}}`, all with output bias 0.
pub fn depth_hierarchy_realizations() -> [Parameter; 3] {
    let r1 = Parameter::from_rows(
        &[2, 2, 2, 1],
        vec![
            (vec![q(&[1, 0]), q(&[0, 1])], q(&[0, 0])),
            (vec![q(&[1, -1]), q(&[1, -2])], q(&[-1, -1])),
            (vec![q(&[-1, 1])], q(&[0])),
        ],
    )
    .expect("valid shapes");
    let r2 = Parameter::from_rows(
        &[2, 2, 2, 1],
        vec![
            (vec![q(&[1, 1]), q(&[1, -1])], q(&[0, -1])),
            (vec![vec![frac(1, 2), frac(-1, 2)], vec![frac(1, 2), frac(-3, 2)]], vec![frac(-1, 2), frac(-1, 2)]),
            (vec![q(&[-1, 1])], q(&[0])),
        ],
    )
    .expect("valid shapes");
    let r3 = Parameter::from_rows(
        &[2, 2, 1, 1],
        vec![(vec![q(&[0, 1]), q(&[-1, 2])], q(&[1, 1])), (vec![q(&[1, -1])], q(&[-1])), (vec![q(&[-1])], q(&[0]))],
    )
    .expect("valid shapes");
    [r1, r2, r3]
}

/// `min{0, max{x2 − x1 + 1, −x2}}`.
pub fn depth_hierarchy_function(x: &[Rational]) -> Rational {
    let a = &x[1] - &x[0] + int(1);
    let b = -x[1].clone();
    let m = if a > b { a } else { b };
    if m < int(0) {
        m
    } else {
        int(0)
    }
}
