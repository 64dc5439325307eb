//! SVG pictures of planar canonical complexes and DOT text for dependency graphs.

use std::fmt::Write as _;

use crate::complex::Complex;
use crate::depgraph::DependencyGraph;
use crate::error::{Error, Result};
use crate::exact::rational::to_f64;
use crate::exact::{format_rational, parse_rational, Matrix, Point, Polyhedron, Rational};
use crate::net::{Layer, Parameter};
use crate::tropical::breakpoint_complex;

/// Stroke colour of bent hyperplanes by layer; layer 1 is black, layer 2 red.
pub const LAYER_COLORS: &[&str] = &["#000000", "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"];

const SIZE: f64 = 480.0;
const MARGIN: f64 = 16.0;

/// The plane `origin + s·u + t·v` through a higher-dimensional input space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub origin: Point,
    pub u: Point,
    pub v: Point,
}

impl Slice {
    /// Parses `o1,…,od;u1,…,ud;v1,…,vd`.
    pub fn parse(s: &str) -> Result<Slice> {
        let parts: Vec<Point> = s
            .split(';')
            .map(|p| p.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [o, u, v] if o.len() == u.len() && u.len() == v.len() => {
                Ok(Slice { origin: o.clone(), u: u.clone(), v: v.clone() })
            }
            _ => Err(Error::Parse(format!("slice `{s}` is not three points of equal length"))),
        }
    }

    pub fn describe(&self) -> String {
        let t = |p: &[Rational]| p.iter().map(format_rational).collect::<Vec<_>>().join(",");
        format!("{};{};{}", t(&self.origin), t(&self.u), t(&self.v))
    }
}

/// The network restricted to the slice, as a network on the plane.
pub fn slice_parameter(theta: &Parameter, slice: &Slice) -> Result<Parameter> {
    let d = theta.input_dim();
    if slice.origin.len() != d {
        return Err(Error::Shape(format!("slice lives in dimension {}, the network in {d}", slice.origin.len())));
    }
    let basis = Matrix::from_rows(2, (0..d).map(|i| vec![slice.u[i].clone(), slice.v[i].clone()]).collect());
    let first = &theta.layers[0];
    let b = first.w.mul_vec(&slice.origin).into_iter().zip(&first.b).map(|(x, b)| x + b).collect();
    let mut layers = theta.layers.clone();
    layers[0] = Layer { w: first.w.mul(&basis), b };
    let mut widths = theta.arch.0.clone();
    widths[0] = 2;
    Parameter::new(crate::net::Architecture(widths), layers)
}

fn extreme_pair(verts: &[Point]) -> Option<(Point, Point)> {
    let lo = verts.iter().min()?;
    let hi = verts.iter().max()?;
    (lo != hi).then(|| (lo.clone(), hi.clone()))
}

/// SVG of the canonical complex of a planar network on `[−r, r]²`. Facets with nonzero weight
/// are solid and coloured by the layer of their neuron; zero-weight facets are dashed and faded.
pub fn complex_svg(theta: &Parameter, r: &Rational, slice: Option<&Slice>) -> Result<String> {
    let planar = match slice {
        Some(s) => slice_parameter(theta, s)?,
        None if theta.input_dim() == 2 => theta.clone(),
        None => return Err(Error::Precondition("SVG needs a planar input; pass a slice for higher dimensions".into())),
    };
    let domain = Polyhedron::cube(2, r);
    let cx = Complex::build(&planar, &domain)?;
    let bp = breakpoint_complex(&cx)?;
    let rf = to_f64(r);
    let map = |p: &Point| {
        let x = MARGIN + (to_f64(&p[0]) + rf) / (2.0 * rf) * SIZE;
        let y = MARGIN + (rf - to_f64(&p[1])) / (2.0 * rf) * SIZE;
        (x, y)
    };
    let total = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(s, "<!-- box [-{0},{0}]^2 -->", format_rational(r));
    if let Some(sl) = slice {
        let _ = writeln!(s, "<!-- slice {} -->", sl.describe());
    }
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#999999"/>"##
    );
    for f in &cx.facets {
        let Some((a, b)) = f.cell.vertices().and_then(extreme_pair) else { continue };
        let (x1, y1) = map(&a);
        let (x2, y2) = map(&b);
        let layer = cx.facet_layer(f.id).or_else(|| f.incident.iter().map(|n| n.layer).min()).unwrap_or(1);
        let color = LAYER_COLORS[(layer - 1) % LAYER_COLORS.len()];
        let style =
            if bp.contains(f.id) { String::new() } else { r#" stroke-dasharray="4 3" stroke-opacity="0.35""#.into() };
        let names: Vec<String> = f.incident.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{color}" stroke-width="2"{style}><title>facet {} {}</title></line>"#,
            f.id,
            names.join(" ")
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// DOT text of the dependency graph of `θ` on `domain`, with vertices labelled by the neurons
/// that carry them.
pub fn dependency_dot(theta: &Parameter, domain: &Polyhedron) -> Result<String> {
    let cx = Complex::build(theta, domain)?;
    let g = DependencyGraph::build(&cx)?;
    Ok(g.to_dot(Some(&g.ground_truth(&cx))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::int;
    use crate::fixtures::corner_net;

    #[test]
    fn corner_net_has_black_and_red_lines() {
        let svg = complex_svg(&corner_net(), &int(4), None).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r##"stroke="#000000""##));
        assert!(svg.contains(r##"stroke="#d62728""##));
    }

    #[test]
    fn three_dimensional_nets_need_a_slice() {
        let theta = Parameter::from_rows(
            &[3, 1, 1],
            vec![(vec![vec![int(1), int(1), int(1)]], vec![int(0)]), (vec![vec![int(1)]], vec![int(0)])],
        )
        .unwrap();
        assert!(complex_svg(&theta, &int(1), None).is_err());
        let slice = Slice::parse("0,0,1/2;1,0,0;0,1,0").unwrap();
        let planar = slice_parameter(&theta, &slice).unwrap();
        assert_eq!(planar.b(1), &[Rational::new(1.into(), 2.into())]);
        let svg = complex_svg(&theta, &int(1), Some(&slice)).unwrap();
        assert!(svg.contains("slice 0,0,1/2;1,0,0;0,1,0"));
    }
}
