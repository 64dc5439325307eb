//! Python bindings. Networks cross the boundary as their JSON text and rationals as strings,
//! so results stay exact.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::relupoly::checks::{all_verdicts, functional_dimension_estimate};
use ::relupoly::complex::default_box;
use ::relupoly::construct::{build_identifiable, build_minimal_nonidentifiable, BuildOptions};
use ::relupoly::exact::{format_rational, parse_rational, Polyhedron, Rational};
use ::relupoly::net::{Architecture, Parameter};
use ::relupoly::render::complex_svg;
use ::relupoly::report::analyze as analyze_report;

fn py_err(e: ::relupoly::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn half_width(r: Option<&str>) -> PyResult<Rational> {
    r.map_or_else(|| Ok(default_box()), |s| parse_rational(s).map_err(py_err))
}

fn load(net: &str) -> PyResult<Parameter> {
    Parameter::from_json_str(net).map_err(py_err)
}

fn options(seed: u64, radius: Option<&str>, eps: Option<&str>) -> PyResult<BuildOptions> {
    let mut o = BuildOptions { seed, ..BuildOptions::default() };
    if let Some(r) = radius {
        o.radius = parse_rational(r).map_err(py_err)?;
    }
    if let Some(e) = eps {
        o.eps = parse_rational(e).map_err(py_err)?;
    }
    Ok(o)
}

/// Exact outputs at each point; coordinates and results are rational strings such as `"-3/4"`.
#[pyfunction]
pub fn evaluate(net: &str, points: Vec<Vec<String>>) -> PyResult<Vec<Vec<String>>> {
    let theta = load(net)?;
    points
        .iter()
        .map(|p| {
            let x = p.iter().map(|s| parse_rational(s)).collect::<::relupoly::Result<Vec<_>>>().map_err(py_err)?;
            if x.len() != theta.input_dim() {
                return Err(PyValueError::new_err(format!("expected {} coordinates", theta.input_dim())));
            }
            Ok(theta.eval(&x).iter().map(format_rational).collect())
        })
        .collect()
}

/// Property verdicts as a JSON list.
#[pyfunction]
#[pyo3(signature = (net, r#box=None, seed=0))]
pub fn check(net: &str, r#box: Option<&str>, seed: u64) -> PyResult<String> {
    let theta = load(net)?;
    let p = Polyhedron::cube(theta.input_dim(), &half_width(r#box)?);
    to_json(&all_verdicts(&theta, &p, seed).map_err(py_err)?)
}

/// The full analysis report as JSON.
#[pyfunction]
#[pyo3(signature = (net, r#box=None, seed=0))]
pub fn analyze(net: &str, r#box: Option<&str>, seed: u64) -> PyResult<String> {
    let theta = load(net)?;
    to_json(&analyze_report(&theta, &half_width(r#box)?, seed, false).map_err(py_err)?)
}

/// `(rank, expected)` of the sampled parameter Jacobian.
#[pyfunction]
#[pyo3(signature = (net, samples=200, seed=0, r#box=None))]
pub fn functional_dimension(net: &str, samples: usize, seed: u64, r#box: Option<&str>) -> PyResult<(usize, usize)> {
    let theta = load(net)?;
    let p = Polyhedron::cube(theta.input_dim(), &half_width(r#box)?);
    let f = functional_dimension_estimate(&theta, &p, samples, seed).map_err(py_err)?;
    Ok((f.rank, f.expected))
}

/// `(net_json, trail_json)` for a parameter passing every verdict.
#[pyfunction]
#[pyo3(signature = (arch, seed=0, radius=None, eps=None))]
pub fn construct_identifiable(
    arch: Vec<usize>,
    seed: u64,
    radius: Option<&str>,
    eps: Option<&str>,
) -> PyResult<(String, String)> {
    let arch = Architecture::new(arch).map_err(py_err)?;
    let (theta, trail) = build_identifiable(&arch, &options(seed, radius, eps)?).map_err(py_err)?;
    Ok((theta.to_json_string(), to_json(&trail.to_json(&theta).map_err(py_err)?)?))
}

/// `(net_json, block_json)` with a two-neuron linear block in the last hidden layer.
#[pyfunction]
#[pyo3(signature = (arch, seed=0, radius=None, eps=None))]
pub fn construct_nonidentifiable(
    arch: Vec<usize>,
    seed: u64,
    radius: Option<&str>,
    eps: Option<&str>,
) -> PyResult<(String, String)> {
    let arch = Architecture::new(arch).map_err(py_err)?;
    let (theta, block) = build_minimal_nonidentifiable(&arch, &options(seed, radius, eps)?).map_err(py_err)?;
    Ok((theta.to_json_string(), to_json(&block.to_json(&theta))?))
}

/// SVG of a planar network's complex.
#[pyfunction]
#[pyo3(signature = (net, r#box=None))]
pub fn render_svg(net: &str, r#box: Option<&str>) -> PyResult<String> {
    complex_svg(&load(net)?, &half_width(r#box)?, None).map_err(py_err)
}

#[pymodule(name = "relupoly")]
fn relupoly_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(functional_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(construct_identifiable, m)?)?;
    m.add_function(wrap_pyfunction!(construct_nonidentifiable, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    Ok(())
}
