//! JSON form of a complex.

use serde::{Deserialize, Serialize};

use super::Complex;
use crate::exact::hyperplane::FormJson;
use crate::exact::{format_rational, Rational};
use crate::net::pattern_string;

fn text(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionJson {
    pub id: usize,
    pub pattern: String,
    /// Inequalities `normal·x + offset ≥ 0`.
    pub inequalities: Vec<FormJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
    pub interior_point: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_linear: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_offset: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetJson {
    pub id: usize,
    pub regions: [usize; 2],
    pub hyperplane: FormJson,
    pub incident: Vec<String>,
    pub box_clipped: bool,
    pub point: Vec<String>,
    pub pattern: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgeJson {
    pub id: usize,
    pub point: Vec<String>,
    pub pattern: String,
    pub facets: Vec<usize>,
    pub regions: Vec<usize>,
    pub incident: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dim: usize,
    pub depth: usize,
    pub domain: Vec<FormJson>,
    pub regions: Vec<RegionJson>,
    pub facets: Vec<FacetJson>,
    pub ridges: Vec<RidgeJson>,
}

impl ComplexJson {
    pub fn from_complex(cx: &Complex) -> Self {
        let verts = |c: &crate::exact::Cell| c.vertices().map(|vs| vs.iter().map(|v| text(v)).collect());
        ComplexJson {
            dim: cx.dim(),
            depth: cx.depth,
            domain: cx.domain.poly.ineqs.iter().map(FormJson::from).collect(),
            regions: cx
                .regions
                .iter()
                .map(|r| RegionJson {
                    id: r.id,
                    pattern: pattern_string(&r.pattern),
                    inequalities: r.cell.poly.ineqs.iter().map(FormJson::from).collect(),
                    vertices: verts(&r.cell),
                    interior_point: text(&r.interior_point()),
                    output_linear: r.output.as_ref().map(|m| m.a.rows_vec().iter().map(|row| text(row)).collect()),
                    output_offset: r.output.as_ref().map(|m| text(&m.c)),
                })
                .collect(),
            facets: cx
                .facets
                .iter()
                .map(|f| FacetJson {
                    id: f.id,
                    regions: f.regions,
                    hyperplane: FormJson::from(&f.hyperplane),
                    incident: f.incident.iter().map(|n| n.to_string()).collect(),
                    box_clipped: f.box_clipped,
                    point: text(&f.point),
                    pattern: pattern_string(&f.pattern),
                    vertices: verts(&f.cell),
                })
                .collect(),
            ridges: cx
                .ridges
                .iter()
                .map(|r| RidgeJson {
                    id: r.id,
                    point: text(&r.point),
                    pattern: pattern_string(&r.pattern),
                    facets: r.facets.clone(),
                    regions: r.regions.clone(),
                    incident: r.incident.iter().map(|n| n.to_string()).collect(),
                })
                .collect(),
        }
    }
}
