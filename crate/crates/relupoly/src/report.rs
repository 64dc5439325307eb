//! The aggregate analysis report behind `relupoly report`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checks::{all_verdicts, identifiability_verdict, IdentifiabilityReport, Verdict};
use crate::complex::Complex;
use crate::depgraph::{depth_certificate, layered_subgraph_check, longest_chain, DependencyGraph, DepthCertificate};
use crate::error::Result;
use crate::exact::{format_rational, Polyhedron, Rational};
use crate::net::Parameter;
use crate::tropical::{breakpoint_complex, weight_table, WeightJson};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub architecture: Vec<usize>,
    /// SHA-256 of the network's canonical JSON text.
    pub sha256: String,
    #[serde(rename = "box")]
    pub half_width: String,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexStats {
    pub regions: usize,
    pub facets: usize,
    pub ridges: usize,
    pub breakpoint_facets: usize,
    pub breakpoint_ridges: usize,
    /// Breakpoint facets meeting the box boundary; geometry beyond the box is not examined.
    pub clipped_breakpoint_facets: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub candidates: usize,
    pub edges: Vec<(usize, usize)>,
    pub longest_chain: Vec<usize>,
    /// Whether the graph contains the fully connected layered subgraph of the architecture.
    pub layered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub input: InputDigest,
    pub complex: ComplexStats,
    pub weights: Vec<WeightJson>,
    pub verdicts: Vec<Verdict>,
    pub identifiability: IdentifiabilityReport,
    pub dependency_graph: GraphSummary,
    /// The depth certificate against the network's own depth.
    pub depth_certificate: DepthCertificate,
    /// Wall-clock seconds per stage, present only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

/// Everything the library can say about `θ` on `[−r, r]^d`.
pub fn analyze(theta: &Parameter, r: &Rational, seed: u64, timings: bool) -> Result<AnalysisReport> {
    let mut clock = BTreeMap::new();
    let mut lap = {
        let mut t = Instant::now();
        move |name: &str, clock: &mut BTreeMap<String, f64>| {
            clock.insert(name.to_string(), t.elapsed().as_secs_f64());
            t = Instant::now();
        }
    };
    let domain = Polyhedron::cube(theta.input_dim(), r);
    let cx = Complex::build(theta, &domain)?;
    let bp = breakpoint_complex(&cx)?;
    lap("complex", &mut clock);
    let graph = DependencyGraph::from_breakpoints(&cx, &bp);
    lap("dependency_graph", &mut clock);
    let verdicts = all_verdicts(theta, &domain, seed)?;
    let identifiability = identifiability_verdict(theta, &[("box".to_string(), domain.clone())], seed)?;
    lap("verdicts", &mut clock);
    let digest = Sha256::digest(theta.to_json_string().as_bytes());
    Ok(AnalysisReport {
        input: InputDigest {
            architecture: theta.arch.0.clone(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            half_width: format_rational(r),
            seed,
        },
        complex: ComplexStats {
            regions: cx.regions.len(),
            facets: cx.facets.len(),
            ridges: cx.ridges.len(),
            breakpoint_facets: bp.facets.len(),
            breakpoint_ridges: bp.ridges.len(),
            clipped_breakpoint_facets: bp.facets.iter().filter(|&&f| cx.facets[f].box_clipped).count(),
        },
        weights: weight_table(&cx, &bp.weights),
        verdicts,
        identifiability,
        dependency_graph: GraphSummary {
            candidates: graph.num_vertices(),
            edges: graph.edges.iter().map(|e| (e.from, e.to)).collect(),
            longest_chain: longest_chain(&graph),
            layered: layered_subgraph_check(&graph, &theta.arch),
        },
        depth_certificate: depth_certificate(&graph, theta.depth()),
        timings: timings.then_some(clock),
    })
}
