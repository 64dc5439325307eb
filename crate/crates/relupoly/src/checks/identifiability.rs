use serde::{Deserialize, Serialize};

use super::{ctpic_on, genericity_check, Verdict};
use crate::complex::Complex;
use crate::error::Result;
use crate::exact::{format_rational, Polyhedron};
use crate::net::Parameter;
use crate::tropical::{breakpoint_complex, lra_on, transparency_check};

/// LRA on `x` as a verdict; witnesses are interior points of zero-weight facets.
pub fn lra_verdict(theta: &Parameter, x: &Polyhedron) -> Result<Verdict> {
    let cx = Complex::build(theta, x)?;
    lra_complex(&cx)
}

pub(crate) fn lra_complex(cx: &Complex) -> Result<Verdict> {
    let r = lra_on(cx)?;
    let w = r.offending.iter().map(|p| format!("zero-weight facet through ({})", p.join(", "))).collect();
    Ok(Verdict::from_witnesses("LRA", w).with_note(format!("{} facets checked", r.facets_checked)))
}

/// Transparency of every hidden layer `2..=L` on `x`.
pub fn transparency_verdict(theta: &Parameter, x: &Polyhedron) -> Result<Verdict> {
    let mut w = Vec::new();
    for l in 2..=theta.depth() {
        let r = transparency_check(theta, l, x)?;
        if let Some(p) = r.witness {
            let p: Vec<String> = p.iter().map(format_rational).collect();
            w.push(format!("layer {l} is entirely off at ({})", p.join(", ")));
        }
    }
    Ok(Verdict::from_witnesses("transparent", w))
}

/// cTPIC and LRA on one candidate polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeAttempt {
    pub label: String,
    pub ctpic: Verdict,
    pub lra: Verdict,
}

impl PolytopeAttempt {
    pub fn passed(&self) -> bool {
        self.ctpic.passed() && self.lra.passed()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    pub generic: Verdict,
    pub attempts: Vec<PolytopeAttempt>,
    /// Label of the first polytope on which cTPIC and LRA both hold.
    pub witness_polytope: Option<String>,
    pub identifiable_among_generic: bool,
    pub summary: String,
}

/// Sufficient-condition verdict: `θ` generic and some full-dimensional candidate polytope
/// carrying both cTPIC and LRA. A negative outcome only lists the premises that failed.
pub fn identifiability_verdict(
    theta: &Parameter,
    candidates: &[(String, Polyhedron)],
    seed: u64,
) -> Result<IdentifiabilityReport> {
    let domain = candidates
        .first()
        .map(|(_, p)| p.clone())
        .unwrap_or_else(|| crate::complex::working_box(theta.input_dim(), &crate::complex::default_box()));
    let generic = genericity_check(theta, &domain, seed)?;
    let mut attempts = Vec::new();
    let mut witness = None;
    for (label, p) in candidates {
        if p.dimension() != p.dim as i64 {
            continue;
        }
        let cx = Complex::build(theta, p)?;
        let bp = breakpoint_complex(&cx)?;
        let a = PolytopeAttempt { label: label.clone(), ctpic: ctpic_on(&cx, &bp).verdict, lra: lra_complex(&cx)? };
        let ok = a.passed();
        attempts.push(a);
        if ok {
            witness = Some(label.clone());
            break;
        }
    }
    let identifiable = generic.passed() && witness.is_some();
    let summary = if identifiable {
        "identifiable among generic parameters".to_string()
    } else {
        let mut failed = Vec::new();
        if !generic.passed() {
            failed.push("non-generic");
        }
        if witness.is_none() {
            if attempts.iter().all(|a| !a.ctpic.passed()) {
                failed.push("cTPIC");
            }
            if attempts.iter().all(|a| !a.lra.passed()) {
                failed.push("LRA");
            }
            if failed.is_empty() || attempts.is_empty() {
                failed.push("no polytope with both cTPIC and LRA");
            }
        }
        format!("premises fail ({})", failed.join(", "))
    };
    Ok(IdentifiabilityReport {
        generic,
        attempts,
        witness_polytope: witness,
        identifiable_among_generic: identifiable,
        summary,
    })
}
