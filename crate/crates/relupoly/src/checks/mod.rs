//! Parameter-class verdicts such as genericity, cTPIC and LRA, plus the aggregate identifiability
//! verdict and the numeric functional dimension.

mod ctpic;
mod funcdim;
mod genericity;
mod identifiability;
mod min_width;
mod structure;

use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::Result;
use crate::exact::Polyhedron;
use crate::net::Parameter;
use crate::tropical::breakpoint_complex;

pub use ctpic::{ctpic_check, ctpic_on, CtpicResult};
pub use funcdim::{
    expected_functional_dimension, functional_dimension_estimate, jacobian, FunctionalDimension, RANK_CUTOFF,
};
pub use genericity::{genericity_check, rank_condition, region_condition, RANK_EXHAUSTIVE_LIMIT};
pub use identifiability::{
    identifiability_verdict, lra_verdict, transparency_verdict, IdentifiabilityReport, PolytopeAttempt,
};
pub use min_width::min_width_lower_bound;
pub use structure::{cancellation_free_check, supertransversality_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Passed on a random sample of an enumeration too large to finish.
    ProbabilisticPass,
}

/// Outcome of one property check. A failure always carries at least one witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub status: Status,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn pass(property: &str) -> Verdict {
        Verdict { property: property.into(), status: Status::Pass, witnesses: Vec::new(), notes: Vec::new() }
    }

    pub fn fail(property: &str, witnesses: Vec<String>) -> Verdict {
        debug_assert!(!witnesses.is_empty());
        Verdict { property: property.into(), status: Status::Fail, witnesses, notes: Vec::new() }
    }

    pub fn from_witnesses(property: &str, witnesses: Vec<String>) -> Verdict {
        if witnesses.is_empty() {
            Verdict::pass(property)
        } else {
            Verdict::fail(property, witnesses)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.notes.push(note.into());
        self
    }

    /// Pass or probabilistic pass.
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Genericity, supertransversality, cancellation-freeness, transparency, LRA and cTPIC on `domain`.
pub fn all_verdicts(theta: &Parameter, domain: &Polyhedron, seed: u64) -> Result<Vec<Verdict>> {
    let cx = Complex::build(theta, domain)?;
    let bp = breakpoint_complex(&cx)?;
    Ok(vec![
        genericity_check(theta, domain, seed)?,
        supertransversality_check(&cx),
        cancellation_free_check(&cx, &bp.weights),
        transparency_verdict(theta, domain)?,
        identifiability::lra_complex(&cx)?,
        ctpic_on(&cx, &bp).verdict,
    ])
}

#[cfg(test)]
mod tests;
