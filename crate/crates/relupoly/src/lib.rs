//! Exact polyhedral and tropical analysis of ReLU networks.

pub mod checks;
pub mod complex;
pub mod construct;
pub mod depgraph;
pub mod error;
pub mod exact;
pub mod fiber;
pub mod fixtures;
pub mod net;
pub mod random;
pub mod render;
pub mod report;
pub mod tropical;

pub use error::{Error, Result};
