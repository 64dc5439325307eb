//! Explicit constructions: identifiable parameters built from stacked slab layers, minimal
//! non-identifiable ones with a hidden linear block, and one-layer compression.

mod compress;
mod identifiable;
mod nonident;
mod slab;

pub use compress::{affine_difference_signature, compress_one_layer};
pub use identifiable::{
    build_identifiable, trail_polytopes, BuildOptions, ConstructionTrail, Stage, StageJson, TrailJson,
    MAX_OUTPUT_RESAMPLES,
};
pub use nonident::{build_minimal_nonidentifiable, gl2_fiber_walk, LinearBlock, LinearBlockJson};
pub use slab::{
    closeness, inside, make_slab_layer, pivot_hyperplane, pivot_through, pullback_pieces, Pivot, PreviousSlab,
    SlabJson, SlabLayer, SlabSite,
};

#[cfg(test)]
mod tests;
