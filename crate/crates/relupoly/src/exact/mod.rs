//! Exact rational geometry: scalars, matrices, hyperplanes, linear programming, polytopes.

pub mod arrangement;
pub mod cell;
pub mod hyperplane;
pub mod lp;
pub mod matrix;
pub mod polyhedron;
pub mod rational;

pub use arrangement::{essentialize, generic_arrangement_in, is_generic_arrangement, Essentialization};
pub use cell::Cell;
pub use hyperplane::{AffineForm, FormJson, Hyperplane};
pub use matrix::Matrix;
pub use polyhedron::{lp_feasible, polyhedron_dim, Feasibility, Polyhedron};
pub use rational::{format_rational, parse_rational, Point, Rational};
