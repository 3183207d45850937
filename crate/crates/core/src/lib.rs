//! Ideal hyperbolic structures on triangulated balls.
//!
//! The crate computes complete hyperbolic structures on ideal triangulations
//! with prescribed dihedral angle totals by maximizing total volume, develops
//! the result into the upper half-space model, and derives boundary data
//! (induced metrics, truncated edge lengths, circle patterns).  A small exact
//! arithmetic module tracks angle charts across diagonal flips.
//!
//! Modules, bottom up:
//!
//! * [`loba`] - Lobachevsky function, ideal tetrahedron volume and derivatives.
//! * [`complex`] - gluing data, edge/vertex classes, boundary cellulation, circuits.
//! * [`angles`] - angle assignments, targets, combinatorial validation.
//! * [`geom`] - shape parameters, shears, truncated lengths, developing maps.
//! * [`solver`] - concave volume maximization over an angle polytope.
//! * [`boundary`] - induced boundary metrics: shifts and length classes.
//! * [`packing`] - spherical Delaunay, circle packings, SVG output.
//! * [`teich`] - exact rational angle charts and diagonal flip holonomy.

pub mod angles;
pub mod boundary;
pub mod cell;
pub mod complex;
mod cycles;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod loba;
pub mod packing;
pub mod solver;
pub mod teich;

mod linalg;
mod simplex;

pub use error::{Error, Result};

/// Cap the worker pool used by the data-parallel paths.  Must run before the
/// first parallel call in the process; afterwards the pool is frozen and this
/// reports an error.
#[cfg(feature = "parallel")]
pub fn set_threads(n: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
