//! Multi-phase torsion transmission problems on perturbed concentric
//! geometries in the plane.
//!
//! The crate is `no_std` (with `alloc`) and contains the numerics only:
//!
//! - [`geometry`]: star-shaped curves, normals, curvature, collocation grids.
//! - [`radial`]: closed-form radial solutions and the phase-collapse map.
//! - [`layered`]: Fourier–Laurent collocation solver for layered problems.
//! - [`dtn`]: the two-phase Dirichlet-to-Neumann spectrum and the
//!   jump-to-Neumann map.
//! - [`shape_deriv`]: shape derivative of the two-phase state.
//! - [`constructor`]: the Neumann-tracking map and the quasi-Newton
//!   construction of non-radial configurations with infinitely many
//!   overdetermined conditions.
//! - [`verify`]: independent re-solves and identity checks.
#![no_std]

extern crate alloc;

pub mod constructor;
pub mod dtn;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod layered;
mod linalg;
pub mod radial;
pub mod shape_deriv;
pub mod verify;

pub use error::{Error, Result};
pub use fourier::FourierField;
pub use geometry::{StarCurve, Vec2};
pub use layered::{LayeredGeometry, PiecewiseSolution, SolverConfig};
pub use radial::{PhaseConfig, RadialProfile};
