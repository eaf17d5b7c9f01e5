//! Numerics for the Teichmüller TQFT state integral of the knot 7_3.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Li₂, Bloch–Wigner, Lobachevsky and Faddeev's quantum dilogarithm Φ_b.
//! * [`triangulation`]: the two built-in triangulations of 7_3 and angle-structure bookkeeping.
//! * [`angle_opt`]: volume maximisation over the angle-structure polytope.
//! * [`complex_geometry`]: complex shapes, the potential S and its critical point, and the
//!   reduced two-variable saddle analysis.
//! * [`integrator`]: contour quadrature of the state integral, the ħ-sweep and the
//!   H-triangulation modulus check.
//! * [`cli`]: configuration and report plumbing behind the `tqft-volume` binary.
//!
//! The runnable programs under `examples/` walk through each stage.

pub mod angle_opt;
pub mod cli;
pub mod complex_geometry;
pub mod error;
pub mod integrator;
pub mod specfun;
pub mod triangulation;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// Hyperbolic volume of the complement of 7_3.
pub const VOL_7_3: f64 = 4.592125697;
