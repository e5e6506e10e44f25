//! Numerical toolkit for locally convex and generic curves on the spheres S² and S³.
//!
//! The crate is organised around the objects that describe such curves:
//!
//! * [`spin_algebra`]: quaternions, the double covers `Spin₃ → SO₃` and
//!   `Spin₄ ≅ S³×S³ → SO₄`, their differentials and local inverses.
//! * [`bruhat`]: signed permutations and the Bruhat cells of `SO₃`, `SO₄` and
//!   their lifts to the spin groups.
//! * [`curves`]: sampled curves, Frenet frames, curvature profiles, convexity
//!   predicates and the named example families.
//! * [`frames_ode`]: reconstruction of frames and spin lifts from logarithmic
//!   derivatives by a projected RK4 integrator.
//! * [`decompose`]: the bijection between curves on S³ and shared-speed pairs of
//!   curves on S².
//! * [`surgery`]: adding loops, the tangent-circle modification, the `#`
//!   operation and relaxation-reflection.
//! * [`verify`]: the numerical acceptance checks, shared by the test suite and
//!   the `spincurve check` command.

pub mod bruhat;
pub mod config;
pub mod curves;
pub mod decompose;
pub mod error;
pub mod frames_ode;
pub mod linalg;
pub mod spin_algebra;
pub mod surgery;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
