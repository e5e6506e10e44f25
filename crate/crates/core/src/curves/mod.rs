//! Curves on S² and S³: sampling, Frenet frames, curvature profiles, convexity
//! predicates and the named example families.

mod convexity;
pub mod families;
mod grid;
mod profile;
mod sampled;

pub use convexity::{is_convex_arc, is_convex_points, multiconvex_multiplicity, Multiconvexity};
pub use grid::{Grid, Side};
pub(crate) use profile::interpolate;
pub use profile::{
    Constant, CurvatureProfile2, CurvatureProfile3, FnProfile, PiecewiseProfile, ProfileFn,
    Reparametrized, SampledProfile, SharedProfile,
};
pub use sampled::{
    curvature_torsion, fornberg_weights, frenet_frame, is_locally_convex, ConvexityReport,
    SampledCurve, SphereCurve,
};
