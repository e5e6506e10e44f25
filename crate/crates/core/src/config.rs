//! Numerical tolerances used across the crate.

/// Tolerance record. [`Tolerances::DEFAULT`] holds the values every public
/// function uses unless a caller passes its own record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unit norm of a stored [`UnitQuaternion`](crate::spin_algebra::UnitQuaternion).
    pub construction: f64,
    /// Inputs whose norm deviates from one by more than this are rejected.
    pub unit_reject: f64,
    /// `‖QᵀQ − I‖` and `|det Q − 1|` for rotation matrices.
    pub orthogonality: f64,
    /// Residual of a lift `Π(z) = R` produced by the local inverses.
    pub round_trip: f64,
    /// Bruhat pivots must exceed this, relative to the working column norm.
    pub pivot: f64,
    /// Below this (relative) an entry is an exact zero for the pivot search;
    /// between `pivot_noise` and `pivot` the classification is ambiguous.
    pub pivot_noise: f64,
    /// Max-norm distance for `F(t) = I` in the multiconvexity test.
    pub frame_identity: f64,
    /// Curvatures of smaller magnitude count as zero in convexity predicates.
    pub curvature_zero: f64,
    /// Consecutive spin lifts farther apart than this signal a sheet jump.
    pub lift_jump: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        construction: 1e-12,
        unit_reject: 1e-8,
        orthogonality: 1e-10,
        round_trip: 1e-8,
        pivot: 1e-9,
        pivot_noise: 1e-11,
        frame_identity: 1e-6,
        curvature_zero: 1e-9,
        lift_jump: 0.5,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
