//! Quaternions, the spin double covers of `SO₃` and `SO₄`, and their local inverses.

mod covering;
mod quaternion;

pub use covering::{
    check_special_orthogonal, check_special_orthogonal_within, dpi3, dpi3_inverse, dpi4,
    dpi4_inverse, exp_im, pi3, pi4, so3_to_spin, so4_to_spin, RotationMatrix3, RotationMatrix4,
    SpinCover,
};
pub use quaternion::{quat_mul, ImaginaryQuaternion, Quaternion, Spin4Element, UnitQuaternion};
