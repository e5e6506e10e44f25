//! Logarithmic derivatives of frame curves and their reconstruction by a
//! projected RK4 integrator, in `SO_{n+1}` and directly in the spin group.

mod generator;
mod integrate;
mod jacobi;

pub use generator::{ConstantGenerator, Generator, ProfileGenerator, SampledGenerator};
pub use integrate::{
    curve_from_profile2, curve_from_profile3, integrate_frame, integrate_frame_from,
    integrate_spin, integrate_spin3, integrate_spin4, log_derivative, FrameCurve, FrameCurve3,
    FrameCurve4,
};
pub use jacobi::{tridiag, ImTangentPair, JacobiMatrix};
