//! Scalar abstraction shared by every solver stage.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the registration pipeline: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::Display {
    /// Elementwise tolerance for `RᵀR = I` and `det R = 1`.
    const ROTATION_TOL: f64;
    /// Relative tolerance below which a triad or point scatter is degenerate.
    const DEGENERACY_TOL: f64;

    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f64 {
    const ROTATION_TOL: f64 = 1e-9;
    const DEGENERACY_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const ROTATION_TOL: f64 = 1e-4;
    const DEGENERACY_TOL: f64 = 1e-6;
}
