//! Scalar abstraction shared by every geometric routine.
//!
//! All of the geometry is written against [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances that depend on the working precision are
//! exposed as associated functions so that the `f32` instantiation does not
//! inherit thresholds it can never meet.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Largest drift of `MᵀJM` from `J` that is silently repaired.
    fn lorentz_repair_tol() -> Self;
    /// Threshold below which two boundary points are treated as coincident.
    fn coincidence_tol() -> Self;
    /// Pivot threshold for the small dense solvers.
    fn pivot_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for finite literals and the two implementors.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).unwrap_or_else(Self::infinity)
    }
}

impl Real for f64 {
    fn lorentz_repair_tol() -> Self {
        1e-8
    }
    fn coincidence_tol() -> Self {
        1e-12
    }
    fn pivot_tol() -> Self {
        1e-13
    }
}

impl Real for f32 {
    fn lorentz_repair_tol() -> Self {
        1e-3
    }
    fn coincidence_tol() -> Self {
        1e-5
    }
    fn pivot_tol() -> Self {
        1e-6
    }
}
