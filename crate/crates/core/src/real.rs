//! Scalar abstraction for the numerical core.
//!
//! Every physics routine in this crate is generic over [`Real`], a thin
//! bundle of `num-traits` bounds satisfied by `f32` and `f64`. The crate
//! root exports `f64`-concrete aliases for the public types; `f64` is the
//! only precision at which the headline tolerances (1e-6 … 1e-12 relative)
//! are meaningful, but the whole pipeline compiles and runs at `f32` too.

use core::fmt::{Debug, Display};
use core::iter::Sum;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
///
/// Implementors must provide IEEE-style arithmetic (`Float`), the usual
/// mathematical constants (`FloatConst`), and lossless-enough conversions
/// from `f64` literals, which is how physical constants enter generic code.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal (rounding if the target is narrower).
    ///
    /// Panics if the value is not representable at all, which cannot happen
    /// for the finite literals used in this crate.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert")
    }

    /// Converts to `f64` for diagnostics and error payloads (NaN if the
    /// conversion fails, which it cannot for f32/f64).
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
