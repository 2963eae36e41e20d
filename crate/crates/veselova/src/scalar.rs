//! Scalar abstraction: every algorithm in this crate is generic over a
//! floating-point type implementing [`Real`].
//!
//! The crate root exports `f64`-concrete aliases for all domain types;
//! `f32` is supported for smoke-level work (its epsilon is too coarse for
//! the tight conservation tolerances used by the verification suite).

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the library (`f32` or `f64`).
///
/// Bundles the `num-traits` capabilities the algorithms need (arithmetic,
/// transcendental functions, constants, conversions) plus the marker traits
/// required to move values across threads and print diagnostics.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    ///
    /// All numeric constants in the library are written as `f64` literals and
    /// funneled through this method, so a single code path serves both
    /// scalar types. Panics only if the literal is not representable, which
    /// cannot happen for finite constants.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert")
    }

    /// Converts a `usize` (loop index, dimension) into `Self`.
    #[inline]
    fn from_index(k: usize) -> Self {
        Self::from_usize(k).expect("index must convert to scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_roundtrips() {
        assert_eq!(f64::lit(0.5), 0.5);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::from_index(7), 7.0);
    }

    #[test]
    fn float_ops_available_generically() {
        fn hypot_generic<T: Real>(a: T, b: T) -> T {
            (a * a + b * b).sqrt()
        }
        assert!((hypot_generic(3.0f64, 4.0f64) - 5.0).abs() < 1e-15);
        assert!((hypot_generic(3.0f32, 4.0f32) - 5.0).abs() < 1e-6);
    }
}
