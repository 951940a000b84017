//! Scalar abstractions.
//!
//! Lattice statistics, bound formulas and shortest-path costs only need a
//! field with exact comparisons, so they are written against [`Scalar`] and
//! work for `f32`, `f64` and [`Rational64`]. Anything that normalizes by a
//! Euclidean length or does planar geometry needs square roots and uses
//! [`Real`] (floating point only).

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type usable as a bond weight.
pub trait Scalar: Num + Signed + Copy + PartialOrd + Debug + Send + Sync + 'static {
    fn from_usize(n: usize) -> Self;

    fn from_i64(n: i64) -> Self;

    /// Lossy conversion used for output and window sizing.
    fn to_f64(self) -> f64;

    /// Conversion from a document value. Exact types approximate.
    fn from_f64(x: f64) -> Option<Self>;

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Floating-point scalar for geometry and direction normalization.
pub trait Real: Scalar + Float {
    #[inline]
    fn from_f64_lossy(x: f64) -> Self {
        <Self as Scalar>::from_f64(x).expect("finite f64 converts to a float type")
    }

    /// Machine-precision multiple used for geometric comparisons.
    #[inline]
    fn geom_eps() -> Self {
        Self::epsilon() * Self::from_f64_lossy(64.0)
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {
        $(
            impl Scalar for $t {
                #[inline]
                fn from_usize(n: usize) -> Self {
                    n as $t
                }

                #[inline]
                fn from_i64(n: i64) -> Self {
                    n as $t
                }

                #[inline]
                fn to_f64(self) -> f64 {
                    self as f64
                }

                #[inline]
                fn from_f64(x: f64) -> Option<Self> {
                    if x.is_finite() {
                        Some(x as $t)
                    } else {
                        None
                    }
                }
            }

            impl Real for $t {}
        )*
    };
}

impl_float_scalar!(f32, f64);

impl Scalar for Rational64 {
    #[inline]
    fn from_usize(n: usize) -> Self {
        Rational64::from_integer(n as i64)
    }

    #[inline]
    fn from_i64(n: i64) -> Self {
        Rational64::from_integer(n)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Option<Self> {
        // Exact for dyadic values with small denominators, approximate otherwise.
        <Rational64 as FromPrimitive>::from_f64(x).or_else(|| Rational64::approximate_float(x))
    }
}
