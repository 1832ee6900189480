//! Scalar abstractions.
//!
//! Two tiers are used. [`HullScalar`] is the minimal ordered field needed by the
//! convex-hull and Grenander code; it is implemented for `f32`, `f64` and the
//! exact `Rational64`, which lets the geometry be checked without rounding.
//! [`Real`] adds the transcendental functions required by the model and curve
//! computations and is only implemented for the floating-point types.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ordered field used by the hull and monotone-density code.
pub trait HullScalar: Num + Copy + PartialOrd + ToPrimitive + Debug + Send + Sync + 'static {
    /// Vertical distance below which a point counts as lying on a chord.
    fn hull_tolerance() -> Self;

    fn from_count(n: usize) -> Self;

    fn hull_max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn hull_min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy view for error messages and plotting.
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl HullScalar for f64 {
    fn hull_tolerance() -> Self {
        1e-12
    }
    fn from_count(n: usize) -> Self {
        n as f64
    }
}

impl HullScalar for f32 {
    fn hull_tolerance() -> Self {
        1e-6
    }
    fn from_count(n: usize) -> Self {
        n as f32
    }
}

impl HullScalar for Rational64 {
    fn hull_tolerance() -> Self {
        Rational64::from_integer(0)
    }
    fn from_count(n: usize) -> Self {
        Rational64::from_integer(n as i64)
    }
}

/// Floating-point scalar used throughout the statistical code.
pub trait Real: HullScalar + Float + FromPrimitive + Display {
    /// Absolute tolerance for bisection root-finds.
    fn root_tolerance() -> Self;

    /// Tolerance used when matching Lfdr values against an atom or cutoff.
    fn tie_tolerance() -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn root_tolerance() -> Self {
        1e-10
    }
    fn tie_tolerance() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn root_tolerance() -> Self {
        1e-6
    }
    fn tie_tolerance() -> Self {
        1e-6
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf<T: Real>(x: T) -> T {
    let x = x.as_f64();
    T::lit(0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2))
}

/// Standard normal survival function `1 - Φ(x)`, accurate in the upper tail.
pub fn std_normal_sf<T: Real>(x: T) -> T {
    let x = x.as_f64();
    T::lit(0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2))
}

/// Standard normal density.
pub fn std_normal_pdf<T: Real>(x: T) -> T {
    let x = x.as_f64();
    T::lit((-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
}

/// Bisection for the boundary of a monotone predicate.
///
/// `holds(lo)` is assumed true. Returns the largest point (to within `tol`) where
/// the predicate still holds when it is true on a left interval.
pub(crate) fn bisect_last_true<T: Real>(
    mut lo: T,
    mut hi: T,
    tol: T,
    mut holds: impl FnMut(T) -> bool,
) -> T {
    let two = T::lit(2.0);
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
