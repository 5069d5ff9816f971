//! Scalar abstractions shared by the valuation, regraduation and exemplar code.
//!
//! [`Scalar`] is the minimal field-like interface the audits need, and is
//! implemented for `f32`, `f64` and exact rationals. [`Real`] adds the
//! transcendental and bisection machinery the associativity solver needs, so
//! it is only implemented for floating point types.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::{BigRational, Rational64};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Numbers a valuation can take values in.
pub trait Scalar:
    Num + Signed + PartialOrd + Clone + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Unit roundoff used to scale rounding-error bounds. Zero for exact types.
    fn epsilon() -> Self;

    /// Absolute tolerance used when a valuation does not specify one.
    fn default_tolerance() -> Self;

    fn is_finite_value(&self) -> bool;

    fn to_f64_lossy(&self) -> f64;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn default_tolerance() -> Self {
        1e-9
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
    fn default_tolerance() -> Self {
        1e-5
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Rational64 {
    fn epsilon() -> Self {
        Rational64::zero()
    }
    fn default_tolerance() -> Self {
        Rational64::zero()
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn epsilon() -> Self {
        BigRational::zero()
    }
    fn default_tolerance() -> Self {
        BigRational::zero()
    }
    fn is_finite_value(&self) -> bool {
        true
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating point scalars: everything the numerical solver and the
/// transcendental exemplars require.
pub trait Real: Scalar + Float + FromPrimitive + Copy {
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Neumaier's compensated sum. For exact scalar types the compensation term
/// stays identically zero and this reduces to plain summation.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in values {
        let t = sum.clone() + x.clone();
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t.clone()) + x);
        } else {
            comp = comp + ((x - t.clone()) + sum);
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn rational_sum_is_exact() {
        let xs = [
            Rational64::new(1, 3),
            Rational64::new(1, 6),
            Rational64::new(1, 2),
        ];
        assert_eq!(compensated_sum(xs), Rational64::from_integer(1));
    }
}
