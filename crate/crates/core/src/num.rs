//! Scalar abstraction shared by every geometric and planning routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the toolkit is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_two_pi<T: Real>(angle: T) -> T {
    let tau = T::two_pi();
    let mut a = angle % tau;
    if a < T::zero() {
        a = a + tau;
    }
    if a >= tau {
        a = a - tau;
    }
    a
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_pi<T: Real>(angle: T) -> T {
    let pi = T::PI();
    let mut a = wrap_two_pi(angle);
    if a > pi {
        a = a - T::two_pi();
    }
    a
}

/// Total order on scalars for sorting; NaN sorts last.
pub fn cmp_real<T: Real>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or_else(|| {
        if a.is_nan() && !b.is_nan() {
            std::cmp::Ordering::Greater
        } else if b.is_nan() && !a.is_nan() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Equal
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_two_pi_reduces_negative_and_large_angles() {
        let tau = std::f64::consts::TAU;
        assert!((wrap_two_pi(-0.5f64) - (tau - 0.5)).abs() < 1e-12);
        assert!((wrap_two_pi(3.0 * tau + 0.25f64) - 0.25).abs() < 1e-12);
        assert_eq!(wrap_two_pi(0.0f64), 0.0);
        assert!(wrap_two_pi(-1e-18f64) < tau);
    }

    #[test]
    fn wrap_pi_is_symmetric() {
        let pi = std::f64::consts::PI;
        assert!((wrap_pi(1.5 * pi) + 0.5 * pi).abs() < 1e-12);
        assert!((wrap_pi(-1.5 * pi) - 0.5 * pi).abs() < 1e-12);
        assert!((wrap_pi(0.25f32) - 0.25).abs() < 1e-6);
    }
}
