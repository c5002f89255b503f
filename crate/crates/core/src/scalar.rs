//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the library computes in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance used for tie detection when none is configured.
    const DEFAULT_EPS: f64;

    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn default_eps() -> Self {
        Self::lit(Self::DEFAULT_EPS)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const DEFAULT_EPS: f64 = 1e-5;
}

impl Scalar for f64 {
    const DEFAULT_EPS: f64 = 1e-9;
}

/// Ordering for values that are known not to be NaN.
pub(crate) fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}

/// Neumaier compensated summation. Large terms of opposite sign cancel
/// without losing the small ones; an infinite term makes the sum infinite.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    carry: T,
    infinite: Option<T>,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn add(&mut self, x: T) {
        if !x.is_finite() {
            self.infinite = Some(match self.infinite {
                Some(prev) => prev + x,
                None => x,
            });
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.infinite.unwrap_or(self.sum + self.carry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 0.5] {
            s.add(x);
        }
        assert_eq!(s.value(), 1.5);
        s.add(f64::NEG_INFINITY);
        assert_eq!(s.value(), f64::NEG_INFINITY);
    }
}
