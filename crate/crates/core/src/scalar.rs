//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; exact for every value used in this crate's tables.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Converts a signed integer.
    #[inline]
    fn of_i(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Surface measure |S^d| of the unit sphere in R^{d+1}.
///
/// |S^0| = 2, |S^1| = 2π and |S^d| = 2π/(d−1)·|S^{d−2}|.
pub fn sphere_area<T: Real>(d: usize) -> T {
    let two = T::lit(2.0);
    let (mut area, start) = if d.is_multiple_of(2) { (two, 2) } else { (two * T::PI(), 3) };
    let mut k = start;
    while k <= d {
        area = area * two * T::PI() / T::of(k - 1);
        k += 2;
    }
    area
}

/// Frequency ω_ℓ = ℓ + (d−1)/2 of degree-ℓ harmonics on S^d.
#[inline]
pub fn omega<T: Real>(d: usize, l: usize) -> T {
    T::of(2 * l + d - 1) / T::lit(2.0)
}

/// Exponent k = (d−1)/2 of the conformal weight.
#[inline]
pub fn half_dim<T: Real>(d: usize) -> T {
    T::of(d - 1) / T::lit(2.0)
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensional_areas() {
        let pi = std::f64::consts::PI;
        assert_eq!(sphere_area::<f64>(0), 2.0);
        assert!((sphere_area::<f64>(1) - 2.0 * pi).abs() < 1e-15);
        assert!((sphere_area::<f64>(2) - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_area::<f64>(3) - 2.0 * pi * pi).abs() < 1e-14);
        assert!((sphere_area::<f64>(5) - pi.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::<f64>::new();
        s.add(1.0);
        s.add(1e-17);
        s.add(-1.0);
        assert!((s.value() - 1e-17).abs() < 1e-30);
    }
}
