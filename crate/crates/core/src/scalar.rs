//! Scalar abstraction shared by every numerical stage.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`) the whole pipeline is generic over.
///
/// Arithmetic and transcendental functions come from [`RealField`]; conversions
/// go through num-traits so literals can be written as `f64` and cast once.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Casts an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Casts a count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn czero<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cplx<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{i phase}`.
#[inline]
pub fn cis<T: Real>(phase: T) -> Cplx<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub fn cabs2<T: Real>(z: Cplx<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn cabs<T: Real>(z: Cplx<T>) -> T {
    cabs2(z).sqrt()
}

#[inline]
pub fn conj<T: Real>(z: Cplx<T>) -> Cplx<T> {
    Complex::new(z.re, -z.im)
}

/// `1 / z` without relying on num-traits `Float`.
#[inline]
pub fn cinv<T: Real>(z: Cplx<T>) -> Cplx<T> {
    let d = cabs2(z);
    Complex::new(z.re / d, -z.im / d)
}
