use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the solver is generic over (f32 or f64).
pub trait Real:
    RealField + Copy + Default + FloatConst + FromPrimitive + ToPrimitive + FftNum
{
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("representable constant")
    }

    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn mag(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    C::new(theta.cos(), theta.sin())
}

#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn carg<T: Real>(z: C<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}

pub fn norm2<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

pub fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y)
}
