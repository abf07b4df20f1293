use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::field::{derivative, HardyField};
use crate::hardy::laguerre;
use crate::scalar::{dot, norm2, Real, C};

/// z = x + iy with y > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> UpperHalfPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if y > T::zero() {
            Ok(UpperHalfPoint { x, y })
        } else {
            Err(CcmError::NotUpper(format!("{x:?} + {y:?}i")))
        }
    }

    pub fn z(&self) -> C<T> {
        C::new(self.x, self.y)
    }
}

/// ‖f‖ in H^s or Ḣ^s.
pub fn sobolev_norm<T: Real>(field: &HardyField<T>, s: T, homogeneous: bool) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(CcmError::Param(format!("Sobolev index must be nonnegative, got {s:?}")));
    }
    let sigma = field.grid().sigma();
    let a = field.coefficients();
    let half = T::lit(0.5);
    let sq = if s == T::zero() {
        field.mass()
    } else if homogeneous && s == half {
        dot(a, &derivative(a, sigma, false)).re.max(T::zero())
    } else if s == T::one() {
        let d = norm2(&derivative(a, sigma, true));
        if homogeneous {
            d
        } else {
            field.mass() + d
        }
    } else {
        let rule = laguerre::half_line_rule(a.len(), sigma, T::zero());
        let two_s = T::lit(2.0) * s;
        rule.iter().fold(T::zero(), |acc, &(xi, w)| {
            let f = laguerre::series(a, sigma, xi).norm_sqr();
            let weight = if homogeneous {
                if xi == T::zero() {
                    T::zero()
                } else {
                    xi.powf(two_s)
                }
            } else {
                (T::one() + xi * xi).powf(s)
            };
            acc + w * weight * f
        })
    };
    Ok(sq.sqrt())
}

/// ∫_κ^∞ |f̂(ξ)|² dξ.
pub fn fourier_tail_mass<T: Real>(field: &HardyField<T>, kappa: T) -> Result<T> {
    if !(kappa >= T::zero()) {
        return Err(CcmError::Param(format!("κ must be nonnegative, got {kappa:?}")));
    }
    if kappa == T::zero() {
        return Ok(field.mass());
    }
    let a = field.coefficients();
    let sigma = field.grid().sigma();
    let rule = laguerre::half_line_rule(a.len(), sigma, kappa);
    let tail = rule
        .iter()
        .fold(T::zero(), |acc, &(xi, w)| acc + w * laguerre::series(a, sigma, xi).norm_sqr());
    Ok(tail.min(field.mass()))
}

/// f(z) = (2π)^{−1/2} ∫₀^∞ e^{izξ} f̂(ξ) dξ for Im z > 0.
pub fn holomorphic_extension<T: Real>(field: &HardyField<T>, z: UpperHalfPoint<T>) -> C<T> {
    field.value_at(z.z())
}

/// The Cauchy–Schwarz bound (2π Im z)^{−1/2}‖f‖ on |f(z)|.
pub fn extension_bound<T: Real>(field: &HardyField<T>, z: UpperHalfPoint<T>) -> T {
    field.norm() / (T::lit(2.0) * T::pi() * z.y).sqrt()
}
