use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::field::{project_function, HardyField};
use crate::hardy::grid::Grid;
use crate::scalar::{cis, Real, C};

/// Parameters of u ↦ e^{iθ} λ^{1/2} u(λx + y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symmetry<T> {
    pub lambda: T,
    pub theta: T,
    pub y: T,
}

impl<T: Real> Symmetry<T> {
    pub fn new(lambda: T, theta: T, y: T) -> Result<Self> {
        if lambda > T::zero() {
            Ok(Symmetry { lambda, theta, y })
        } else {
            Err(CcmError::Param(format!("λ must be positive, got {lambda:?}")))
        }
    }

    pub fn identity() -> Self {
        Symmetry { lambda: T::one(), theta: T::zero(), y: T::zero() }
    }

    /// Parameters of applying `self` first and then `then`.
    pub fn then(&self, then: &Self) -> Self {
        Symmetry {
            lambda: self.lambda * then.lambda,
            theta: self.theta + then.theta,
            y: self.y + self.lambda * then.y,
        }
    }

    pub fn inverse(&self) -> Self {
        Symmetry { lambda: T::one() / self.lambda, theta: -self.theta, y: -self.y / self.lambda }
    }

    /// Value of the transformed function at a point.
    pub fn eval(&self, u: &HardyField<T>, x: C<T>) -> C<T> {
        let arg = x * self.lambda + C::new(self.y, T::zero());
        u.value_at(arg) * cis(self.theta) * self.lambda.sqrt()
    }
}

pub fn apply_symmetry<T: Real>(field: &HardyField<T>, lambda: T, theta: T, y: T) -> Result<HardyField<T>> {
    let g = Symmetry::new(lambda, theta, y)?;
    apply(field, &g)
}

/// Exact evaluation at λx_j + y on an oversampled Cayley grid, then projection
/// onto the field's modes.
pub fn apply<T: Real>(field: &HardyField<T>, g: &Symmetry<T>) -> Result<HardyField<T>> {
    let grid = field.grid();
    let fine = Grid::with_samples(grid.sigma(), grid.modes(), 4 * grid.samples())?;
    let v = project_function(&fine, |x| g.eval(field, C::new(x, T::zero())));
    HardyField::new(grid.clone(), v.into_coefficients())
}
