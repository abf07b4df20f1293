//! Soliton, its symmetry orbit, and smoothed soliton initial data.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::laguerre::{functions, gauss_legendre};
use crate::hardy::{apply, derivative, fourier_tail_mass, Grid, HardyField, Symmetry};
use crate::scalar::{norm2, Real, C};

/// Recipe for a·Q̂·m(ξ), optionally moved along the symmetry orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec<T> {
    pub amplitude: T,
    pub smoothing_width: T,
    /// When set, the amplitude is recomputed so that the mass hits this value.
    pub target_mass: Option<T>,
    pub symmetry: Symmetry<T>,
    pub label: String,
}

impl<T: Real> InitialDataSpec<T> {
    pub fn new(amplitude: T, smoothing_width: T) -> Self {
        InitialDataSpec {
            amplitude,
            smoothing_width,
            target_mass: None,
            symmetry: Symmetry::identity(),
            label: String::new(),
        }
    }

    pub fn with_target_mass(mut self, mass: T) -> Self {
        self.target_mass = Some(mass);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > T::zero()) {
            return Err(CcmError::Param(format!("amplitude must be positive, got {:?}", self.amplitude)));
        }
        if !(self.smoothing_width > T::zero()) {
            return Err(CcmError::Param(format!(
                "smoothing width must be positive, got {:?}",
                self.smoothing_width
            )));
        }
        if let Some(m) = self.target_mass {
            if !(m > T::zero()) {
                return Err(CcmError::Param(format!("target mass must be positive, got {m:?}")));
            }
        }
        if !(self.symmetry.lambda > T::zero()) {
            return Err(CcmError::Param("symmetry scale must be positive".into()));
        }
        Ok(())
    }
}

/// Q(x) = √2/(x+i).
pub fn soliton<T: Real>(grid: &Arc<Grid<T>>) -> HardyField<T> {
    HardyField::rational(grid, C::new(T::lit(2.0).sqrt(), T::zero()), C::new(T::zero(), -T::one()))
        .expect("pole −i is in the lower half-plane")
}

/// Q̂(ξ) = −2√π i e^{−ξ}, ξ ≥ 0.
pub fn soliton_hat<T: Real>(xi: T) -> C<T> {
    C::new(T::zero(), -T::lit(2.0) * T::pi().sqrt() * (-xi).exp())
}

/// The cutoff m(ξ) = sin²(πξ/2δ) on [0, δ], 1 beyond.
pub fn cutoff<T: Real>(xi: T, width: T) -> T {
    if xi >= width {
        T::one()
    } else if xi <= T::zero() {
        T::zero()
    } else {
        let s = (T::pi() * xi / (T::lit(2.0) * width)).sin();
        s * s
    }
}

/// Coefficients of Q̂·m, i.e. the unit-amplitude smoothed profile.
fn smoothed_profile<T: Real>(grid: &Arc<Grid<T>>, width: T) -> HardyField<T> {
    let mut q = soliton(grid);
    let k = grid.modes();
    let sigma = grid.sigma();
    // a_n = ∫ i ℓ_n(ξ) f̂(ξ) dξ; only [0, δ] differs from Q
    let span = T::lit(2.0) * sigma * width;
    let panels = 4 + (T::lit(2.0) * (T::count(k) * span).sqrt()).ceil().as_f64() as usize;
    let (gx, gw) = gauss_legendre::<T>(16);
    let h = width / T::count(panels);
    let half = T::lit(0.5);
    let coef = q.coefficients_mut();
    for p in 0..panels {
        let lo = T::count(p) * h;
        for (x, w) in gx.iter().zip(&gw) {
            let xi = lo + h * half * (*x + T::one());
            let wt = *w * h * half;
            let corr = soliton_hat(xi) * (cutoff(xi, width) - T::one()) * wt;
            let l = functions(k, sigma, xi);
            for (c, ln) in coef.iter_mut().zip(&l) {
                *c += C::new(-corr.im, corr.re) * *ln;
            }
        }
    }
    q
}

/// a·Q̂(ξ)·m(ξ), moved by the data's symmetry. With a target mass the amplitude
/// is chosen so that M(u) equals the target.
pub fn smoothed_soliton<T: Real>(grid: &Arc<Grid<T>>, spec: &InitialDataSpec<T>) -> Result<HardyField<T>> {
    spec.validate()?;
    let base = smoothed_profile(grid, spec.smoothing_width);
    let amp = match spec.target_mass {
        Some(m) => calibrate_amplitude(&base, m),
        None => spec.amplitude,
    };
    let u = base.scaled(C::new(amp, T::zero()));
    if spec.symmetry == Symmetry::identity() {
        Ok(u)
    } else {
        apply(&u, &spec.symmetry)
    }
}

/// Amplitude actually used by `smoothed_soliton` for a spec.
pub fn resolved_amplitude<T: Real>(grid: &Arc<Grid<T>>, spec: &InitialDataSpec<T>) -> Result<T> {
    spec.validate()?;
    Ok(match spec.target_mass {
        Some(m) => calibrate_amplitude(&smoothed_profile(grid, spec.smoothing_width), m),
        None => spec.amplitude,
    })
}

/// Root of a ↦ M(a·base) − target. The mass is exactly quadratic in a.
fn calibrate_amplitude<T: Real>(base: &HardyField<T>, target: T) -> T {
    (target / base.mass()).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport<T> {
    pub l2_distance: T,
    pub h1_distance: T,
    pub mass: T,
    /// (κ, ∫_κ^∞ |û|²) for κ ∈ {1, 10, ξ_max/2}
    pub tails: Vec<(T, T)>,
}

pub fn closeness_report<T: Real>(u0: &HardyField<T>, q: &HardyField<T>) -> Result<ClosenessReport<T>> {
    let d = u0.sub(q)?;
    let l2 = d.norm();
    let dd = norm2(&derivative(d.coefficients(), d.grid().sigma(), true));
    let xi_max = u0.grid().largest_frequency();
    let tails = [T::one(), T::lit(10.0), xi_max * T::lit(0.5)]
        .into_iter()
        .map(|k| Ok((k, fourier_tail_mass(u0, k)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosenessReport { l2_distance: l2, h1_distance: (l2 * l2 + dd).sqrt(), mass: u0.mass(), tails })
}

/// Sum of a few random rational functions c/(x − p) with poles at depth
/// 0.7σ..2σ below the real axis, so the coefficients decay geometrically.
pub fn random_field<T: Real, R: rand::Rng + ?Sized>(grid: &Arc<Grid<T>>, rng: &mut R, poles: usize) -> HardyField<T> {
    let sigma = grid.sigma();
    let mut u = HardyField::zeros(grid);
    for _ in 0..poles {
        let p = C::new(T::lit(rng.random_range(-1.0..1.0)) * sigma, -T::lit(rng.random_range(0.7..2.0)) * sigma);
        let c = C::new(T::lit(rng.random_range(-1.0..1.0)), T::lit(rng.random_range(-1.0..1.0)));
        let r = HardyField::rational(grid, c, p).expect("pole below the axis");
        u = u.axpy(C::new(T::one(), T::zero()), &r).expect("same grid");
    }
    let m = u.mass();
    if m > T::zero() {
        let target = T::lit(rng.random_range(0.5..10.0));
        u = u.scaled(C::new((target / m).sqrt(), T::zero()));
    }
    u
}
