//! Mass, momentum, energy and the hierarchy I_k = ⟨u, 𝓛_u^k u⟩.

use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::{conj_product, derivative, product, HardyField};
use crate::lax::apply_lax;
use crate::scalar::{dot, norm2, Real, C};

/// Top-third band mass fraction above which quartic terms are flagged.
pub const QUARTIC_BAND_LIMIT: f64 = 1e-8;

pub const MAX_HIERARCHY: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport<T> {
    pub t: T,
    pub mass: T,
    pub momentum: T,
    pub momentum_imag: T,
    pub energy: T,
    /// I_0..I_k
    pub hierarchy: Vec<T>,
    /// top-third band mass fraction
    pub top_band: T,
    pub resolved: bool,
    /// hierarchy agrees with the direct formulas
    pub consistent: bool,
}

pub fn mass<T: Real>(u: &HardyField<T>) -> T {
    u.mass()
}

/// Fraction of |u|² carried by the top third of the modes.
pub fn top_band<T: Real>(u: &HardyField<T>) -> T {
    let k = u.modes();
    u.band_fraction(k - k / 3)
}

pub fn quartic_resolved<T: Real>(u: &HardyField<T>) -> bool {
    top_band(u) <= T::lit(QUARTIC_BAND_LIMIT)
}

/// ∫|u|⁴ = ‖u²‖², with u² kept in full.
pub fn quartic<T: Real>(u: &HardyField<T>) -> T {
    norm2(&product(u, u.coefficients(), 2 * u.modes()))
}

/// ⟨u, −iu_x⟩ − ½∫|u|⁴, with the imaginary part of the first term.
pub fn momentum_parts<T: Real>(u: &HardyField<T>) -> (T, T) {
    let a = u.coefficients();
    let kin = dot(a, &derivative(a, u.grid().sigma(), false));
    (kin.re - T::lit(0.5) * quartic(u), kin.im)
}

pub fn momentum<T: Real>(u: &HardyField<T>) -> T {
    momentum_parts(u).0
}

/// ½‖u_x − iuΠ⁺|u|²‖², every product kept in full.
pub fn energy<T: Real>(u: &HardyField<T>) -> T {
    let k = u.modes();
    let h = conj_product(u, u);
    let uh = product(u, &h, 2 * k);
    let du = derivative(u.coefficients(), u.grid().sigma(), true);
    let zero = C::new(T::zero(), T::zero());
    let e = uh
        .iter()
        .enumerate()
        .fold(T::zero(), |s, (n, p)| s + (du.get(n).copied().unwrap_or(zero) - p).norm_sqr());
    (T::lit(0.5) * e).max(T::zero())
}

/// I_0..I_{k_max} by repeated application of 𝓛_u.
pub fn hierarchy<T: Real>(u: &HardyField<T>, k_max: usize) -> Result<Vec<T>> {
    if k_max > MAX_HIERARCHY {
        return Err(CcmError::Param(format!("k_max = {k_max} exceeds {MAX_HIERARCHY}")));
    }
    // I_{2j} = ‖𝓛^j u‖², I_{2j+1} = ⟨𝓛^j u, 𝓛^{j+1} u⟩
    let mut powers = vec![u.clone()];
    while powers.len() <= k_max / 2 + 1 && powers.len() <= k_max {
        let next = apply_lax(u, powers.last().expect("nonempty"))?;
        powers.push(next);
    }
    Ok((0..=k_max)
        .map(|k| {
            let j = k / 2;
            if k % 2 == 0 {
                powers[j].mass()
            } else {
                powers[j].inner(&powers[j + 1]).re
            }
        })
        .collect())
}

/// Relative tolerances for hierarchy-vs-direct agreement (I₀, I₁, I₂).
const CONSISTENCY: [f64; 3] = [1e-10, 1e-8, 1e-8];

pub fn report<T: Real>(u: &HardyField<T>, t: T, k_max: usize) -> Result<ConservedReport<T>> {
    let m = mass(u);
    let (p, p_im) = momentum_parts(u);
    let e = energy(u);
    let hier = hierarchy(u, k_max.max(2))?;
    let scale = m.max(T::one());
    let direct = [m, p, T::lit(2.0) * e];
    let consistent = direct
        .iter()
        .zip(&hier)
        .zip(CONSISTENCY)
        .all(|((d, h), tol)| (*d - *h).mag() <= T::lit(tol) * scale * scale.max(d.mag()));
    let top = top_band(u);
    let mut hierarchy = hier;
    hierarchy.truncate(k_max + 1);
    Ok(ConservedReport {
        t,
        mass: m,
        momentum: p,
        momentum_imag: p_im,
        energy: e,
        hierarchy,
        top_band: top,
        resolved: top <= T::lit(QUARTIC_BAND_LIMIT),
        consistent,
    })
}
