use std::sync::Arc;

use crate::error::{CcmError, Result};
use crate::hardy::grid::Grid;
use crate::hardy::laguerre;
use crate::scalar::{dot, imag_unit, norm2, Real, C};

/// A Hardy-space state: coefficients of Σ a_n φ_n on a grid.
/// Only nonnegative basis indices exist, so the Hardy constraint is structural.
#[derive(Clone, Debug)]
pub struct HardyField<T: Real> {
    grid: Arc<Grid<T>>,
    coef: Vec<C<T>>,
}

/// Full coefficient set of an arbitrary L² function in the two-sided basis
/// {φ_n}_{n∈ℤ}; entries with n < 0 span the conjugate Hardy space.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    grid: Arc<Grid<T>>,
    /// coefficient of degree n at index n − lo
    coef: Vec<C<T>>,
    lo: i64,
}

impl<T: Real> Spectrum<T> {
    /// Two-sided spectrum of a Hardy field (negative indices zero).
    pub fn from_field(field: &HardyField<T>) -> Self {
        let m = field.grid.samples() as i64;
        let lo = -(m / 2);
        let mut coef = vec![C::new(T::zero(), T::zero()); m as usize];
        for (n, c) in field.coef.iter().enumerate() {
            coef[(n as i64 - lo) as usize] = *c;
        }
        Spectrum { grid: field.grid.clone(), coef, lo }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn get(&self, n: i64) -> C<T> {
        let i = n - self.lo;
        if i < 0 || i as usize >= self.coef.len() {
            C::new(T::zero(), T::zero())
        } else {
            self.coef[i as usize]
        }
    }

    pub fn lowest(&self) -> i64 {
        self.lo
    }

    pub fn coefficients(&self) -> &[C<T>] {
        &self.coef
    }

    pub fn norm_sqr(&self) -> T {
        norm2(&self.coef)
    }

    pub fn negative_band(&self) -> T {
        self.coef[..(-self.lo) as usize].iter().fold(T::zero(), |s, z| s + z.norm_sqr())
    }
}

impl<T: Real> HardyField<T> {
    pub fn new(grid: Arc<Grid<T>>, coef: Vec<C<T>>) -> Result<Self> {
        if coef.len() != grid.modes() {
            return Err(CcmError::Length { expected: grid.modes(), got: coef.len() });
        }
        Ok(HardyField { grid, coef })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        HardyField { grid: grid.clone(), coef: vec![C::new(T::zero(), T::zero()); grid.modes()] }
    }

    /// The basis function φ_n.
    pub fn basis(grid: &Arc<Grid<T>>, n: usize) -> Result<Self> {
        if n >= grid.modes() {
            return Err(CcmError::Param(format!("mode {n} outside grid of {} modes", grid.modes())));
        }
        let mut f = Self::zeros(grid);
        f.coef[n] = C::new(T::one(), T::zero());
        Ok(f)
    }

    /// Exact coefficients of c/(x − p) for a pole p in the lower half-plane.
    pub fn rational(grid: &Arc<Grid<T>>, residue: C<T>, pole: C<T>) -> Result<Self> {
        if !(pole.im < T::zero()) {
            return Err(CcmError::Param("pole must lie in the lower half-plane".into()));
        }
        let sigma = grid.sigma();
        let is = C::new(T::zero(), sigma);
        let r = (is + pole) / (is - pole);
        let lead = C::new(T::zero(), T::lit(2.0) * sigma) * residue / (is - pole)
            * (T::pi() / sigma).sqrt();
        let mut coef = Vec::with_capacity(grid.modes());
        let mut p = lead;
        for _ in 0..grid.modes() {
            coef.push(p);
            p *= -r;
        }
        Ok(HardyField { grid: grid.clone(), coef })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[C<T>] {
        &self.coef
    }

    pub fn coefficients_mut(&mut self) -> &mut [C<T>] {
        &mut self.coef
    }

    pub fn into_coefficients(self) -> Vec<C<T>> {
        self.coef
    }

    pub fn modes(&self) -> usize {
        self.coef.len()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.compatible(&other.grid)
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(CcmError::GridMismatch)
        }
    }

    pub fn mass(&self) -> T {
        norm2(&self.coef)
    }

    pub fn norm(&self) -> T {
        self.mass().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        dot(&self.coef, &other.coef)
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        HardyField { grid: self.grid.clone(), coef: self.coef.iter().map(|&z| f(z)).collect() }
    }

    pub fn axpy(&self, a: C<T>, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coef = self.coef.iter().zip(&other.coef).map(|(x, y)| x + a * y).collect();
        Ok(HardyField { grid: self.grid.clone(), coef })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(C::new(-T::one(), T::zero()), other)
    }

    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }

    /// Zero-pad or truncate onto another grid with the same scale.
    pub fn resized(&self, grid: &Arc<Grid<T>>) -> Result<Self> {
        if grid.sigma() != self.grid.sigma() {
            return Err(CcmError::GridMismatch);
        }
        let mut coef = vec![C::new(T::zero(), T::zero()); grid.modes()];
        for (d, s) in coef.iter_mut().zip(&self.coef) {
            *d = *s;
        }
        Ok(HardyField { grid: grid.clone(), coef })
    }

    /// Fraction of the mass carried by modes n ≥ start.
    pub fn band_fraction(&self, start: usize) -> T {
        let m = self.mass();
        if m == T::zero() {
            return T::zero();
        }
        norm2(&self.coef[start.min(self.coef.len())..]) / m
    }

    /// Fraction of mass in the top octave of modes.
    pub fn top_octave(&self) -> T {
        self.band_fraction(self.coef.len() / 2)
    }

    /// f(z) for z in the closed upper half-plane (real points allowed).
    pub fn value_at(&self, z: C<T>) -> C<T> {
        evaluate(&self.coef, self.grid.sigma(), z)
    }

    /// f̂(ξ) for ξ ≥ 0.
    pub fn fourier_value(&self, xi: T) -> C<T> {
        -imag_unit::<T>() * laguerre::series(&self.coef, self.grid.sigma(), xi)
    }

    /// Values f̂(ξ_k) at the frequency nodes.
    pub fn nodal_values(&self) -> Vec<C<T>> {
        let sp = self.grid.spectral();
        let v = &sp.vectors;
        let k = self.coef.len();
        (0..k)
            .map(|j| {
                let mut s = C::new(T::zero(), T::zero());
                for n in 0..k {
                    s += self.coef[n] * v[(n, j)];
                }
                -imag_unit::<T>() * s / sp.freq.weights[j].sqrt()
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coef.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Σ c_n φ_n(z) for any coefficient list on scale σ.
pub fn evaluate<T: Real>(coef: &[C<T>], sigma: T, z: C<T>) -> C<T> {
    let is = C::new(T::zero(), sigma);
    let zeta = (z - is) / (z + is);
    let mut acc = C::new(T::zero(), T::zero());
    for c in coef.iter().rev() {
        acc = acc * zeta + c;
    }
    acc * (sigma / T::pi()).sqrt() / (z + is)
}

/// Two-sided coefficients of a sampled L² function.
pub fn analyze<T: Real>(samples: &[C<T>], grid: &Arc<Grid<T>>) -> Result<Spectrum<T>> {
    let m = grid.samples();
    if samples.len() != m {
        return Err(CcmError::Length { expected: m, got: samples.len() });
    }
    let g = grid.g_form(samples);
    let lo = -(m as i64 / 2);
    let coef = grid.laurent(g, lo, lo + m as i64 - 1);
    Ok(Spectrum { grid: grid.clone(), coef, lo })
}

/// Keep the nonnegative indices below the grid's mode count.
pub fn szego_project<T: Real>(spectrum: &Spectrum<T>) -> HardyField<T> {
    let grid = spectrum.grid.clone();
    let coef = (0..grid.modes() as i64).map(|n| spectrum.get(n)).collect();
    HardyField { grid, coef }
}

/// Samples at the Cayley points of the grid.
pub fn synthesize<T: Real>(field: &HardyField<T>) -> Vec<C<T>> {
    field.grid.hardy_samples(&field.coef)
}

/// Π⁺(f) for any function given pointwise on the real line.
pub fn project_function<T: Real>(grid: &Arc<Grid<T>>, f: impl Fn(T) -> C<T>) -> HardyField<T> {
    let samples: Vec<C<T>> = grid.spatial().points.iter().map(|&x| f(x)).collect();
    let g = grid.g_form(&samples);
    let coef = grid.laurent(g, 0, grid.modes() as i64 - 1);
    HardyField { grid: grid.clone(), coef }
}

/// −i∂ₓ on coefficients; `extended` keeps the extra top mode the derivative creates.
pub fn derivative<T: Real>(coef: &[C<T>], sigma: T, extended: bool) -> Vec<C<T>> {
    let k = coef.len();
    let two_sigma = T::lit(2.0) * sigma;
    let zero = C::new(T::zero(), T::zero());
    let len = if extended { k + 1 } else { k };
    (0..len)
        .map(|n| {
            let at = |i: usize| if i < k { coef[i] } else { zero };
            let mut s = at(n) * T::count(2 * n + 1);
            if n > 0 {
                s -= at(n - 1) * T::count(n);
            }
            s -= at(n + 1) * T::count(n + 1);
            s / two_sigma
        })
        .collect()
}

/// Coefficients of Π⁺(ū·f) (indices 0..K).
pub fn conj_product<T: Real>(u: &HardyField<T>, f: &HardyField<T>) -> Vec<C<T>> {
    let grid = &u.grid;
    let us = grid.hardy_samples(&u.coef);
    let mut fv = grid.circle_values(&f.coef, 0);
    for (x, uu) in fv.iter_mut().zip(&us) {
        *x *= uu.conj();
    }
    grid.laurent(fv, 0, grid.modes() as i64 - 1)
}

/// Coefficients 0..out_len of u·g where g is given by its (possibly longer) coefficient list.
pub fn product<T: Real>(u: &HardyField<T>, g: &[C<T>], out_len: usize) -> Vec<C<T>> {
    let grid = &u.grid;
    let us = grid.hardy_samples(&u.coef);
    product_with_samples(grid, &us, g, out_len)
}

pub(crate) fn product_with_samples<T: Real>(
    grid: &Grid<T>,
    us: &[C<T>],
    g: &[C<T>],
    out_len: usize,
) -> Vec<C<T>> {
    let mut gv = grid.circle_values(g, 0);
    for (x, uu) in gv.iter_mut().zip(us) {
        *x *= uu;
    }
    grid.laurent(gv, 0, out_len as i64 - 1)
}

/// Mass of the negative band after a synthesize/analyze round trip, relative to the total.
pub fn closure_defect<T: Real>(field: &HardyField<T>) -> T {
    let s = analyze(&synthesize(field), field.grid()).expect("grid-consistent samples");
    let total = s.norm_sqr();
    if total == T::zero() {
        T::zero()
    } else {
        s.negative_band() / total
    }
}

/// Relative mismatch between the sampled L² norm and the coefficient norm.
pub fn plancherel_defect<T: Real>(field: &HardyField<T>) -> T {
    let s = synthesize(field);
    let w = &field.grid.spatial().weights;
    let spatial = s.iter().zip(w).fold(T::zero(), |acc, (z, w)| acc + z.norm_sqr() * *w);
    let m = field.mass();
    if m == T::zero() {
        spatial
    } else {
        (spatial - m).mag() / m
    }
}
