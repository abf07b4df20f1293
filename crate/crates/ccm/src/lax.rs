//! The Lax pair 𝓛_u = −i∂ₓ − uΠ⁺ū, 𝓟_u = i∂ₓ² + 2uΠ⁺∂ₓū as Galerkin matrices.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::{conj_product, derivative, product, Grid, HardyField};
use crate::scalar::{cabs, dot, Real, C};
use crate::states::random_field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaxKind {
    L,
    P,
}

#[derive(Clone, Debug)]
pub struct LaxMatrix<T: Real> {
    pub kind: LaxKind,
    pub matrix: DMatrix<C<T>>,
    pub generator: HardyField<T>,
}

impl<T: Real> LaxMatrix<T> {
    pub fn apply(&self, f: &HardyField<T>) -> Result<HardyField<T>> {
        self.generator.check_grid(f)?;
        HardyField::new(f.grid().clone(), matvec(&self.matrix, f.coefficients()))
    }

    /// max|A ∓ A†| / max|A|, with − for L and + for P.
    pub fn symmetry_defect(&self) -> T {
        let a = &self.matrix;
        let sign = if self.kind == LaxKind::L { -T::one() } else { T::one() };
        let mut worst = T::zero();
        let mut scale = T::zero();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                scale = scale.max(cabs(a[(i, j)]));
                worst = worst.max(cabs(a[(i, j)] + a[(j, i)].conj() * sign));
            }
        }
        if scale == T::zero() {
            T::zero()
        } else {
            worst / scale
        }
    }
}

pub(crate) fn matvec<T: Real>(m: &DMatrix<C<T>>, v: &[C<T>]) -> Vec<C<T>> {
    let x = DVector::from_column_slice(v);
    (m * x).as_slice().to_vec()
}

/// Tridiagonal matrix of −i∂ₓ on the first K modes; `extended` adds the row for mode K.
pub fn derivative_matrix<T: Real>(modes: usize, sigma: T, extended: bool) -> DMatrix<C<T>> {
    let rows = if extended { modes + 1 } else { modes };
    let two_sigma = T::lit(2.0) * sigma;
    let mut d = DMatrix::zeros(rows, modes);
    for n in 0..rows {
        if n < modes {
            d[(n, n)] = C::new(T::count(2 * n + 1) / two_sigma, T::zero());
        }
        if n + 1 < modes {
            d[(n, n + 1)] = C::new(-T::count(n + 1) / two_sigma, T::zero());
        }
        if n > 0 && n - 1 < modes {
            d[(n, n - 1)] = C::new(-T::count(n) / two_sigma, T::zero());
        }
    }
    d
}

/// Matrix of f ↦ Π⁺(ū f): upper-triangular Toeplitz in the conjugate coefficients of u.
pub fn conj_multiplier<T: Real>(u: &HardyField<T>) -> DMatrix<C<T>> {
    let k = u.modes();
    let a = u.coefficients();
    let c = T::one() / (T::lit(2.0) * (T::pi() * u.grid().sigma()).sqrt());
    // ū = Σ_m v_m ζ̄^m with v_m = (i/2√(πσ))(ā_m − ā_{m−1})
    let v: Vec<C<T>> = (0..k)
        .map(|m| {
            let mut s = a[m].conj();
            if m > 0 {
                s -= a[m - 1].conj();
            }
            C::new(T::zero(), c) * s
        })
        .collect();
    DMatrix::from_fn(k, k, |r, n| if n >= r { v[n - r] } else { C::new(T::zero(), T::zero()) })
}

/// 𝓛_u f, computed with transforms rather than the dense matrix.
pub fn apply_lax<T: Real>(u: &HardyField<T>, f: &HardyField<T>) -> Result<HardyField<T>> {
    u.check_grid(f)?;
    let sigma = u.grid().sigma();
    let k = u.modes();
    let h = conj_product(u, f);
    let uh = product(u, &h, k);
    let df = derivative(f.coefficients(), sigma, false);
    HardyField::new(f.grid().clone(), df.iter().zip(&uh).map(|(a, b)| a - b).collect())
}

pub fn assemble_lax<T: Real>(u: &HardyField<T>) -> LaxMatrix<T> {
    let b = conj_multiplier(u);
    let d = derivative_matrix(u.modes(), u.grid().sigma(), false);
    let matrix = d - b.adjoint() * &b;
    LaxMatrix { kind: LaxKind::L, matrix, generator: u.clone() }
}

pub fn assemble_p<T: Real>(u: &HardyField<T>) -> LaxMatrix<T> {
    let k = u.modes();
    let sigma = u.grid().sigma();
    let b = conj_multiplier(u);
    let de = derivative_matrix(k, sigma, true);
    let d = derivative_matrix(k, sigma, false);
    let i = C::new(T::zero(), T::one());
    let lap = de.adjoint() * &de;
    let matrix = lap * (-i) + b.adjoint() * d * &b * (i * T::lit(2.0));
    LaxMatrix { kind: LaxKind::P, matrix, generator: u.clone() }
}

/// Default threshold below which an eigenvalue is declared a bound state.
pub fn default_tol_neg<T: Real>(grid: &Grid<T>) -> T {
    T::lit(1e-7) * grid.largest_frequency()
}

#[derive(Clone, Debug)]
pub struct SpectralReport<T: Real> {
    pub eigenvalues: Vec<T>,
    pub tol_neg: T,
    /// eigenvalues < −tol_neg
    pub below: usize,
    /// eigenvalues ≤ tol_neg (counts an edge eigenvalue at 0)
    pub with_edge: usize,
    pub ground: HardyField<T>,
    pub t: T,
}

impl<T: Real> SpectralReport<T> {
    pub fn lowest(&self) -> T {
        self.eigenvalues[0]
    }
}

pub fn spectrum<T: Real>(m: &LaxMatrix<T>, tol_neg: T) -> Result<SpectralReport<T>> {
    if m.kind != LaxKind::L {
        return Err(CcmError::Param("spectrum needs the self-adjoint operator 𝓛".into()));
    }
    if !(tol_neg >= T::zero()) {
        return Err(CcmError::Param("tol_neg must be nonnegative".into()));
    }
    if m.matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CcmError::LinAlg("non-finite Lax matrix".into()));
    }
    let eig = m.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut g: Vec<C<T>> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    let big = g
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .unwrap_or(C::new(T::one(), T::zero()));
    let norm = g.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
    let phase = big.conj() / (cabs(big) * norm);
    for z in g.iter_mut() {
        *z *= phase;
    }
    let below = eigenvalues.iter().filter(|&&e| e < -tol_neg).count();
    let with_edge = eigenvalues.iter().filter(|&&e| e <= tol_neg).count();
    Ok(SpectralReport {
        eigenvalues,
        tol_neg,
        below,
        with_edge,
        ground: HardyField::new(m.generator.grid().clone(), g)?,
        t: T::zero(),
    })
}

/// The k lowest eigenvalues of 𝓛_u (eigenvectors are not formed).
pub fn lowest_eigenvalues<T: Real>(u: &HardyField<T>, k: usize) -> Vec<T> {
    let mut ev: Vec<T> = assemble_lax(u).matrix.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.truncate(k);
    ev
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftReport<T> {
    pub times: Vec<T>,
    /// eigenvalues[i][j]: j-th lowest eigenvalue at times[i]
    pub eigenvalues: Vec<Vec<T>>,
    pub max_drift: Vec<T>,
    pub relative_drift: Vec<T>,
    /// (time index, eigenvalue index) where sorted-order matching is ambiguous
    pub crossings: Vec<(usize, usize)>,
}

pub fn isospectral_drift<T: Real>(states: &[(T, HardyField<T>)], k_lowest: usize) -> DriftReport<T> {
    let eigenvalues: Vec<Vec<T>> =
        states.par_iter().map(|(_, u)| lowest_eigenvalues(u, k_lowest)).collect();
    let k = eigenvalues.iter().map(|e| e.len()).min().unwrap_or(0);
    let mut max_drift = vec![T::zero(); k];
    let mut crossings = Vec::new();
    for (i, ev) in eigenvalues.iter().enumerate() {
        for j in 0..k {
            max_drift[j] = max_drift[j].max((ev[j] - eigenvalues[0][j]).mag());
            if i == 0 {
                continue;
            }
            let step = (ev[j] - eigenvalues[i - 1][j]).mag();
            let mut gap = T::max_value().unwrap_or(T::lit(f64::MAX));
            if j > 0 {
                gap = gap.min(ev[j] - ev[j - 1]);
            }
            if j + 1 < ev.len() {
                gap = gap.min(ev[j + 1] - ev[j]);
            }
            if step > gap * T::lit(0.5) {
                crossings.push((i, j));
            }
        }
    }
    let relative_drift = (0..k)
        .map(|j| {
            let base = eigenvalues[0][j].mag();
            if base == T::zero() {
                max_drift[j]
            } else {
                max_drift[j] / base
            }
        })
        .collect();
    DriftReport {
        times: states.iter().map(|(t, _)| *t).collect(),
        eigenvalues,
        max_drift,
        relative_drift,
        crossings,
    }
}

const PROBES: usize = 10;

/// max over fixed random unit probes of ‖(𝓛'[u̇] − [𝓟_u, 𝓛_u]) f‖.
pub fn lax_residual<T: Real>(u: &HardyField<T>, u_dot: &HardyField<T>) -> Result<T> {
    u.check_grid(u_dot)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7);
    let probes: Vec<HardyField<T>> =
        (0..PROBES).map(|_| random_field(u.grid(), &mut rng, 3)).collect();
    lax_residual_on(u, u_dot, &probes)
}

pub fn lax_residual_on<T: Real>(
    u: &HardyField<T>,
    u_dot: &HardyField<T>,
    probes: &[HardyField<T>],
) -> Result<T> {
    let l = assemble_lax(u).matrix;
    let p = assemble_p(u).matrix;
    let b = conj_multiplier(u);
    let bd = conj_multiplier(u_dot);
    let dl = -(bd.adjoint() * &b + b.adjoint() * &bd);
    let comm = &p * &l - &l * &p;
    let r = dl - comm;
    let mut worst = T::zero();
    for f in probes {
        u.check_grid(f)?;
        let n = f.norm();
        if n == T::zero() {
            continue;
        }
        let v = matvec(&r, f.coefficients());
        let res = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt() / n;
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Both sides of ‖Π⁺(ūf)‖² ≤ (M(u)/2π)⟨f, −i∂ₓf⟩.
pub fn mass_bound_check<T: Real>(u: &HardyField<T>, f: &HardyField<T>) -> Result<(T, T)> {
    u.check_grid(f)?;
    let h = conj_product(u, f);
    let lhs = h.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
    let df = derivative(f.coefficients(), f.grid().sigma(), false);
    let kinetic = dot(f.coefficients(), &df).re;
    Ok((lhs, u.mass() / (T::lit(2.0) * T::pi()) * kinetic))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport<T> {
    /// eigenvalues below −tol_neg
    pub strict: usize,
    /// including the band |λ| ≤ tol_neg
    pub with_edge: usize,
    pub mass_ratio: T,
    pub lowest: T,
}

impl<T: Real> CountReport<T> {
    /// 2πN ≤ M with N the strict count.
    pub fn holds(&self) -> bool {
        T::count(self.strict) <= self.mass_ratio
    }

    /// 2πN ≤ M + 2π, allowing one grid eigenvalue of slack.
    pub fn holds_with_slack(&self) -> bool {
        T::count(self.strict) <= self.mass_ratio + T::one()
    }
}

pub fn eigenvalue_count_check<T: Real>(u: &HardyField<T>, tol_neg: T) -> Result<CountReport<T>> {
    let rep = spectrum(&assemble_lax(u), tol_neg)?;
    Ok(CountReport {
        strict: rep.below,
        with_edge: rep.with_edge,
        mass_ratio: u.mass() / (T::lit(2.0) * T::pi()),
        lowest: rep.lowest(),
    })
}

/// ⟨f, Af⟩/‖f‖².
pub fn rayleigh<T: Real>(m: &LaxMatrix<T>, f: &HardyField<T>) -> Result<T> {
    let lf = m.apply(f)?;
    Ok(f.inner(&lf).re / f.mass())
}

