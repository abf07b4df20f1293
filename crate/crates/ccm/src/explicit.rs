//! Explicit solution u(t,z) = (1/2πi)·I₊[(X + 2t𝓛_{u₀} − z)⁻¹u₀], Im z > 0.
//!
//! X is the generator of the Fourier shift, X̂f = i df̂/dξ. In the rational
//! basis its Galerkin matrix is σ(−iI − 2i·J) with J the strictly upper
//! triangular matrix of ones, and Im X ≤ 0 holds exactly, so every system
//! matrix X + 2t𝓛 − z has inverse bounded by 1/Im z.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CcmError, Result};
use crate::hardy::{synthesize, Grid, HardyField, UpperHalfPoint};
use crate::lax::{assemble_lax, conj_multiplier, matvec};
use crate::scalar::{cabs, norm2, Real, C};

/// Condition estimate above which a system is refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative disagreement of the two I₊ estimators flagged as near-singular.
pub const I_PLUS_TOLERANCE: f64 = 1e-4;
/// Last-octave size (relative to the peak coefficient) of a decaying solution.
pub const TAIL_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct XOperator<T: Real> {
    pub matrix: DMatrix<C<T>>,
    sigma: T,
}

impl<T: Real> XOperator<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let k = grid.modes();
        let s = grid.sigma();
        let matrix = DMatrix::from_fn(k, k, |m, n| {
            if n == m {
                C::new(T::zero(), -s)
            } else if n > m {
                C::new(T::zero(), -T::lit(2.0) * s)
            } else {
                C::new(T::zero(), T::zero())
            }
        });
        XOperator { matrix, sigma: s }
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Xf in O(K) via suffix sums.
    pub fn apply(&self, f: &HardyField<T>) -> HardyField<T> {
        let a = f.coefficients();
        let s = self.sigma;
        let mut out = vec![C::new(T::zero(), T::zero()); a.len()];
        let mut tail = C::new(T::zero(), T::zero());
        for m in (0..a.len()).rev() {
            out[m] = C::new(T::zero(), -s) * (a[m] + tail * T::lit(2.0));
            tail += a[m];
        }
        HardyField::new(f.grid().clone(), out).expect("same length")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IPlus<T> {
    /// √(2π)·ĝ(0⁺) from the boundary value of the expansion
    pub value: C<T>,
    /// Richardson-extrapolated √(2π)∫ y e^{−yξ} ĝ dξ over the y ladder
    pub ladder: C<T>,
    pub discrepancy: T,
    pub near_singular: bool,
}

/// I₊(g) = lim_{y→∞} √(2π)∫₀^∞ y e^{−yξ} ĝ(ξ) dξ by two estimators.
pub fn i_plus<T: Real>(g: &HardyField<T>) -> IPlus<T> {
    let sigma = g.grid().sigma();
    let k = g.modes();
    let b = g.coefficients();
    let pre = C::new(T::zero(), -T::lit(2.0) * (T::pi() * sigma).sqrt());
    let sum = b.iter().fold(C::new(T::zero(), T::zero()), |s, z| s + z);
    let value = pre * sum;

    // ∫ y e^{−yξ}ℓ_n = √(2σ)·y(y−σ)ⁿ/(y+σ)^{n+1}; y_m = 2^m/Δξ with Δξ ≈ 1/(8σK)
    let base = T::lit(8.0) * sigma * T::count(k);
    let mut hs = Vec::new();
    let mut vals = Vec::new();
    for m in 3..=6 {
        let y = base * T::lit(f64::from(1u32 << m));
        let r = (y - sigma) / (y + sigma);
        let mut acc = C::new(T::zero(), T::zero());
        for c in b.iter().rev() {
            acc = acc * r + c;
        }
        vals.push(pre * acc * (y / (y + sigma)));
        hs.push(T::one() / y);
    }
    let ladder = neville_at_zero(&hs, &vals);
    let scale = cabs(value)
        .max(cabs(ladder))
        .max(T::lit(1e-12) * T::lit(2.0) * (T::pi() * sigma).sqrt() * norm2(b).sqrt());
    let discrepancy = if scale == T::zero() { T::zero() } else { cabs(ladder - value) / scale };
    IPlus { value, ladder, discrepancy, near_singular: discrepancy > T::lit(I_PLUS_TOLERANCE) }
}

/// Polynomial extrapolation of (h_i, v_i) to h = 0.
fn neville_at_zero<T: Real>(h: &[T], v: &[C<T>]) -> C<T> {
    let mut p = v.to_vec();
    let n = h.len();
    for lvl in 1..n {
        for i in 0..n - lvl {
            let (a, b) = (h[i], h[i + lvl]);
            p[i] = (p[i + 1] * a - p[i] * b) / (a - b);
        }
    }
    p[0]
}

#[derive(Clone, Debug)]
pub struct ResolventSystem<T: Real> {
    pub t: T,
    pub z: C<T>,
    pub solution: HardyField<T>,
    /// ‖(X+2t𝓛−z)ĝ − û₀‖/‖û₀‖
    pub residual: T,
    /// ‖X+2t𝓛−z‖_F / Im z, an upper bound on the 2-norm condition number
    pub condition_bound: T,
    /// largest last-octave coefficient over the largest coefficient
    pub tail: T,
}

impl<T: Real> ResolventSystem<T> {
    pub fn decays(&self) -> bool {
        self.tail < T::lit(TAIL_LIMIT)
    }
}

fn system_matrix<T: Real>(t: T, u0: &HardyField<T>) -> DMatrix<C<T>> {
    let x = XOperator::new(u0.grid()).matrix;
    if t == T::zero() {
        x
    } else {
        x + assemble_lax(u0).matrix * C::new(T::lit(2.0) * t, T::zero())
    }
}

fn frobenius<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

fn shifted<T: Real>(a: &DMatrix<C<T>>, z: C<T>) -> DMatrix<C<T>> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= z;
    }
    m
}

fn tail_ratio<T: Real>(g: &[C<T>]) -> T {
    let peak = g.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    if peak == T::zero() {
        return T::zero();
    }
    g[g.len() - g.len() / 2..].iter().fold(T::zero(), |m, z| m.max(cabs(*z))) / peak
}

fn solve_with<T: Real>(a: &DMatrix<C<T>>, t: T, z: C<T>, u0: &HardyField<T>) -> Result<ResolventSystem<T>> {
    if !(z.im > T::zero()) {
        return Err(CcmError::NotUpper(format!("{z:?}")));
    }
    let m = shifted(a, z);
    let bound = (frobenius(&m) / z.im).as_f64();
    if !(bound <= MAX_CONDITION) {
        return Err(CcmError::IllConditioned { bound });
    }
    let rhs = DVector::from_column_slice(u0.coefficients());
    let lu = m.clone().lu();
    let g = lu.solve(&rhs).ok_or_else(|| CcmError::LinAlg("singular resolvent system".into()))?;
    let r = &m * &g - &rhs;
    let n0 = rhs.norm();
    let residual = if n0 == T::zero() { r.norm() } else { r.norm() / n0 };
    let sol: Vec<C<T>> = g.as_slice().to_vec();
    Ok(ResolventSystem {
        t,
        z,
        tail: tail_ratio(&sol),
        solution: HardyField::new(u0.grid().clone(), sol)?,
        residual,
        condition_bound: T::lit(bound),
    })
}

/// ĝ = (X + 2t𝓛_{u₀} − z)⁻¹û₀.
pub fn resolvent_solve<T: Real>(t: T, z: UpperHalfPoint<T>, u0: &HardyField<T>) -> Result<ResolventSystem<T>> {
    solve_with(&system_matrix(t, u0), t, z.z(), u0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitValue<T> {
    pub value: C<T>,
    pub i_plus: IPlus<T>,
    pub residual: T,
    pub condition_bound: T,
    pub tail: T,
}

fn from_system<T: Real>(sys: &ResolventSystem<T>) -> ExplicitValue<T> {
    let ip = i_plus(&sys.solution);
    let two_pi_i = C::new(T::zero(), T::lit(2.0) * T::pi());
    ExplicitValue {
        value: ip.value / two_pi_i,
        i_plus: ip,
        residual: sys.residual,
        condition_bound: sys.condition_bound,
        tail: sys.tail,
    }
}

pub fn explicit_value<T: Real>(t: T, z: UpperHalfPoint<T>, u0: &HardyField<T>) -> Result<ExplicitValue<T>> {
    Ok(from_system(&resolvent_solve(t, z, u0)?))
}

/// explicit_value at many points for one t, sharing the system matrix.
pub fn explicit_values<T: Real>(
    t: T,
    points: &[UpperHalfPoint<T>],
    u0: &HardyField<T>,
) -> Result<Vec<ExplicitValue<T>>> {
    let a = system_matrix(t, u0);
    points.par_iter().map(|z| Ok(from_system(&solve_with(&a, t, z.z(), u0)?))).collect()
}

/// The whole state u(t) from the explicit formula: with A = X + 2t𝓛_{u₀},
/// the basis coefficients are c_n = −2iσ·Σ_m (w_n)_m where
/// w_0 = (A − iσ)⁻¹u₀ and w_{n+1} = (A − iσ)⁻¹(A + iσ)w_n.
pub fn explicit_state<T: Real>(t: T, u0: &HardyField<T>) -> Result<HardyField<T>> {
    let grid = u0.grid();
    let sigma = grid.sigma();
    let k = grid.modes();
    let a = system_matrix(t, u0);
    let is = C::new(T::zero(), sigma);
    let lu = shifted(&a, is).lu();
    let plus = shifted(&a, -is);
    let solve = |v: &DVector<C<T>>| lu.solve(v).ok_or_else(|| CcmError::LinAlg("singular Cayley system".into()));
    let mut w = solve(&DVector::from_column_slice(u0.coefficients()))?;
    let mut out = Vec::with_capacity(k);
    let pre = C::new(T::zero(), -T::lit(2.0) * sigma);
    for n in 0..k {
        out.push(pre * w.iter().fold(C::new(T::zero(), T::zero()), |s, z| s + z));
        if n + 1 < k {
            w = solve(&(&plus * &w))?;
        }
    }
    HardyField::new(grid.clone(), out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow<T> {
    pub t: T,
    pub h: T,
    pub sup: T,
    /// t^{−1/2}‖u₀‖_{L¹}[1 + ‖u₀‖²(1 + 1/h)]
    pub envelope: T,
    /// sup / envelope
    pub fitted_c: T,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayProfile<T> {
    pub rows: Vec<DecayRow<T>>,
    pub l1_norm: T,
    /// per height: (h, log-log slope of sup vs t, max/min of the constant over the upper half of the times)
    pub fits: Vec<(T, T, T)>,
}

/// ∫|u| dx by the Cayley quadrature on a 4×-oversampled grid.
pub fn l1_norm<T: Real>(u: &HardyField<T>) -> Result<T> {
    let g = Grid::with_samples(u.grid().sigma(), u.modes(), 4 * u.grid().samples())?;
    let v = u.resized(&g)?;
    let s = synthesize(&v);
    Ok(s.iter().zip(&g.spatial().weights).fold(T::zero(), |acc, (z, w)| acc + cabs(*z) * *w))
}

/// sup over the probe points x of |u(t, x+ih)|, per (t, h), from explicit states.
pub fn decay_profile<T: Real>(u0: &HardyField<T>, times: &[T], heights: &[T], probes: &[T]) -> Result<DecayProfile<T>> {
    if times.iter().any(|t| *t == T::zero()) {
        return Err(CcmError::Param("decay profile times must be nonzero".into()));
    }
    if heights.iter().any(|h| !(*h > T::zero())) {
        return Err(CcmError::NotUpper("strip heights must be positive".into()));
    }
    let l1 = l1_norm(u0)?;
    let m = u0.mass();
    let states: Vec<HardyField<T>> =
        times.par_iter().map(|&t| explicit_state(t, u0)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (&t, st) in times.iter().zip(&states) {
        for &h in heights {
            let sup = probes.iter().fold(T::zero(), |s, &x| s.max(cabs(st.value_at(C::new(x, h)))));
            let envelope = l1 * (T::one() + m * (T::one() + T::one() / h)) / t.mag().sqrt();
            rows.push(DecayRow { t, h, sup, envelope, fitted_c: sup / envelope });
        }
    }
    let fits = heights
        .iter()
        .map(|&h| {
            let sel: Vec<&DecayRow<T>> = rows.iter().filter(|r| r.h == h).collect();
            let pts: Vec<(T, T)> = sel.iter().map(|r| (r.t.mag().ln(), r.sup.ln())).collect();
            let slope = least_squares_slope(&pts);
            let upper = &sel[sel.len() / 2..];
            let cmax = upper.iter().fold(T::zero(), |a, r| a.max(r.fitted_c));
            let cmin = upper.iter().fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, r| a.min(r.fitted_c));
            (h, slope, cmax / cmin)
        })
        .collect();
    Ok(DecayProfile { rows, l1_norm: l1, fits })
}

pub fn least_squares_slope<T: Real>(pts: &[(T, T)]) -> T {
    let n = T::count(pts.len());
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / n;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let sxy = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    sxy / sxx
}

/// Relative mismatch of A û₀ and A₀û₀ + 2t·A₀(u₀Π⁺ū₀)A û₀, where
/// A = (X + 2t𝓛_{u₀} − z)⁻¹ and A₀ = (X − 2ti∂ₓ − z)⁻¹.
pub fn resolvent_identity_check<T: Real>(t: T, z: UpperHalfPoint<T>, u0: &HardyField<T>) -> Result<T> {
    let grid = u0.grid();
    let zero = HardyField::zeros(grid);
    let lhs = resolvent_solve(t, z, u0)?.solution;
    let a0 = system_matrix(t, &zero);
    let free = solve_with(&a0, t, z.z(), u0)?.solution;
    let b = conj_multiplier(u0);
    let mult = b.adjoint() * &b;
    let coupling = matvec(&mult, lhs.coefficients());
    let corr = HardyField::new(grid.clone(), coupling.iter().map(|c| *c * (T::lit(2.0) * t)).collect())?;
    let second = solve_with(&a0, t, z.z(), &corr)?.solution;
    let rhs = free.axpy(C::new(T::one(), T::zero()), &second)?;
    let scale = lhs.norm();
    let d = lhs.distance(&rhs)?;
    Ok(if scale == T::zero() { d } else { d / scale })
}
