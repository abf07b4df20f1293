use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};

use crate::error::{CcmError, Result};
use crate::hardy::laguerre;
use crate::scalar::{cis, Real, C};

/// Cayley sample points x_j = −σ·cot(θ_j/2) with θ_j = 2π(j+½)/M, and the
/// quadrature weights that make the discrete L² norm exact for the basis.
#[derive(Clone, Debug)]
pub struct SpatialGrid<T: Real> {
    pub scale: T,
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

/// Nonnegative frequency nodes: eigenvalues of the truncated −i∂ₓ, which are
/// Gauss–Laguerre nodes divided by 2σ, with the matching Christoffel weights.
#[derive(Clone, Debug)]
pub struct FrequencyGrid<T: Real> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Eigen-decomposition of the truncated derivative: D_K = V diag(ξ) Vᵀ.
pub struct Spectral<T: Real> {
    pub freq: FrequencyGrid<T>,
    pub vectors: DMatrix<T>,
}

/// Discretization of L²₊(ℝ) by the first `modes` functions of the rational
/// basis φ_n(x) = √(σ/π)·ζⁿ/(x+iσ), ζ = (x−iσ)/(x+iσ), sampled on `samples`
/// points of the unit circle.
pub struct Grid<T: Real> {
    sigma: T,
    modes: usize,
    samples: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    twiddle: Vec<C<T>>,
    zeta: Vec<C<T>>,
    to_g: Vec<C<T>>,
    from_g: Vec<C<T>>,
    spatial: SpatialGrid<T>,
    spectral: OnceLock<Arc<Spectral<T>>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("sigma", &self.sigma)
            .field("modes", &self.modes)
            .field("samples", &self.samples)
            .finish()
    }
}

pub fn default_samples(modes: usize) -> usize {
    (2 * modes + 8).next_power_of_two().max(16)
}

impl<T: Real> Grid<T> {
    pub fn new(sigma: T, modes: usize) -> Result<Arc<Self>> {
        Self::with_samples(sigma, modes, default_samples(modes))
    }

    pub fn with_samples(sigma: T, modes: usize, samples: usize) -> Result<Arc<Self>> {
        if !(sigma > T::zero()) {
            return Err(CcmError::Grid(format!("scale must be positive, got {sigma:?}")));
        }
        if modes == 0 {
            return Err(CcmError::Grid("need at least one mode".into()));
        }
        if samples < 8 || !samples.is_multiple_of(2) || samples <= modes {
            return Err(CcmError::Grid(format!(
                "sample count {samples} must be even, ≥ 8 and exceed the mode count {modes}"
            )));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(samples);
        let inv = planner.plan_fft_inverse(samples);
        let m = T::count(samples);
        let pi = T::pi();
        let twiddle = (0..samples).map(|n| cis(pi * T::count(n) / m)).collect();
        let two = T::lit(2.0);
        let mut zeta = Vec::with_capacity(samples);
        let mut points = Vec::with_capacity(samples);
        let mut weights = Vec::with_capacity(samples);
        let mut to_g = Vec::with_capacity(samples);
        let mut from_g = Vec::with_capacity(samples);
        let norm = C::new(T::zero(), two * (pi * sigma).sqrt());
        for j in 0..samples {
            let th = two * pi * (T::count(j) + T::lit(0.5)) / m;
            let z = cis(th);
            let half = th / two;
            let s = half.sin();
            points.push(-sigma * half.cos() / s);
            weights.push(two * pi / m * sigma / (two * s * s));
            let one_minus = C::new(T::one(), T::zero()) - z;
            to_g.push(norm / one_minus);
            from_g.push(one_minus / norm);
            zeta.push(z);
        }
        Ok(Arc::new(Grid {
            sigma,
            modes,
            samples,
            fwd,
            inv,
            twiddle,
            zeta,
            to_g,
            from_g,
            spatial: SpatialGrid { scale: sigma, points, weights },
            spectral: OnceLock::new(),
        }))
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// True when Hardy×Hardy and conj×Hardy products are computed without aliasing.
    pub fn dealiased(&self) -> bool {
        self.samples >= 2 * self.modes + 2
    }

    pub fn spatial(&self) -> &SpatialGrid<T> {
        &self.spatial
    }

    pub fn zeta(&self) -> &[C<T>] {
        &self.zeta
    }

    pub fn compatible(&self, other: &Grid<T>) -> bool {
        self.sigma == other.sigma && self.modes == other.modes && self.samples == other.samples
    }

    /// Same scale and sample count, new mode count.
    pub fn with_modes(&self, modes: usize) -> Result<Arc<Self>> {
        Self::new(self.sigma, modes)
    }

    pub fn largest_frequency(&self) -> T {
        *self.spectral().freq.nodes.last().expect("nonempty grid")
    }

    pub fn spectral(&self) -> &Arc<Spectral<T>> {
        self.spectral.get_or_init(|| Arc::new(build_spectral(self.sigma, self.modes)))
    }

    pub fn frequencies(&self) -> &FrequencyGrid<T> {
        &self.spectral().freq
    }

    #[inline]
    fn tw(&self, deg: i64) -> C<T> {
        if deg >= 0 {
            self.twiddle[deg as usize]
        } else {
            self.twiddle[(-deg) as usize].conj()
        }
    }

    /// Values on the circle of the Laurent polynomial Σ c_i ζ^{lo+i}.
    pub fn circle_values(&self, coef: &[C<T>], lo: i64) -> Vec<C<T>> {
        let m = self.samples as i64;
        let mut buf = vec![C::new(T::zero(), T::zero()); self.samples];
        for (i, &c) in coef.iter().enumerate() {
            let d = lo + i as i64;
            buf[d.rem_euclid(m) as usize] += c * self.tw(d);
        }
        self.inv.process(&mut buf);
        buf
    }

    /// Laurent coefficients of degrees lo..=hi of a function sampled on the circle.
    pub fn laurent(&self, mut vals: Vec<C<T>>, lo: i64, hi: i64) -> Vec<C<T>> {
        debug_assert!(hi - lo < self.samples as i64);
        self.fwd.process(&mut vals);
        let m = self.samples as i64;
        let inv_m = T::one() / T::count(self.samples);
        (lo..=hi)
            .map(|d| vals[d.rem_euclid(m) as usize] * self.tw(d).conj() * inv_m)
            .collect()
    }

    /// Samples of Σ a_n φ_n at the Cayley points.
    pub fn hardy_samples(&self, coef: &[C<T>]) -> Vec<C<T>> {
        let mut v = self.circle_values(coef, 0);
        for (x, f) in v.iter_mut().zip(&self.from_g) {
            *x *= f;
        }
        v
    }

    /// Cayley-side function G = f·√(π/σ)(x+iσ) from samples of f.
    pub fn g_form(&self, samples: &[C<T>]) -> Vec<C<T>> {
        samples.iter().zip(&self.to_g).map(|(f, g)| f * g).collect()
    }

    pub fn from_g_factor(&self) -> &[C<T>] {
        &self.from_g
    }
}

fn build_spectral<T: Real>(sigma: T, modes: usize) -> Spectral<T> {
    let two_sigma = T::lit(2.0) * sigma;
    let mut d = DMatrix::<T>::zeros(modes, modes);
    for n in 0..modes {
        d[(n, n)] = T::count(2 * n + 1) / two_sigma;
        if n + 1 < modes {
            let off = -T::count(n + 1) / two_sigma;
            d[(n, n + 1)] = off;
            d[(n + 1, n)] = off;
        }
    }
    let eig = d.symmetric_eigen();
    let mut order: Vec<usize> = (0..modes).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let nodes: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<T>::zeros(modes, modes);
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).clone_owned();
        if v[0] < T::zero() {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    let weights = nodes
        .iter()
        .map(|&xi| {
            let l = laguerre::functions(modes, sigma, xi);
            T::one() / l.iter().fold(T::zero(), |s, &v| s + v * v)
        })
        .collect();
    Spectral { freq: FrequencyGrid { nodes, weights }, vectors }
}
