//! Laguerre functions ℓ_n(ξ) = √(2σ)·e^{−σξ}·L_n(2σξ), the Fourier transforms
//! (up to a factor −i) of the rational basis functions.

use crate::scalar::{Real, C};

const RESCALE: f64 = 1e30;

/// ℓ_0(ξ), …, ℓ_{K−1}(ξ), stable for large arguments.
pub fn functions<T: Real>(modes: usize, sigma: T, xi: T) -> Vec<T> {
    let mut out = Vec::with_capacity(modes);
    walk(modes, sigma, xi, |_, v| out.push(v));
    out
}

/// Σ c_n ℓ_n(ξ).
pub fn series<T: Real>(coef: &[C<T>], sigma: T, xi: T) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    walk(coef.len(), sigma, xi, |n, v| acc += coef[n] * v);
    acc
}

fn walk<T: Real>(modes: usize, sigma: T, xi: T, mut visit: impl FnMut(usize, T)) {
    if modes == 0 {
        return;
    }
    let two = T::lit(2.0);
    let t = two * sigma * xi;
    let pre = (two * sigma).sqrt();
    let big = T::lit(RESCALE);
    let log_big = big.ln();
    // L_n = p_n · e^{shift}, value = pre·p_n·e^{shift − t/2}
    let mut shift = T::zero();
    let mut prev = T::zero();
    let mut cur = T::one();
    for n in 0..modes {
        visit(n, pre * cur * (shift - t / two).exp());
        let nn = T::count(n);
        let next = ((two * nn + T::one() - t) * cur - nn * prev) / (nn + T::one());
        prev = cur;
        cur = next;
        if cur.mag() > big || prev.mag() > big {
            cur /= big;
            prev /= big;
            shift += log_big;
        }
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
}

/// Nodes and weights for ∫_κ^∞ g(ξ) dξ where g is built from the first `modes`
/// Laguerre functions. Uses ξ = κ + τ²/(2σ) with uniform panels in τ, which
/// equidistributes the oscillations of the basis.
pub fn half_line_rule<T: Real>(modes: usize, sigma: T, kappa: T) -> Vec<(T, T)> {
    let two = T::lit(2.0);
    let k = T::count(modes);
    let t_end = T::lit(4.0) * k + T::lit(40.0) * k.cbrt() + T::lit(60.0);
    let t_kappa = two * sigma * kappa;
    if t_kappa >= t_end {
        return Vec::new();
    }
    let tau_end = (t_end - t_kappa).sqrt();
    let panels = (tau_end * k.sqrt()).ceil().as_f64() as usize + 4;
    let (gx, gw) = gauss_legendre::<T>(12);
    let h = tau_end / T::count(panels);
    let mut rule = Vec::with_capacity(panels * gx.len());
    for p in 0..panels {
        let a = T::count(p) * h;
        for (x, w) in gx.iter().zip(&gw) {
            let tau = a + h * (*x + T::one()) / two;
            let xi = kappa + tau * tau / (two * sigma);
            let wt = *w * h / two * tau / sigma;
            rule.push((xi, wt));
        }
    }
    rule
}
