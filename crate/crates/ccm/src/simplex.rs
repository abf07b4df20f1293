//! Nelder–Mead minimization.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Options<T> {
    /// initial simplex edge per coordinate
    pub step: T,
    /// stop when the spread of values and the simplex diameter fall below these
    pub f_tol: T,
    pub x_tol: T,
    /// absolute rounding level of f; a simplex whose values agree to this is done
    pub f_floor: T,
    pub max_iter: usize,
}

impl<T: Real> Default for Options<T> {
    fn default() -> Self {
        Options { step: T::lit(0.1), f_tol: T::lit(1e-14), x_tol: T::lit(1e-9), f_floor: T::zero(), max_iter: 2000 }
    }
}

pub fn minimize<T: Real>(f: impl Fn(&[T]) -> T, x0: &[T], opts: Options<T>) -> Minimum<T> {
    let n = x0.len();
    let eval = |x: &[T]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::max_value().unwrap_or(T::lit(f64::MAX))
        }
    };
    let mut pts: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<T> = pts.iter().map(|p| eval(p)).collect();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = vals[n] - vals[0];
        let diam = pts[1..].iter().fold(T::zero(), |d, p| {
            d.max(p.iter().zip(&pts[0]).fold(T::zero(), |m, (a, b)| m.max((*a - *b).mag())))
        });
        if (spread <= opts.f_tol * (T::one() + vals[0].mag()) && diam <= opts.x_tol) || spread < opts.f_floor {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<T> =
            (0..n).map(|j| pts[..n].iter().fold(T::zero(), |s, p| s + p[j]) / T::count(n)).collect();
        let along = |t: T| -> Vec<T> { (0..n).map(|j| centroid[j] + (pts[n][j] - centroid[j]) * t).collect() };
        let xr = along(-T::one());
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(-two);
            let fe = eval(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-half);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(half);
                let v = eval(&x);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<T> = (0..n).map(|j| pts[0][j] + (pts[i][j] - pts[0][j]) * half).collect();
                    vals[i] = eval(&p);
                    pts[i] = p;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap()).unwrap();
    Minimum { x: pts[best].clone(), value: vals[best], iterations, converged }
}
