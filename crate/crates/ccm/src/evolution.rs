//! Integrating-factor RK4 for u_t = i u_xx + 2uΠ⁺∂ₓ(|u|²) on the Hardy basis.
//!
//! The linear part −i(−i∂ₓ)² is exactly diagonal in the eigenbasis of the
//! truncated derivative, so its propagator is V·diag(e^{−iξ²dt})·Vᵀ.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conserved::{self, ConservedReport};
use crate::error::{CcmError, Result};
use crate::hardy::{closure_defect, conj_product, derivative, product, sobolev_norm, synthesize, Grid, HardyField};
use crate::scalar::{cabs, norm2, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    IntegratingFactorRk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub scheme: Scheme,
    /// Require products to be alias-free on the grid.
    pub dealias: bool,
    /// allowed |M(t) − M(0)| per unit time
    pub mass_tol: T,
    /// allowed |E(t) − E(0)| per unit time
    pub energy_tol: T,
    pub max_dt_halvings: usize,
    pub max_refinements: usize,
    pub max_modes: usize,
    /// top-octave mass fraction that triggers a refinement
    pub refine_band: T,
    pub t_final: T,
    pub checkpoint_interval: T,
    pub sup_ceiling: Option<T>,
    pub h1_ceiling: Option<T>,
    /// Ḣ^s norms recorded at each checkpoint
    pub norm_orders: Vec<T>,
    /// Drop the nonlinearity (free Schrödinger flow).
    pub linear_only: bool,
    /// Hierarchy depth in each conserved report.
    pub hierarchy_depth: usize,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(dt: T, t_final: T) -> Self {
        IntegratorConfig {
            dt,
            scheme: Scheme::IntegratingFactorRk4,
            dealias: true,
            mass_tol: T::lit(1e-6),
            energy_tol: T::lit(1e-4),
            max_dt_halvings: 4,
            max_refinements: 1,
            max_modes: 2048,
            refine_band: T::lit(1e-6),
            t_final,
            checkpoint_interval: t_final / T::lit(10.0),
            sup_ceiling: None,
            h1_ceiling: None,
            norm_orders: vec![T::one()],
            linear_only: false,
            hierarchy_depth: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T, name: &str| {
            if x > T::zero() && x.is_finite() {
                Ok(())
            } else {
                Err(CcmError::Param(format!("{name} must be positive, got {x:?}")))
            }
        };
        pos(self.dt, "dt")?;
        pos(self.mass_tol, "mass_tol")?;
        pos(self.energy_tol, "energy_tol")?;
        pos(self.refine_band, "refine_band")?;
        pos(self.checkpoint_interval, "checkpoint_interval")?;
        if !(self.t_final >= T::zero()) {
            return Err(CcmError::Param("t_final must be nonnegative".into()));
        }
        if self.norm_orders.iter().any(|s| !(*s >= T::zero())) {
            return Err(CcmError::Param("norm orders must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Nonlinear term 2uΠ⁺∂ₓ|u|², truncated to K modes, plus the fraction of its
/// energy that falls in the discarded modes K..2K.
pub fn nonlinear<T: Real>(u: &HardyField<T>) -> (Vec<C<T>>, T) {
    let k = u.modes();
    let h = conj_product(u, u);
    let i2 = C::new(T::zero(), T::lit(2.0));
    let dh: Vec<C<T>> = derivative(&h, u.grid().sigma(), true).into_iter().map(|z| z * i2).collect();
    let full = product(u, &dh, 2 * k + 1);
    let total = norm2(&full);
    let band = if total == T::zero() { T::zero() } else { norm2(&full[k..]) / total };
    let mut n = full;
    n.truncate(k);
    (n, band)
}

/// u_t at u, with the padded-band fraction of the nonlinear term.
pub fn rhs_with_band<T: Real>(u: &HardyField<T>) -> (HardyField<T>, T) {
    let sigma = u.grid().sigma();
    let a = u.coefficients();
    let dda = derivative(&derivative(a, sigma, false), sigma, false);
    let (n, band) = nonlinear(u);
    let mi = C::new(T::zero(), -T::one());
    let out = dda.iter().zip(&n).map(|(d, n)| mi * d + n).collect();
    (HardyField::new(u.grid().clone(), out).expect("K modes"), band)
}

/// Band fraction above which `rhs` results are flagged as aliased.
pub const ALIAS_BAND: f64 = 1e-10;

pub fn rhs<T: Real>(u: &HardyField<T>) -> HardyField<T> {
    rhs_with_band(u).0
}

/// Time-reversal symmetry R f(x) = conj(f(−x)); on coefficients a ↦ −ā.
pub fn reflect<T: Real>(u: &HardyField<T>) -> HardyField<T> {
    u.map(|z| -z.conj())
}

/// Largest |u| over the grid's sample points.
pub fn sup_norm<T: Real>(u: &HardyField<T>) -> T {
    synthesize(u).iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
}

/// Rough RK4 stability limit dt·2‖u‖²_∞·ξ_max ≤ 2.8 for the nonlinear stage.
pub fn stability_limit<T: Real>(u: &HardyField<T>) -> T {
    let s = sup_norm(u);
    let denom = T::lit(2.0) * s * s * u.grid().largest_frequency();
    if denom == T::zero() {
        T::max_value().unwrap_or(T::lit(f64::MAX))
    } else {
        T::lit(2.8) / denom
    }
}

/// Precomputed linear propagators for one (grid, dt).
pub struct Stepper<T: Real> {
    grid: Arc<Grid<T>>,
    dt: T,
    linear_only: bool,
    full: DMatrix<C<T>>,
    half: DMatrix<C<T>>,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &Arc<Grid<T>>, dt: T, linear_only: bool) -> Self {
        let sp = grid.spectral();
        let v = sp.vectors.map(|x| C::new(x, T::zero()));
        let prop = |tau: T| {
            let d = DMatrix::from_diagonal(&DVector::from_iterator(
                grid.modes(),
                sp.freq.nodes.iter().map(|&xi| {
                    let ph = -xi * xi * tau;
                    C::new(ph.cos(), ph.sin())
                }),
            ));
            &v * d * v.transpose()
        };
        Stepper { grid: grid.clone(), dt, linear_only, full: prop(dt), half: prop(dt * T::lit(0.5)) }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    fn nl(&self, a: &DVector<C<T>>) -> DVector<C<T>> {
        if self.linear_only {
            return DVector::zeros(a.len());
        }
        let u = HardyField::new(self.grid.clone(), a.as_slice().to_vec()).expect("K modes");
        DVector::from_vec(nonlinear(&u).0)
    }

    pub fn step(&self, u: &HardyField<T>) -> Result<HardyField<T>> {
        if !u.grid().compatible(&self.grid) {
            return Err(CcmError::GridMismatch);
        }
        let a = DVector::from_column_slice(u.coefficients());
        let out = if self.linear_only { &self.full * &a } else { self.rk4(&a) };
        let f = HardyField::new(self.grid.clone(), out.as_slice().to_vec())?;
        if !f.is_finite() {
            return Err(CcmError::NonFinite(f64::NAN));
        }
        Ok(f)
    }

    fn rk4(&self, a: &DVector<C<T>>) -> DVector<C<T>> {
        let dt = C::new(self.dt, T::zero());
        let h = dt * T::lit(0.5);
        let k1 = self.nl(a);
        let k2 = self.nl(&(&self.half * (a + &k1 * h)));
        let ea2 = &self.half * a;
        let k3 = self.nl(&(&ea2 + &k2 * h));
        let ea = &self.full * a;
        let k4 = self.nl(&(&ea + &self.half * &k3 * dt));
        let sum = &self.full * &k1 + &self.half * (&k2 + &k3) * C::new(T::lit(2.0), T::zero()) + k4;
        ea + sum * (dt / T::lit(6.0))
    }
}

/// Substep size as a fraction of `stability_limit` used by `step`.
pub const SUBSTEP_FRACTION: f64 = 0.125;

/// Advance by dt. The linear flow is exact in one step; with the nonlinearity
/// dt is split evenly into substeps of at most SUBSTEP_FRACTION times the
/// stability limit. Builds propagators each call (use `Stepper` for loops).
pub fn step<T: Real>(u: &HardyField<T>, dt: T, config: &IntegratorConfig<T>) -> Result<HardyField<T>> {
    if !(dt > T::zero()) {
        return Err(CcmError::Param("dt must be positive".into()));
    }
    let n = if config.linear_only {
        1
    } else {
        let h = stability_limit(u) * T::lit(SUBSTEP_FRACTION);
        (dt / h).ceil().as_f64().max(1.0) as usize
    };
    let st = Stepper::new(u.grid(), dt / T::count(n), config.linear_only);
    let mut cur = u.clone();
    for _ in 0..n {
        cur = st.step(&cur)?;
    }
    Ok(cur)
}

/// Time step below which the integrating-factor scheme shows its asymptotic
/// order on a grid: ξ_max²·dt = 1.
pub fn asymptotic_dt<T: Real>(grid: &Grid<T>) -> T {
    let x = grid.largest_frequency();
    T::one() / (x * x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence<T> {
    pub dt: T,
    /// ‖u_{dt} − u_{dt/2}‖ and ‖u_{dt/2} − u_{dt/4}‖ at the end of the span
    pub coarse: T,
    pub fine: T,
    /// coarse/fine, 16 for a fourth-order scheme
    pub ratio: T,
    pub order: T,
}

/// Self-convergence of the stepper over `span` from `steps` steps of dt = span/steps.
pub fn self_convergence<T: Real>(u0: &HardyField<T>, span: T, steps: usize) -> Result<Convergence<T>> {
    if steps == 0 || !(span > T::zero()) {
        return Err(CcmError::Param("need a positive span and step count".into()));
    }
    let run = |n: usize| -> Result<HardyField<T>> {
        let st = Stepper::new(u0.grid(), span / T::count(n), false);
        let mut u = u0.clone();
        for _ in 0..n {
            u = st.step(&u)?;
        }
        Ok(u)
    };
    let a = run(steps)?;
    let b = run(2 * steps)?;
    let c = run(4 * steps)?;
    let coarse = a.distance(&b)?;
    let fine = b.distance(&c)?;
    let ratio = coarse / fine;
    Ok(Convergence { dt: span / T::count(steps), coarse, fine, ratio, order: ratio.ln() / T::lit(2.0).ln() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ReachedFinal,
    NormCeiling,
    ResolutionExhausted,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<HardyField<T>>,
    pub reports: Vec<ConservedReport<T>>,
    /// norms[i][j]: ‖u(t_i)‖_{Ḣ^{s_j}}
    pub norms: Vec<Vec<T>>,
    pub norm_orders: Vec<T>,
    pub sup: Vec<T>,
    /// negative-band fraction of each checkpoint after a sample round trip
    pub closure: Vec<T>,
    /// time step in force when each checkpoint was reached
    pub dt: Vec<T>,
    /// (time, new mode count)
    pub refinements: Vec<(T, usize)>,
    pub verdict: Verdict,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &HardyField<T> {
        self.states.last().expect("trajectory has the initial state")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("trajectory has the initial time")
    }

    /// Checkpoint closest to t.
    pub fn state_near(&self, t: T) -> (T, &HardyField<T>) {
        let i = (0..self.times.len())
            .min_by(|&a, &b| (self.times[a] - t).mag().partial_cmp(&(self.times[b] - t).mag()).unwrap())
            .expect("nonempty");
        (self.times[i], &self.states[i])
    }

    pub fn max_mass_drift(&self) -> T {
        let m0 = self.reports[0].mass;
        self.reports.iter().fold(T::zero(), |d, r| d.max((r.mass - m0).mag()))
    }

    pub fn max_energy_drift(&self) -> T {
        let e0 = self.reports[0].energy;
        self.reports.iter().fold(T::zero(), |d, r| d.max((r.energy - e0).mag()))
    }

    pub fn time_state_pairs(&self) -> Vec<(T, HardyField<T>)> {
        self.times.iter().copied().zip(self.states.iter().cloned()).collect()
    }

    fn record(&mut self, t: T, u: HardyField<T>, dt: T, depth: usize) -> Result<()> {
        self.reports.push(conserved::report(&u, t, depth)?);
        let mut row = Vec::with_capacity(self.norm_orders.len());
        for &s in &self.norm_orders {
            row.push(sobolev_norm(&u, s, true)?);
        }
        self.norms.push(row);
        self.sup.push(sup_norm(&u));
        self.closure.push(closure_defect(&u));
        self.dt.push(dt);
        self.times.push(t);
        self.states.push(u);
        Ok(())
    }
}

enum Segment<T: Real> {
    Done(HardyField<T>),
    Failed,
}

fn run_segment<T: Real>(stepper: &Stepper<T>, u: &HardyField<T>, span: T) -> Segment<T> {
    let n = (span / stepper.dt()).ceil().as_f64().max(1.0) as usize;
    let mut cur = u.clone();
    for _ in 0..n {
        match stepper.step(&cur) {
            Ok(next) => cur = next,
            Err(_) => return Segment::Failed,
        }
    }
    Segment::Done(cur)
}

/// Run to `t_final` or a verdict. Each checkpoint interval is integrated with
/// a step that divides it evenly; a segment whose mass or energy drift exceeds
/// the budget is redone with dt halved, and when the halvings run out the mode
/// count doubles.
pub fn evolve<T: Real>(u0: &HardyField<T>, config: &IntegratorConfig<T>) -> Result<Trajectory<T>> {
    config.validate()?;
    if config.dealias && !u0.grid().dealiased() {
        return Err(CcmError::Grid("grid too coarse for alias-free products".into()));
    }
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        reports: Vec::new(),
        norms: Vec::new(),
        norm_orders: config.norm_orders.clone(),
        sup: Vec::new(),
        closure: Vec::new(),
        dt: Vec::new(),
        refinements: Vec::new(),
        verdict: Verdict::ReachedFinal,
    };
    let depth = config.hierarchy_depth;
    let mut dt = config.dt;
    if !config.linear_only {
        dt = dt.min(stability_limit(u0));
    }
    traj.record(T::zero(), u0.clone(), dt, depth)?;
    let m0 = traj.reports[0].mass;
    let e0 = traj.reports[0].energy;
    let mut u = u0.clone();
    let mut t = T::zero();
    let mut halvings = 0;
    let mut refinements = 0;
    let interval = config.checkpoint_interval;
    let tiny = interval * T::lit(1e-9);
    let mut stepper = None::<Stepper<T>>;

    'outer: while t < config.t_final - tiny {
        let span = interval.min(config.t_final - t);
        let seg_end = t + span;
        let allowed = seg_end.max(interval);
        let next = loop {
            let n = (span / dt).ceil().max(T::one());
            let dt_eff = span / n;
            let st = match stepper.take() {
                Some(s) if s.dt() == dt_eff && s.grid().compatible(u.grid()) => s,
                _ => Stepper::new(u.grid(), dt_eff, config.linear_only),
            };
            let ok = match run_segment(&st, &u, span) {
                Segment::Done(v) => {
                    let dm = (v.mass() - m0).mag();
                    let de = if config.linear_only { T::zero() } else { (conserved::energy(&v) - e0).mag() };
                    if dm <= config.mass_tol * allowed && de <= config.energy_tol * allowed {
                        Some(v)
                    } else {
                        None
                    }
                }
                Segment::Failed => None,
            };
            stepper = Some(st);
            if let Some(v) = ok {
                break v;
            }
            if halvings < config.max_dt_halvings {
                halvings += 1;
                dt *= T::lit(0.5);
            } else if refinements < config.max_refinements && 2 * u.modes() <= config.max_modes {
                refinements += 1;
                u = refine(&u)?;
                traj.refinements.push((t, u.modes()));
            } else {
                traj.verdict = Verdict::ResolutionExhausted;
                break 'outer;
            }
        };
        t = seg_end;
        u = next;
        traj.record(t, u.clone(), dt, depth)?;

        if u.top_octave() > config.refine_band {
            if refinements < config.max_refinements && 2 * u.modes() <= config.max_modes {
                refinements += 1;
                u = refine(&u)?;
                traj.refinements.push((t, u.modes()));
            } else {
                traj.verdict = Verdict::ResolutionExhausted;
                break;
            }
        }
        let sup = *traj.sup.last().expect("recorded");
        let h1 = crate::hardy::sobolev_norm(&u, T::one(), true)?;
        if config.sup_ceiling.is_some_and(|c| sup > c) || config.h1_ceiling.is_some_and(|c| h1 > c) {
            traj.verdict = Verdict::NormCeiling;
            break;
        }
    }
    Ok(traj)
}

/// Same scale, twice the modes, coefficients zero-padded.
pub fn refine<T: Real>(u: &HardyField<T>) -> Result<HardyField<T>> {
    let g = Grid::new(u.grid().sigma(), 2 * u.modes())?;
    u.resized(&g)
}
