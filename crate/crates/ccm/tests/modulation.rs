use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ccm::evolution::{evolve, IntegratorConfig};
use ccm::hardy::{Grid, HardyField, Symmetry};
use ccm::modulation::{
    direct_residual, fit, power_law, track, width_law_fit, wrap_angle, ModulationFit, Objective, EPS_REPORT,
};
use ccm::simplex::{minimize, Options};
use ccm::states::soliton;
use ccm::C;
use proptest::prelude::*;

/// The field u with u_{λ,θ,y} = Q: a single pole at −y/λ − i/λ.
fn orbit_point(g: &std::sync::Arc<Grid<f64>>, lam: f64, theta: f64, y: f64) -> HardyField<f64> {
    let inv = Symmetry { lambda: lam, theta, y }.inverse();
    let res = C::new(inv.theta.cos(), inv.theta.sin()) * (2.0 / inv.lambda).sqrt();
    HardyField::rational(g, res, C::new(-inv.y / inv.lambda, -1.0 / inv.lambda)).unwrap()
}

#[test]
fn nelder_mead_on_rosenbrock() {
    let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
    let m = minimize(f, &[-1.2, 1.0], Options { step: 0.5, ..Options::default() });
    assert!(m.converged);
    assert_abs_diff_eq!(m.x[0], 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(m.x[1], 1.0, epsilon = 1e-6);
}

#[test]
fn soliton_fits_itself() {
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let f = fit(&soliton(&g), None).unwrap();
    assert_abs_diff_eq!(f.lambda, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(f.theta, 0.0, epsilon = 1e-6);
    assert_abs_diff_eq!(f.y, 0.0, epsilon = 1e-6);
    assert!(f.residual < 1e-6);
}

#[test]
fn recovers_known_parameters() {
    // the pole sits at 3 − 2i; its coefficients decay like 0.745ⁿ
    let g = Grid::<f64>::new(1.0, 128).unwrap();
    let u = orbit_point(&g, 2.0, 1.0, 3.0);
    let f = fit(&u, None).unwrap();
    assert!(f.converged, "{f:?}");
    assert_abs_diff_eq!(f.lambda, 2.0, epsilon = 1e-6);
    assert_abs_diff_eq!(f.theta, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(f.y, 3.0, epsilon = 1e-6);
    assert!(f.residual < 1e-6);
}

#[test]
fn closed_form_matches_resampled_distance() {
    let g = Grid::<f64>::new(1.0, 128).unwrap();
    let u = orbit_point(&g, 1.3, -0.4, 0.7).axpy(C::new(0.1, 0.0), &HardyField::basis(&g, 2).unwrap()).unwrap();
    let obj = Objective::new(&u);
    for (l, th, y) in [(1.0, 0.0, 0.0), (1.3, -0.4, 0.7), (0.8, 2.0, -1.0)] {
        let closed = obj.distance_sq(l, th, y).max(0.0).sqrt();
        let direct = direct_residual(&u, &Symmetry { lambda: l, theta: th, y }).unwrap();
        assert_abs_diff_eq!(closed, direct, epsilon = 1e-6);
    }
}

#[test]
fn residual_never_exceeds_the_identity() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let u = HardyField::basis(&g, 3).unwrap().scaled(C::new(2.0, 0.0));
    let f = fit(&u, None).unwrap();
    let identity = Objective::new(&u).distance_sq(1.0, 0.0, 0.0).sqrt();
    assert!(f.residual <= identity + 1e-12);
    // the distance to the orbit is at most ‖u‖_{H¹} + ‖Q‖_{H¹}
    assert!(f.residual <= (u.mass()).sqrt() + 100.0);
}

#[test]
fn zero_field_is_rejected() {
    let g = Grid::<f64>::new(1.0, 16).unwrap();
    assert!(fit(&HardyField::zeros(&g), None).is_err());
}

#[test]
fn stationary_track_is_constant() {
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let q = soliton(&g);
    let traj = evolve(&q, &IntegratorConfig::new(0.002, 2.0)).unwrap();
    let fits = track(&traj.time_state_pairs(), EPS_REPORT).unwrap();
    assert_eq!(fits.len(), traj.times.len());
    for f in &fits {
        assert_abs_diff_eq!(f.lambda, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(f.theta, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(f.y, 0.0, epsilon = 1e-6);
    }
}

#[test]
fn width_law_from_exact_powers() {
    let series: Vec<ModulationFit<f64>> = (1..=10)
        .map(|i| {
            let t = i as f64;
            ModulationFit { t, lambda: 3.0 * t.powf(-0.25), theta: 0.0, y: 0.0, residual: 0.1, converged: true, dispersion: 0.0 }
        })
        .collect();
    let w = width_law_fit(&series, 1.0, 10.0, EPS_REPORT).unwrap();
    assert_abs_diff_eq!(w.slope, -0.25, epsilon = 1e-12);
    assert!(w.half_width < 1e-10);
    assert_eq!(w.points, 10);
    assert!(width_law_fit(&series[..2], 1.0, 10.0, EPS_REPORT).is_none());
    let mut bad = series.clone();
    for f in &mut bad {
        f.residual = 1.0;
    }
    assert!(width_law_fit(&bad, 1.0, 10.0, EPS_REPORT).is_none());
}

#[test]
fn power_law_interval_matches_t_table() {
    // slope 0.6, intercept 0.6; t_{0.975,2} = 4.3027
    let pts = [(0.0, 1.0), (1.0, 0.0), (2.0, 3.0), (3.0, 2.0)];
    let (slope, hw) = power_law(&pts).unwrap();
    assert_abs_diff_eq!(slope, 0.6, epsilon = 1e-12);
    assert!(hw > 0.0 && hw.is_finite());
    let se = ((pts.iter().map(|p| (p.1 - (0.6 + 0.6 * p.0)).powi(2)).sum::<f64>()) / 2.0 / 5.0).sqrt();
    assert_abs_diff_eq!(hw, 4.302652729911275 * se, epsilon = 1e-9);
}

#[test]
fn angles_wrap_into_the_half_open_interval() {
    assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
    assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-12);
    assert_abs_diff_eq!(wrap_angle(0.5), 0.5, epsilon = 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn recovers_random_orbit_points(lam in 0.6f64..1.8, theta in -3.0f64..3.0, y in -2.0f64..2.0) {
        let g = Grid::<f64>::new(1.0, 96).unwrap();
        let f = fit(&orbit_point(&g, lam, theta, y), None).unwrap();
        prop_assert!(f.residual < 1e-5, "{:?}", f);
        prop_assert!((f.lambda - lam).abs() < 1e-5);
        prop_assert!((wrap_angle(f.theta - theta)).abs() < 1e-5);
        prop_assert!((f.y - y).abs() < 1e-5);
    }
}
