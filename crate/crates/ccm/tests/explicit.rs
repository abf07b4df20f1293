use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ccm::error::CcmError;
use ccm::evolution::{evolve, IntegratorConfig};
use ccm::explicit::{
    decay_profile, explicit_state, explicit_value, explicit_values, i_plus, l1_norm, resolvent_identity_check,
    resolvent_solve, XOperator,
};
use ccm::hardy::{extension_bound, Grid, HardyField, UpperHalfPoint};
use ccm::states::{random_field, soliton};
use ccm::C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pt(x: f64, y: f64) -> UpperHalfPoint<f64> {
    UpperHalfPoint::new(x, y).unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn soliton_value_at_i() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    for t in [0.0, 1.0, 10.0] {
        let v = explicit_value(t, pt(0.0, 1.0), &q).unwrap();
        assert_abs_diff_eq!(v.value.re, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(v.value.im, -0.70711, epsilon = 1e-5);
        assert!(v.residual < 1e-12);
    }
    let v = explicit_value(0.0, pt(1.0, 1.0), &q).unwrap().value;
    let want = C::new(2f64.sqrt(), 0.0) / C::new(1.0, 2.0);
    assert_abs_diff_eq!((v - want).norm(), 0.0, epsilon = 1e-10);
}

#[test]
fn free_resolvent_matches_closed_form() {
    // (i∂_ξ − z)ĝ = Q̂ has the solution ĝ = −Q̂/(z + i)
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let q = soliton(&g);
    let z = pt(0.3, 0.8);
    let sys = resolvent_solve(0.0, z, &q).unwrap();
    let want = q.scaled(-C::new(1.0, 0.0) / (z.z() + C::new(0.0, 1.0)));
    assert!(sys.solution.distance(&want).unwrap() < 1e-13);
    assert!(sys.decays());
}

#[test]
fn boundary_functional_of_soliton() {
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let ip = i_plus(&soliton(&g));
    assert_abs_diff_eq!(ip.value.re, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(ip.value.im, -2.0 * 2f64.sqrt() * PI, epsilon = 1e-12);
    assert!(!ip.near_singular, "{ip:?}");
    assert!(ip.discrepancy < 1e-6);
}

#[test]
fn x_is_multiplication_by_x_on_decaying_expansions() {
    // f = φ₀ − φ₁ + 2φ₃ − 2φ₄ has coefficient sum zero, so xf ∈ L²
    let g = Grid::<f64>::new(1.5, 8).unwrap();
    let mut a = vec![C::new(0.0, 0.0); 8];
    a[0] = C::new(1.0, 0.0);
    a[1] = C::new(-1.0, 0.0);
    a[3] = C::new(2.0, 0.5);
    a[4] = C::new(-2.0, -0.5);
    let f = HardyField::new(g.clone(), a).unwrap();
    let op = XOperator::new(&g);
    let xf = op.apply(&f);
    let via_matrix: Vec<C<f64>> = (0..8)
        .map(|m| (0..8).fold(C::new(0.0, 0.0), |s, n| s + op.matrix[(m, n)] * f.coefficients()[n]))
        .collect();
    for (p, q) in xf.coefficients().iter().zip(&via_matrix) {
        assert!((p - q).norm() < 1e-14);
    }
    for x in [-3.0, -0.2, 0.7, 5.0] {
        let z = C::new(x, 0.0);
        assert!((xf.value_at(z) - f.value_at(z) * x).norm() < 1e-12);
    }
}

#[test]
fn x_is_dissipative() {
    let g = Grid::<f64>::new(0.7, 24).unwrap();
    let f = random_field(&g, &mut ChaCha8Rng::seed_from_u64(3), 4);
    let xf = XOperator::new(&g).apply(&f);
    assert!(f.inner(&xf).im <= 1e-12);
}

#[test]
fn state_at_time_zero_is_the_data() {
    let g = Grid::<f64>::new(1.0, 48).unwrap();
    let u0 = random_field(&g, &mut ChaCha8Rng::seed_from_u64(11), 3);
    let u = explicit_state(0.0, &u0).unwrap();
    assert!(u.distance(&u0).unwrap() < 1e-10 * u0.norm());
}

#[test]
fn soliton_state_is_stationary() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    for t in [1.0, 5.0] {
        let u = explicit_state(t, &q).unwrap();
        assert!(u.distance(&q).unwrap() < 1e-8, "t = {t}");
    }
}

#[test]
fn explicit_state_matches_time_stepping() {
    // both sides converge in K; the gap is 1.8e-2, 1.0e-4, 9.6e-6 at K = 48, 96, 192
    let g = Grid::<f64>::new(1.0, 192).unwrap();
    let u0 = HardyField::rational(&g, C::new(0.8, 0.3), C::new(0.5, -1.5))
        .unwrap()
        .axpy(C::new(1.0, 0.0), &HardyField::rational(&g, C::new(0.4, 0.0), C::new(-1.0, -2.0)).unwrap())
        .unwrap();
    let mut cfg = IntegratorConfig::new(0.002, 0.5);
    cfg.max_refinements = 0;
    let traj = evolve(&u0, &cfg).unwrap();
    let stepped = traj.final_state();
    let exact = explicit_state(0.5, &u0).unwrap();
    let d = exact.resized(stepped.grid()).unwrap().distance(stepped).unwrap();
    assert!(d < 2e-5, "distance {d}");
    for z in [pt(0.0, 1.0), pt(1.0, 0.5)] {
        let v = explicit_value(0.5, z, &u0).unwrap().value;
        assert!((v - stepped.value_at(z.z())).norm() < 2e-5);
    }
}

#[test]
fn resolvent_identity_holds() {
    let g = Grid::<f64>::new(1.0, 48).unwrap();
    let u0 = random_field(&g, &mut ChaCha8Rng::seed_from_u64(5), 3);
    for (t, z) in [(0.5, pt(0.0, 1.0)), (2.0, pt(-1.0, 0.3))] {
        assert!(resolvent_identity_check(t, z, &u0).unwrap() <= 1e-6);
    }
}

#[test]
fn values_respect_the_mass_bound() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let u0 = random_field(&g, &mut ChaCha8Rng::seed_from_u64(9), 2);
    let pts = [pt(0.0, 2.0), pt(3.0, 4.0), pt(-2.0, 8.0)];
    let vals = explicit_values(3.0, &pts, &u0).unwrap();
    for (p, v) in pts.iter().zip(&vals) {
        assert!(v.value.norm() <= extension_bound(&u0, *p) * (1.0 + 1e-6));
        assert!(v.condition_bound.is_finite());
    }
}

#[test]
fn rejects_real_points_and_zero_times() {
    let g = Grid::<f64>::new(1.0, 16).unwrap();
    let q = soliton(&g);
    assert!(matches!(UpperHalfPoint::new(0.0, 0.0), Err(CcmError::NotUpper(_))));
    assert!(matches!(UpperHalfPoint::new(1.0, -1.0), Err(CcmError::NotUpper(_))));
    assert!(matches!(resolvent_solve(0.0, pt(0.0, 1e-14), &q), Err(CcmError::IllConditioned { .. })));
    assert!(decay_profile(&q, &[0.0], &[1.0], &[0.0]).is_err());
    assert!(decay_profile(&q, &[1.0], &[0.0], &[0.0]).is_err());
}

#[test]
fn soliton_does_not_decay() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    let p = decay_profile(&q, &[1.0, 2.0, 4.0, 8.0], &[1.0], &[-1.0, 0.0, 1.0]).unwrap();
    let (_, slope, _) = p.fits[0];
    assert!(slope.abs() < 1e-6, "slope {slope}");
    // ∫ √2/|x+i| diverges logarithmically; the quadrature value is finite and large
    assert!(p.l1_norm > 10.0);
    assert!(l1_norm(&q).unwrap().is_finite());
}
