use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ccm::conserved::{energy, hierarchy, mass, momentum, momentum_parts, quartic, report};
use ccm::hardy::{apply, Grid, HardyField, Symmetry};
use ccm::states::{random_field, soliton};
use ccm::C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q64() -> ccm::Field {
    soliton(&Grid::new(1.0, 64).unwrap())
}

#[test]
fn mass_examples() {
    let q = q64();
    assert_abs_diff_eq!(mass(&q), 2.0 * PI, epsilon = 1e-12);
    assert_eq!(mass(&HardyField::zeros(q.grid())), 0.0);
    assert_abs_diff_eq!(mass(&q.scaled(C::new(1.1, 0.0))), 7.6027, epsilon = 1e-4);
}

#[test]
fn soliton_momentum_parts() {
    let q = q64();
    let (p, im) = momentum_parts(&q);
    // ⟨Q, −iQ_x⟩ = π and ½∫|Q|⁴ = π
    assert_abs_diff_eq!(quartic(&q), 2.0 * PI, epsilon = 1e-12);
    assert_abs_diff_eq!(p + 0.5 * quartic(&q), PI, epsilon = 1e-12);
    assert_abs_diff_eq!(p, 0.0, epsilon = 1e-8);
    assert_abs_diff_eq!(im, 0.0, epsilon = 1e-12);
    for th in [0.3, 2.0, -1.0] {
        assert_abs_diff_eq!(momentum(&q.scaled(C::from_polar(1.0, th))), 0.0, epsilon = 1e-8);
    }
    // ⟨2Q, −i∂ₓ2Q⟩ − ½∫|2Q|⁴ = 4π − 16π
    assert_abs_diff_eq!(momentum(&q.scaled(C::new(2.0, 0.0))), -12.0 * PI, epsilon = 1e-10);
}

#[test]
fn soliton_orbit_has_zero_energy() {
    let q = q64();
    assert_abs_diff_eq!(energy(&q), 0.0, epsilon = 1e-8);
    assert_eq!(energy(&HardyField::zeros(q.grid())), 0.0);
    let g = Grid::<f64>::new(1.0, 128).unwrap();
    for (l, th, y) in [(1.5, 0.3, 0.2), (0.7, -2.0, -0.5), (1.0, 1.0, 1.0)] {
        // e^{iθ}λ^{1/2}Q(λx+y) in closed form
        let c = C::from_polar(2f64.sqrt() / f64::sqrt(l), th);
        let u = HardyField::rational(&g, c, C::new(-y / l, -1.0 / l)).unwrap();
        assert_abs_diff_eq!(energy(&u), 0.0, epsilon = 1e-8);
    }
}

#[test]
fn hierarchy_examples() {
    let q = q64();
    let h = hierarchy(&q, 4).unwrap();
    assert_abs_diff_eq!(h[0], 2.0 * PI, epsilon = 1e-6);
    for v in &h[1..] {
        assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-6);
    }
    assert!(hierarchy(&HardyField::zeros(q.grid()), 8).unwrap().iter().all(|v| *v == 0.0));
    let h = hierarchy(&q.scaled(C::new(1.1, 0.0)), 2).unwrap();
    // π(1.21 − 1.4641)
    assert_abs_diff_eq!(h[1], PI * (1.21 - 1.4641), epsilon = 1e-10);
    assert!(h[1] < 0.0);
    assert!(hierarchy(&q, 9).is_err());
}

#[test]
fn report_flags() {
    let q = q64();
    let r = report(&q, 0.5, 3).unwrap();
    assert_eq!(r.hierarchy.len(), 4);
    assert!(r.resolved && r.consistent);
    assert_eq!(r.t, 0.5);
    // a field living in the top modes is not resolved
    let top = HardyField::basis(q.grid(), 63).unwrap();
    assert!(!report(&top, 0.0, 2).unwrap().resolved);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hierarchy_matches_direct_formulas(seed in any::<u64>()) {
        let g = Grid::<f64>::new(1.0, 64).unwrap();
        let u = random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 3);
        let h = hierarchy(&u, 2).unwrap();
        let m = mass(&u);
        prop_assert!((h[0] - m).abs() <= 1e-10 * m);
        let scale = m * m.max(1.0);
        prop_assert!((h[1] - momentum(&u)).abs() <= 1e-8 * scale);
        prop_assert!((h[2] - 2.0 * energy(&u)).abs() <= 1e-8 * scale * m.max(1.0));
        prop_assert!(energy(&u) >= 0.0);
        prop_assert!(report(&u, 0.0, 2).unwrap().consistent);
    }

    #[test]
    fn hierarchy_scales_with_lambda(seed in any::<u64>(), l in 0.7f64..1.4, th in -3f64..3.0, y in -0.5f64..0.5) {
        let g = Grid::<f64>::new(1.0, 160).unwrap();
        let u = random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), 2);
        let v = apply(&u, &Symmetry::new(l, th, y).unwrap()).unwrap();
        let hu = hierarchy(&u, 4).unwrap();
        let hv = hierarchy(&v, 4).unwrap();
        for k in 0..=4 {
            let want = l.powi(k as i32) * hu[k];
            let scale = hu[0].max(1.0).powi(k as i32 + 1) * l.max(1.0).powi(k as i32);
            prop_assert!((hv[k] - want).abs() <= 1e-6 * want.abs().max(scale * 1e-3), "k={} {} {}", k, hv[k], want);
        }
    }
}
