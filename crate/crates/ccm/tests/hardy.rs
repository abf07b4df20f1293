use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use ccm::hardy::{
    analyze, apply, apply_symmetry, closure_defect, extension_bound, fourier_tail_mass, holomorphic_extension,
    plancherel_defect, project_function, sobolev_norm, synthesize, szego_project, Grid, HardyField, Spectrum, Symmetry,
    UpperHalfPoint,
};
use ccm::states::{random_field, soliton};
use ccm::{CcmError, C};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q_at(z: C<f64>) -> C<f64> {
    C::new(2f64.sqrt(), 0.0) / (z + C::new(0.0, 1.0))
}

#[test]
fn soliton_samples_match_closed_form() {
    for sigma in [1.0, 2.5, 8.0] {
        let g = Grid::<f64>::new(sigma, 96).unwrap();
        let q = soliton(&g);
        let s = synthesize(&q);
        // exact for σ = 1; geometric truncation otherwise
        let tol = if sigma == 1.0 { 1e-14 } else { 1e-6 };
        for (x, v) in g.spatial().points.iter().zip(&s) {
            assert!((v - q_at(C::new(*x, 0.0))).norm() < tol, "σ={sigma} x={x}");
        }
    }
}

#[test]
fn analyze_of_sampled_soliton_matches_coefficients() {
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let samples: Vec<_> = g.spatial().points.iter().map(|&x| q_at(C::new(x, 0.0))).collect();
    let spec = analyze(&samples, &g).unwrap();
    let q = soliton(&g);
    assert_abs_diff_eq!(spec.get(0).re, q.coefficients()[0].re, epsilon = 1e-13);
    assert_abs_diff_eq!(spec.get(0).re, (2.0 * PI).sqrt(), epsilon = 1e-13);
    assert!(spec.negative_band() < 1e-26);
    for n in 1..32 {
        assert!(spec.get(n).norm() < 1e-13);
    }
}

#[test]
fn analyze_rejects_wrong_length() {
    let g = Grid::<f64>::new(1.0, 16).unwrap();
    let err = analyze(&[C::new(0.0, 0.0); 5], &g).unwrap_err();
    assert_eq!(err, CcmError::Length { expected: g.samples(), got: 5 });
}

#[test]
fn basis_functions_are_orthonormal_under_analysis() {
    let g = Grid::<f64>::new(1.7, 24).unwrap();
    for n in [0, 1, 7, 23] {
        let f = HardyField::basis(&g, n).unwrap();
        let spec = analyze(&synthesize(&f), &g).unwrap();
        for m in -(g.samples() as i64 / 2)..(g.samples() as i64 / 2) {
            let want = if m == n as i64 { 1.0 } else { 0.0 };
            assert!((spec.get(m) - C::new(want, 0.0)).norm() < 1e-13, "n={n} m={m}");
        }
    }
}

#[test]
fn szego_projection_of_conjugate_soliton_vanishes() {
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let p = project_function(&g, |x| q_at(C::new(x, 0.0)).conj());
    assert!(p.norm() < 1e-13);
}

#[test]
fn szego_projection_of_twice_real_part_is_soliton() {
    // 2 Re Q = Q + Q̄ and Π⁺Q̄ = 0
    let g = Grid::<f64>::new(1.0, 32).unwrap();
    let p = project_function(&g, |x| C::new(2.0 * q_at(C::new(x, 0.0)).re, 0.0));
    assert!(p.distance(&soliton(&g)).unwrap() < 1e-13);
}

#[test]
fn projector_is_idempotent_bitwise() {
    let g = Grid::<f64>::new(1.3, 40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_field(&g, &mut rng, 4);
    let samples: Vec<_> = synthesize(&u).iter().zip(g.spatial().points.iter()).map(|(v, x)| v + x.cos()).collect();
    let once = szego_project(&analyze(&samples, &g).unwrap());
    let twice = szego_project(&Spectrum::from_field(&once));
    assert_eq!(once.coefficients(), twice.coefficients());
    // through samples the round trip is exact to rounding
    let again = szego_project(&analyze(&synthesize(&once), &g).unwrap());
    assert!(again.distance(&once).unwrap() < 1e-13 * once.norm());
}

#[test]
fn soliton_norms_match_quadrature_oracles() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    assert_abs_diff_eq!(sobolev_norm(&q, 0.0, false).unwrap(), (2.0 * PI).sqrt(), epsilon = 1e-12);
    // ∫ ξ·4πe^{−2ξ} = π
    assert_abs_diff_eq!(sobolev_norm(&q, 0.5, true).unwrap().powi(2), PI, epsilon = 1e-12);
    // ∫ ξ²·4πe^{−2ξ} = π
    assert_abs_diff_eq!(sobolev_norm(&q, 1.0, true).unwrap().powi(2), PI, epsilon = 1e-12);
    // ∫ ξ^{3/2}·4πe^{−2ξ} = 4πΓ(5/2)/2^{5/2}
    let gamma = 0.75 * PI.sqrt();
    let want = 4.0 * PI * gamma / 2f64.powf(2.5);
    assert_abs_diff_eq!(sobolev_norm(&q, 0.75, true).unwrap().powi(2), want, epsilon = 1e-10);
    // inhomogeneous H¹: 2π + π
    assert_abs_diff_eq!(sobolev_norm(&q, 1.0, false).unwrap().powi(2), 3.0 * PI, epsilon = 1e-12);
}

#[test]
fn sobolev_norm_rejects_negative_index() {
    let g = Grid::<f64>::new(1.0, 8).unwrap();
    assert!(matches!(sobolev_norm(&soliton(&g), -0.5, true), Err(CcmError::Param(_))));
}

#[test]
fn zero_field_has_zero_norms() {
    let g = Grid::<f64>::new(1.0, 16).unwrap();
    let z = HardyField::zeros(&g);
    for s in [0.0, 0.3, 0.5, 1.0, 2.0] {
        assert_eq!(sobolev_norm(&z, s, false).unwrap(), 0.0);
    }
}

#[test]
fn inhomogeneous_norm_is_monotone_in_s() {
    let g = Grid::<f64>::new(1.0, 48).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_field(&g, &mut rng, 3);
    let mut prev = 0.0;
    for s in [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        let n = sobolev_norm(&u, s, false).unwrap();
        assert!(n >= prev * (1.0 - 1e-12), "s={s}");
        prev = n;
    }
}

#[test]
fn soliton_tail_mass() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    assert_abs_diff_eq!(fourier_tail_mass(&q, 0.0).unwrap(), 2.0 * PI, epsilon = 1e-12);
    assert_abs_diff_eq!(fourier_tail_mass(&q, 1.0).unwrap(), 2.0 * PI * (-2f64).exp(), epsilon = 1e-10);
    assert_abs_diff_eq!(fourier_tail_mass(&q, 1.0).unwrap(), 0.85035, epsilon = 2e-5);
    assert_eq!(fourier_tail_mass(&q, 1e6).unwrap(), 0.0);
}

#[test]
#[allow(clippy::approx_constant)]
fn soliton_extension_values() {
    let g = Grid::<f64>::new(1.0, 16).unwrap();
    let q = soliton(&g);
    let v = holomorphic_extension(&q, UpperHalfPoint::new(0.0, 1.0).unwrap());
    assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(v.im, -0.70711, epsilon = 1e-5);
    let v = holomorphic_extension(&q, UpperHalfPoint::new(1.0, 1.0).unwrap());
    assert_abs_diff_eq!(v.re, 0.28284, epsilon = 1e-5);
    assert_abs_diff_eq!(v.im, -0.56569, epsilon = 1e-5);
    let far = holomorphic_extension(&q, UpperHalfPoint::new(0.0, 1e8).unwrap());
    assert!(far.norm() < 1e-7);
}

#[test]
fn upper_half_point_rejects_real_axis() {
    assert!(matches!(UpperHalfPoint::new(1.0, 0.0), Err(CcmError::NotUpper(_))));
    assert!(UpperHalfPoint::new(1.0, -2.0).is_err());
}

#[test]
fn symmetry_identity_and_mass() {
    let g = Grid::<f64>::new(1.0, 64).unwrap();
    let q = soliton(&g);
    let id = apply_symmetry(&q, 1.0, 0.0, 0.0).unwrap();
    assert!(id.distance(&q).unwrap() < 1e-13);
    let wide = Grid::<f64>::new(2.0, 64).unwrap();
    let q2 = apply_symmetry(&soliton(&wide), 2.0, 0.0, 0.0).unwrap();
    assert_abs_diff_eq!(q2.mass(), 2.0 * PI, epsilon = 1e-10);
    assert!(apply_symmetry(&q, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn symmetry_inverse_round_trip() {
    let g = Grid::<f64>::new(1.0, 128).unwrap();
    let q = soliton(&g);
    let s = Symmetry::new(1.5, 0.7, 0.4).unwrap();
    let there = apply(&q, &s).unwrap();
    let back = apply(&there, &s.inverse()).unwrap();
    assert!(back.distance(&q).unwrap() < 1e-8);
}

#[test]
fn symmetry_matches_closed_form_on_soliton() {
    // e^{iθ}λ^{1/2}Q(λx+y) = e^{iθ}λ^{-1/2}√2/(x + (y+i)/λ)
    let g = Grid::<f64>::new(1.0, 160).unwrap();
    let (l, th, y) = (1.3, -0.4, 0.5);
    let got = apply_symmetry(&soliton(&g), l, th, y).unwrap();
    let c = C::from_polar(2f64.sqrt() / l.sqrt(), th);
    let want = HardyField::rational(&g, c, C::new(-y / l, -1.0 / l)).unwrap();
    assert!(got.distance(&want).unwrap() < 1e-10);
}

#[test]
fn field_construction_validates() {
    let g = Grid::<f64>::new(1.0, 8).unwrap();
    assert!(HardyField::new(g.clone(), vec![C::new(0.0, 0.0); 7]).is_err());
    assert!(HardyField::basis(&g, 8).is_err());
    assert!(HardyField::rational(&g, C::new(1.0, 0.0), C::new(0.0, 1.0)).is_err());
    assert!(Grid::<f64>::new(0.0, 8).is_err());
    assert!(Grid::<f64>::with_samples(1.0, 8, 7).is_err());
    let other = Grid::<f64>::new(2.0, 8).unwrap();
    assert_eq!(
        HardyField::zeros(&g).sub(&HardyField::zeros(&other)).unwrap_err(),
        CcmError::GridMismatch
    );
}

#[test]
fn frequency_nodes_are_scaled_laguerre_nodes() {
    let g = Grid::<f64>::new(1.0, 12).unwrap();
    let f = g.frequencies();
    assert!(f.nodes.windows(2).all(|w| w[1] > w[0]));
    assert!(f.nodes[0] > 0.0);
    // Σ W_k = ∫ e^{−2σξ}·2σ… Christoffel weights integrate ℓ_0² exactly
    let l0: f64 = f.nodes.iter().zip(&f.weights).map(|(x, w)| w * 2.0 * (-2.0 * x).exp()).sum();
    assert_abs_diff_eq!(l0, 1.0, epsilon = 1e-12);
}

#[test]
fn nodal_values_sample_the_fourier_transform() {
    let g = Grid::<f64>::new(1.0, 24).unwrap();
    let q = soliton(&g);
    let nv = q.nodal_values();
    for (xi, v) in g.frequencies().nodes.iter().zip(&nv) {
        let want = q.fourier_value(*xi);
        assert!((v - want).norm() < 1e-10 * (1.0 + want.norm()), "ξ={xi}");
    }
    // Q̂(ξ) = −2√π i e^{−ξ}
    let v = q.fourier_value(0.3);
    assert_abs_diff_eq!(v.im, -2.0 * PI.sqrt() * (-0.3f64).exp(), epsilon = 1e-12);
}

#[test]
fn single_precision_soliton() {
    let g = Grid::<f32>::new(1.0, 32).unwrap();
    let q = soliton(&g);
    assert!((q.mass() - 2.0 * std::f32::consts::PI).abs() < 1e-4);
    assert!(plancherel_defect(&q) < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_and_plancherel(seed in any::<u64>(), sigma in 0.3f64..5.0, modes in 4usize..120) {
        let g = Grid::<f64>::new(sigma, modes).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&g, &mut rng, 3);
        let back = szego_project(&analyze(&synthesize(&u), &g).unwrap());
        prop_assert!(back.distance(&u).unwrap() <= 1e-12 * u.norm());
        prop_assert!(plancherel_defect(&u) <= 1e-12);
        prop_assert!(closure_defect(&u) <= 1e-24);
    }

    #[test]
    fn extension_bound_holds(seed in any::<u64>(), x in -20f64..20.0, y in 0.1f64..10.0) {
        let g = Grid::<f64>::new(1.0, 48).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&g, &mut rng, 3);
        let z = UpperHalfPoint::new(x, y).unwrap();
        prop_assert!(holomorphic_extension(&u, z).norm() <= 1.05 * extension_bound(&u, z));
    }

    #[test]
    fn symmetry_group_law(l1 in 0.5f64..2.0, t1 in -3f64..3.0, y1 in -1f64..1.0,
                          l2 in 0.5f64..2.0, t2 in -3f64..3.0, y2 in -1f64..1.0) {
        let g = Grid::<f64>::new(1.0, 256).unwrap();
        let q = soliton(&g);
        let a = Symmetry::new(l1, t1, y1).unwrap();
        let b = Symmetry::new(l2, t2, y2).unwrap();
        let seq = apply(&apply(&q, &a).unwrap(), &b).unwrap();
        let once = apply(&q, &a.then(&b)).unwrap();
        prop_assert!(seq.distance(&once).unwrap() < 1e-6);
    }

    #[test]
    fn symmetry_preserves_mass(seed in any::<u64>(), l in 0.125f64..8.0, t in -3f64..3.0, y in -2f64..2.0) {
        let g = Grid::<f64>::new(1.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&g, &mut rng, 2);
        let s = Symmetry::new(l, t, y).unwrap();
        // evaluate on a grid matched to the transformed scale
        let wide = Grid::<f64>::new(1.0 / l, 512).unwrap();
        let w = ccm::hardy::project_function(&wide, |x| s.eval(&u, C::new(x, 0.0)));
        prop_assert!((w.mass() - u.mass()).abs() <= 1e-10 * u.mass());
    }
}
