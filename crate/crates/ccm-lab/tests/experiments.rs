mod common;

use std::f64::consts::PI;

use ccm_lab::archive::RunArchive;
use ccm_lab::config::{ExperimentConfig, Tag};
use ccm_lab::experiments::{self, loglog_slope, property_suite, tail_constant, ENERGY_CONSTANT};

#[test]
fn tail_constant_is_scale_free() {
    let want = 2.0 * PI * (-2.0f64).exp();
    for lambda in [0.01, 0.3, 1.0, 7.0, 250.0] {
        assert!((tail_constant(lambda) - want).abs() < 1e-12, "{lambda}");
    }
}

#[test]
fn loglog_slope_of_a_power() {
    let pts: Vec<(f64, f64)> = (1..20).map(|k| (k as f64, 3.0 * (k as f64).powf(-0.75))).collect();
    let (s, hw) = loglog_slope(&pts, 2.0, 15.0).unwrap();
    assert!((s + 0.75).abs() < 1e-12);
    assert!(hw < 1e-10);
    assert!(loglog_slope(&pts, 2.0, 3.0).is_none());
}

#[test]
fn frozen_energy_constant_covers_the_suite() {
    let mut c = ExperimentConfig::preset(Tag::PropertySuite);
    c.suite.samples = 100;
    c.suite.interpolation_orders = vec![0.5];
    let r = property_suite(&c).unwrap();
    assert!(r.energy_constant_fit <= ENERGY_CONSTANT);
    assert!(r.energy_constant_fit > 0.5 * ENERGY_CONSTANT);
    assert_eq!(r.violations(), 0);
    assert!(r.equality_margin <= 1e-6);
    assert!(r.mass_bound.worst_margin <= 0.0);
    assert!(r.resolvent_identity_worst < 1e-10);
}

#[test]
fn suite_is_reproducible_from_the_seed() {
    let c = common::small(Tag::PropertySuite);
    assert_eq!(property_suite(&c).unwrap(), property_suite(&c).unwrap());
}

#[test]
fn resumed_run_matches_uninterrupted_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = common::small(Tag::Turbulence);
    c.integrator.final_time = 0.4;
    let mut whole = RunArchive::create(&dir.path().join("whole"), &c).unwrap();
    let full = experiments::simulate(&c, &mut whole, None).unwrap();

    let mut half = c.clone();
    half.integrator.final_time = 0.2;
    let mut part = RunArchive::create(&dir.path().join("part"), &half).unwrap();
    experiments::simulate(&half, &mut part, None).unwrap();
    let start = part.last_checkpoint().unwrap();
    assert_eq!(start.as_ref().unwrap().t, 0.2);
    let rest = experiments::simulate(&c, &mut part, start).unwrap();
    assert_eq!(rest.horizon(), 0.4);
    let a = full.traj.final_state();
    let b = rest.traj.final_state();
    assert!(a.distance(b).unwrap() < 1e-14);
    assert_eq!(part.checkpoints().unwrap().len(), 5);
}

#[test]
fn small_experiments_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let t = experiments::run_threshold_scan(&common::small(Tag::ThresholdScan), &dir.path().join("scan")).unwrap();
    assert!(t.path("threshold.csv").exists());
    assert_eq!(t.summary.get("count_bound_violations"), Some(0.0));

    let mut c = common::small(Tag::Turbulence);
    c.integrator.final_time = 0.4;
    let a = experiments::run_turbulence(&c, &dir.path().join("turb")).unwrap();
    for f in ["fits.csv", "tail.csv", "eigen.csv", "conserved.csv"] {
        assert!(a.path(f).exists(), "{f}");
    }
    assert!(a.summary.get("tail_constant_max_error").unwrap() < 1e-12);
    assert!(a.summary.get("max_fit_residual").is_some());
}
