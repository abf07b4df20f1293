#![allow(dead_code)]

use ccm_lab::config::{ExperimentConfig, Tag};

/// A preset shrunk to run in well under a second.
pub fn small(tag: Tag) -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(tag);
    c.grid.scale_length = 1.0;
    c.grid.modes = 64;
    c.data.target_mass = None;
    c.data.smoothing_width_freq = 2.0;
    c.integrator.dt_time = 0.005;
    c.integrator.final_time = 0.2;
    c.integrator.checkpoint_interval_time = 0.1;
    c.integrator.refine_band = 1.0;
    c.integrator.max_refinements = 0;
    c.integrator.energy_tol_per_time = 1e-2;
    c.integrator.mass_tol_per_time = 1e-4;
    c.sobolev_orders = vec![1.0];
    c.scan.amplitudes = vec![0.5, 1.2];
    c.scan.trend_time = 0.1;
    c.suite.samples = 30;
    c.suite.interpolation_orders = vec![0.5];
    c.decay.times_time = vec![1.0, 2.0, 4.0];
    c.decay.probes_length = vec![-2.0, 0.0, 2.0];
    c.decay.window_start_time = 1.0;
    c.decay.window_end_time = 4.0;
    c
}
