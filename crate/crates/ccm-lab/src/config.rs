//! Experiment configuration in TOML. Keys carry their units: `_length` for
//! spatial lengths, `_freq` for frequencies, `_time` for times, `_rad` for
//! angles; bare keys are dimensionless.

use std::f64::consts::PI;
use std::path::Path;

use ccm::evolution::{IntegratorConfig, Scheme};
use ccm::hardy::Symmetry;
use ccm::states::InitialDataSpec;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Tag {
    Turbulence,
    ThresholdScan,
    DispersiveDecay,
    Isospectrality,
    PropertySuite,
}

impl Tag {
    pub const ALL: [Tag; 5] =
        [Tag::Turbulence, Tag::ThresholdScan, Tag::DispersiveDecay, Tag::Isospectrality, Tag::PropertySuite];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Turbulence => "turbulence",
            Tag::ThresholdScan => "threshold_scan",
            Tag::DispersiveDecay => "dispersive_decay",
            Tag::Isospectrality => "isospectrality",
            Tag::PropertySuite => "property_suite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// basis scale σ
    pub scale_length: f64,
    pub modes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub amplitude: f64,
    pub smoothing_width_freq: f64,
    /// overrides the amplitude when present
    pub target_mass: Option<f64>,
    pub scale: f64,
    pub phase_rad: f64,
    pub shift_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt_time: f64,
    pub final_time: f64,
    pub checkpoint_interval_time: f64,
    pub mass_tol_per_time: f64,
    pub energy_tol_per_time: f64,
    pub max_dt_halvings: usize,
    pub max_refinements: usize,
    pub max_modes: usize,
    pub refine_band: f64,
    pub sup_ceiling: Option<f64>,
    pub h1_ceiling: Option<f64>,
    pub hierarchy_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub amplitudes: Vec<f64>,
    /// length of the short run giving the Ḣ¹ trend
    pub trend_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    pub times_time: Vec<f64>,
    pub heights_length: Vec<f64>,
    pub probes_length: Vec<f64>,
    /// fit window for the log-log slope
    pub window_start_time: f64,
    pub window_end_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub samples: usize,
    pub poles: usize,
    pub interpolation_orders: Vec<f64>,
    /// relative slack before an inequality counts as violated
    pub violation_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// modulation fits with a larger H¹ residual are not used in fits
    pub eps_report: f64,
    /// fraction of the trusted horizon skipped as transient in growth fits
    pub transient_fraction: f64,
    /// lowest Lax eigenvalues tracked
    pub tracked_eigenvalues: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub experiment: Tag,
    pub seed: u64,
    pub output_dir: String,
    pub sobolev_orders: Vec<f64>,
    pub grid: GridSection,
    pub data: DataSection,
    pub integrator: IntegratorSection,
    pub analysis: AnalysisSection,
    pub scan: ScanSection,
    pub decay: DecaySection,
    pub suite: SuiteSection,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn preset(tag: Tag) -> Self {
        let eps = 0.05;
        let mut c = ExperimentConfig {
            format_version: FORMAT_VERSION,
            experiment: tag,
            seed: 20240601,
            output_dir: format!("runs/{}", tag.name()),
            sobolev_orders: vec![1.0],
            grid: GridSection { scale_length: 32.0, modes: 512 },
            data: DataSection {
                amplitude: 1.0,
                smoothing_width_freq: eps / 12.0,
                target_mass: Some(2.0 * PI + eps),
                scale: 1.0,
                phase_rad: 0.0,
                shift_length: 0.0,
            },
            integrator: IntegratorSection {
                dt_time: 0.004,
                final_time: 100.0,
                checkpoint_interval_time: 5.0,
                mass_tol_per_time: 1e-6,
                energy_tol_per_time: 1e-4,
                max_dt_halvings: 4,
                max_refinements: 1,
                max_modes: 2048,
                refine_band: 1e-6,
                sup_ceiling: None,
                h1_ceiling: None,
                hierarchy_depth: 2,
            },
            analysis: AnalysisSection { eps_report: 0.5, transient_fraction: 0.25, tracked_eigenvalues: 1 },
            scan: ScanSection { amplitudes: vec![0.5, 0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2, 1.5, 2.0], trend_time: 2.0 },
            decay: DecaySection {
                times_time: vec![5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 40.0, 60.0, 80.0],
                heights_length: vec![1.0, 0.5],
                probes_length: (0..=64).map(|j| -80.0 + 2.5 * j as f64).collect(),
                window_start_time: 5.0,
                window_end_time: 80.0,
            },
            suite: SuiteSection {
                samples: 500,
                poles: 3,
                interpolation_orders: vec![0.25, 0.5, 0.75],
                violation_tol: 1e-6,
            },
        };
        match tag {
            Tag::Turbulence => {
                c.sobolev_orders = vec![0.5, 1.0, 2.0];
            }
            Tag::Isospectrality => {
                c.integrator.final_time = 2.5;
                c.integrator.checkpoint_interval_time = 0.5;
                c.analysis.tracked_eigenvalues = 2;
            }
            Tag::ThresholdScan => {
                c.data.target_mass = None;
                c.integrator.max_refinements = 0;
            }
            Tag::DispersiveDecay => {
                c.data.amplitude = 0.5;
                c.data.target_mass = None;
                c.data.smoothing_width_freq = 0.0125;
                c.integrator.final_time = 5.0;
                c.integrator.checkpoint_interval_time = 0.5;
            }
            Tag::PropertySuite => {
                c.grid = GridSection { scale_length: 1.0, modes: 64 };
                c.data.target_mass = None;
                c.data.smoothing_width_freq = 0.0125;
                c.integrator.final_time = 1.0;
                c.integrator.checkpoint_interval_time = 0.1;
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(LabError::Config(format!("{what} must be positive and finite")));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if self.format_version != FORMAT_VERSION {
            return Err(LabError::Config(format!(
                "config format version {} is not {FORMAT_VERSION}",
                self.format_version
            )));
        }
        if !pos(self.grid.scale_length) {
            return bad("grid.scale_length");
        }
        if self.grid.modes < 4 {
            return Err(LabError::Config("grid.modes must be at least 4".into()));
        }
        for (x, name) in [
            (self.data.amplitude, "data.amplitude"),
            (self.data.smoothing_width_freq, "data.smoothing_width_freq"),
            (self.data.scale, "data.scale"),
            (self.integrator.dt_time, "integrator.dt_time"),
            (self.integrator.checkpoint_interval_time, "integrator.checkpoint_interval_time"),
            (self.integrator.mass_tol_per_time, "integrator.mass_tol_per_time"),
            (self.integrator.energy_tol_per_time, "integrator.energy_tol_per_time"),
            (self.integrator.refine_band, "integrator.refine_band"),
            (self.analysis.eps_report, "analysis.eps_report"),
            (self.scan.trend_time, "scan.trend_time"),
            (self.suite.violation_tol, "suite.violation_tol"),
        ] {
            if !pos(x) {
                return bad(name);
            }
        }
        for (x, name) in [
            (self.data.target_mass, "data.target_mass"),
            (self.integrator.sup_ceiling, "integrator.sup_ceiling"),
            (self.integrator.h1_ceiling, "integrator.h1_ceiling"),
        ] {
            if let Some(x) = x {
                if !pos(x) {
                    return bad(name);
                }
            }
        }
        if !(self.integrator.final_time >= 0.0 && self.integrator.final_time.is_finite()) {
            return Err(LabError::Config("integrator.final_time must be nonnegative".into()));
        }
        if !(0.0..1.0).contains(&self.analysis.transient_fraction) {
            return Err(LabError::Config("analysis.transient_fraction must lie in [0, 1)".into()));
        }
        if self.sobolev_orders.iter().chain(&self.suite.interpolation_orders).any(|s| !(*s >= 0.0)) {
            return Err(LabError::Config("Sobolev orders must be nonnegative".into()));
        }
        if self.scan.amplitudes.iter().any(|a| !pos(*a)) {
            return bad("scan.amplitudes");
        }
        if self.decay.times_time.iter().any(|t| *t == 0.0 || !t.is_finite()) {
            return Err(LabError::Config("decay.times_time must be nonzero".into()));
        }
        if self.decay.heights_length.iter().any(|h| !pos(*h)) {
            return bad("decay.heights_length");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| LabError::io(path, e))
    }

    pub fn initial_data_spec(&self) -> InitialDataSpec<f64> {
        let d = &self.data;
        let mut spec = InitialDataSpec::new(d.amplitude, d.smoothing_width_freq).with_label(self.experiment.name());
        spec.target_mass = d.target_mass;
        spec.symmetry = Symmetry { lambda: d.scale, theta: d.phase_rad, y: d.shift_length };
        spec
    }

    pub fn integrator(&self) -> IntegratorConfig<f64> {
        let s = &self.integrator;
        let mut c = IntegratorConfig::new(s.dt_time, s.final_time);
        c.scheme = Scheme::IntegratingFactorRk4;
        c.checkpoint_interval = s.checkpoint_interval_time;
        c.mass_tol = s.mass_tol_per_time;
        c.energy_tol = s.energy_tol_per_time;
        c.max_dt_halvings = s.max_dt_halvings;
        c.max_refinements = s.max_refinements;
        c.max_modes = s.max_modes;
        c.refine_band = s.refine_band;
        c.sup_ceiling = s.sup_ceiling;
        c.h1_ceiling = s.h1_ceiling;
        c.norm_orders = self.sobolev_orders.clone();
        c.hierarchy_depth = s.hierarchy_depth;
        c
    }
}
