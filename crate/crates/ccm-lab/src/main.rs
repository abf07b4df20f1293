use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ccm::explicit::{decay_profile, explicit_state};
use ccm::modulation::track;
use ccm_lab::archive::{RunArchive, RunVerdict};
use ccm_lab::config::{ExperimentConfig, Tag};
use ccm_lab::error::{LabError, Result};
use ccm_lab::experiments::{self, cross_validate, spectrum_rows};
use ccm_lab::plots::emit_plots;
use ccm_lab::tables::{self, DecayProfileRow, FitRow};

#[derive(Parser)]
#[command(name = "ccm-lab", version, about = "Run and analyze calogero-moser derivative NLS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config; defaults to the preset of the chosen experiment
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory; defaults to the config's output_dir
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// existing run archive to continue or analyze
    #[arg(long, global = true)]
    resume: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// evolve the configured data, writing checkpoints and conserved quantities
    Simulate,
    /// lowest Lax eigenvalues of the initial data or of every checkpoint
    Spectrum,
    /// explicit-formula states, decay profile and the stepper cross-check
    Explicit,
    /// modulation fits of every checkpoint in an archive
    Modulate,
    /// one of the packaged experiments
    Experiment {
        #[arg(value_enum)]
        tag: Tag,
    },
}

fn load_config(cli: &Cli, fallback: Tag) -> Result<ExperimentConfig> {
    match &cli.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::preset(fallback)),
    }
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir))
}

fn resumed(path: &Path) -> Result<RunArchive> {
    let a = RunArchive::open(path)?;
    if a.checkpoint_paths()?.is_empty() {
        return Err(LabError::Archive(format!("{} holds no checkpoints", path.display())));
    }
    Ok(a)
}

fn simulate(cli: &Cli) -> Result<RunArchive> {
    if let Some(path) = &cli.resume {
        let mut archive = resumed(path)?;
        if let Some(p) = &cli.config {
            // only the horizon may change on resume
            let c = ExperimentConfig::load(p)?;
            archive.config.integrator.final_time = c.integrator.final_time;
            archive.config.save(&archive.path("config.toml"))?;
        }
        let start = archive.last_checkpoint()?;
        archive.summary.notes.clear();
        archive.summary.verdict = RunVerdict::Complete;
        let cfg = archive.config.clone();
        experiments::simulate(&cfg, &mut archive, start)?;
        archive.write_summary()?;
        return Ok(archive);
    }
    let cfg = load_config(cli, Tag::Turbulence)?;
    cfg.validate()?;
    let mut archive = RunArchive::create(&out_dir(cli, &cfg), &cfg)?;
    experiments::simulate(&cfg, &mut archive, None)?;
    archive.write_summary()?;
    Ok(archive)
}

fn spectrum(cli: &Cli) -> Result<RunArchive> {
    let (mut archive, states) = match &cli.resume {
        Some(path) => {
            let a = resumed(path)?;
            let s = a.checkpoints()?.into_iter().map(|c| (c.t, c.field)).collect();
            (a, s)
        }
        None => {
            let cfg = load_config(cli, Tag::Isospectrality)?;
            cfg.validate()?;
            let u0 = experiments::initial_state(&cfg)?;
            let a = RunArchive::create(&out_dir(cli, &cfg), &cfg)?;
            a.write_checkpoints(0, &[(0.0, u0.clone())])?;
            (a, vec![(0.0, u0)])
        }
    };
    let k = archive.config.analysis.tracked_eigenvalues.max(1);
    let rows = spectrum_rows(&states, k);
    tables::write(&archive.path("eigen.csv"), &rows)?;
    let tol = ccm::lax::default_tol_neg(states[0].1.grid());
    let count = ccm::lax::eigenvalue_count_check(&states[0].1, tol)?;
    let sm = &mut archive.summary;
    sm.set("lowest_eigenvalue_initial", count.lowest);
    sm.set("bound_states_initial", count.strict as f64);
    sm.set("tol_neg", tol);
    archive.write_summary()?;
    Ok(archive)
}

fn explicit(cli: &Cli) -> Result<RunArchive> {
    let cfg = load_config(cli, Tag::DispersiveDecay)?;
    cfg.validate()?;
    let mut archive = RunArchive::create(&out_dir(cli, &cfg), &cfg)?;
    let u0 = experiments::initial_state(&cfg)?;
    let d = &cfg.decay;
    let prof = decay_profile(&u0, &d.times_time, &d.heights_length, &d.probes_length)?;
    let rows: Vec<DecayProfileRow> = prof
        .rows
        .iter()
        .map(|r| DecayProfileRow { t: r.t, h: r.h, sup_u: r.sup, envelope: r.envelope, fitted_c: r.fitted_c })
        .collect();
    tables::write(&archive.path("decay_profile.csv"), &rows)?;
    let mut states = vec![(0.0, u0.clone())];
    for &t in &d.times_time {
        states.push((t, explicit_state(t, &u0)?));
    }
    archive.write_checkpoints(0, &states)?;
    let cross = cross_validate(&u0, &cfg, &[-2.0, 0.0, 2.0])?;
    archive.summary.set("l1_norm", prof.l1_norm);
    archive.summary.set("cross_check_worst_relative", cross.worst_relative);
    archive.write_summary()?;
    Ok(archive)
}

fn modulate(cli: &Cli) -> Result<RunArchive> {
    let path = cli
        .resume
        .as_ref()
        .ok_or_else(|| LabError::Config("modulate needs --resume ARCHIVE".into()))?;
    let mut archive = resumed(path)?;
    let states: Vec<(f64, ccm::Field)> = archive.checkpoints()?.into_iter().map(|c| (c.t, c.field)).collect();
    let fits = track(&states, archive.config.analysis.eps_report)?;
    let rows: Vec<FitRow> = fits
        .iter()
        .map(|f| FitRow { t: f.t, lambda: f.lambda, theta: f.theta, y: f.y, r: f.residual, converged: f.converged })
        .collect();
    tables::write(&archive.path("fits.csv"), &rows)?;
    let worst = fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    archive.summary.set("max_fit_residual", worst);
    archive.write_summary()?;
    Ok(archive)
}

fn experiment(cli: &Cli, tag: Tag) -> Result<RunArchive> {
    let cfg = load_config(cli, tag)?;
    if cfg.experiment != tag {
        return Err(LabError::Config(format!(
            "config is for experiment {}, not {}",
            cfg.experiment.name(),
            tag.name()
        )));
    }
    experiments::run(tag, &cfg, &out_dir(cli, &cfg))
}

fn main() -> ExitCode {
    // clap's own usage errors would exit 2, which is reserved for limited runs
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate => simulate(&cli),
        Command::Spectrum => spectrum(&cli),
        Command::Explicit => explicit(&cli),
        Command::Modulate => modulate(&cli),
        Command::Experiment { tag } => experiment(&cli, tag),
    }
    .and_then(|a| emit_plots(&a).map(|_| a));
    match result {
        Ok(a) => {
            println!("{}", a.root.display());
            for (k, v) in &a.summary.metrics {
                println!("  {k} = {v}");
            }
            for n in &a.summary.notes {
                println!("  note: {n}");
            }
            match a.summary.verdict {
                RunVerdict::Complete => ExitCode::SUCCESS,
                RunVerdict::Limited => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
