//! Plot-ready tables under `<archive>/plots/`, rebuilt from what the archive
//! holds. Missing inputs give header-only files.

use std::path::Path;

use ccm::modulation::track;

use crate::archive::RunArchive;
use crate::error::{LabError, Result};
use crate::experiments::loglog_slope;
use crate::tables::{self, DecayRow, EigenRow, FitRow, GrowthRow};

pub fn emit_plots(archive: &RunArchive) -> Result<()> {
    let dir = archive.path("plots");
    std::fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
    let cfg = &archive.config;
    let states: Vec<(f64, ccm::Field)> = archive.checkpoints()?.into_iter().map(|c| (c.t, c.field)).collect();

    let mut growth = Vec::new();
    if let Some(horizon) = states.last().map(|s| s.0) {
        let from = cfg.analysis.transient_fraction * horizon;
        for &s in &cfg.sobolev_orders {
            let series: Vec<(f64, f64)> = states
                .iter()
                .map(|(t, u)| Ok((*t, ccm::hardy::sobolev_norm(u, s, true)?)))
                .collect::<ccm::Result<_>>()?;
            let slope = loglog_slope(&series, from, horizon).map_or(f64::NAN, |p| p.0);
            growth.extend(series.iter().map(|(t, v)| GrowthRow { t: *t, hs_norm: *v, s, fitted_slope: slope }));
        }
    }
    tables::write(&dir.join("growth.csv"), &growth)?;

    let fits_src = archive.path("fits.csv");
    if fits_src.exists() {
        copy(&fits_src, &dir.join("fits.csv"))?;
    } else {
        let fits = if states.is_empty() { Vec::new() } else { track(&states, cfg.analysis.eps_report)? };
        let rows: Vec<FitRow> = fits
            .iter()
            .map(|f| FitRow { t: f.t, lambda: f.lambda, theta: f.theta, y: f.y, r: f.residual, converged: f.converged })
            .collect();
        tables::write(&dir.join("fits.csv"), &rows)?;
    }

    let mut decay = Vec::new();
    let prof = archive.path("decay_profile.csv");
    if prof.exists() {
        let (_, rows) = tables::read_numeric(&prof)?;
        decay = rows.iter().map(|r| DecayRow { t: r[0], h: r[1], sup_u: r[2], envelope: r[3] }).collect();
    }
    tables::write(&dir.join("decay.csv"), &decay)?;

    let eigen = archive.path("eigen.csv");
    if eigen.exists() {
        copy(&eigen, &dir.join("eigen.csv"))?;
    } else {
        tables::write::<EigenRow>(&dir.join("eigen.csv"), &[])?;
    }
    Ok(())
}

fn copy(from: &Path, to: &Path) -> Result<()> {
    std::fs::copy(from, to).map(|_| ()).map_err(|e| LabError::io(from, e))
}
