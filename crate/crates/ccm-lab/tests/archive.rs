mod common;

use ccm::hardy::Grid;
use ccm::states::soliton;
use ccm_lab::archive::{RunArchive, RunVerdict};
use ccm_lab::config::Tag;
use ccm_lab::plots::emit_plots;

#[test]
fn archive_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::small(Tag::Turbulence);
    let mut a = RunArchive::create(dir.path(), &cfg).unwrap();
    let q = soliton(&Grid::new(1.0, 8).unwrap());
    a.write_checkpoints(0, &[(0.0, q.clone()), (0.5, q.clone())]).unwrap();
    a.write_checkpoints(2, &[(1.0, q.clone())]).unwrap();
    a.summary.set("x", 0.1 + 0.2);
    a.summary.limit("stopped");
    a.write_summary().unwrap();

    let b = RunArchive::open(dir.path()).unwrap();
    assert_eq!(b.config, cfg);
    assert_eq!(b.summary, a.summary);
    assert_eq!(b.summary.verdict, RunVerdict::Limited);
    assert_eq!(b.summary.get("x").unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    let ts: Vec<f64> = b.checkpoints().unwrap().iter().map(|c| c.t).collect();
    assert_eq!(ts, [0.0, 0.5, 1.0]);
    assert_eq!(b.last_checkpoint().unwrap().unwrap().field.coefficients(), q.coefficients());
}

#[test]
fn missing_archive_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(RunArchive::open(&dir.path().join("nope")).is_err());
}

#[test]
fn empty_archive_gives_header_only_plots() {
    let dir = tempfile::tempdir().unwrap();
    let a = RunArchive::create(dir.path(), &common::small(Tag::Turbulence)).unwrap();
    assert!(a.last_checkpoint().unwrap().is_none());
    emit_plots(&a).unwrap();
    let read = |n: &str| std::fs::read_to_string(dir.path().join("plots").join(n)).unwrap();
    assert_eq!(read("growth.csv"), "t,Hs_norm,s,fitted_slope\n");
    assert_eq!(read("decay.csv"), "t,h,sup_u,envelope\n");
    assert_eq!(read("fits.csv"), "t,λ,θ,y,r,converged\n");
    assert_eq!(read("eigen.csv"), "t,index,eigenvalue\n");
}
