//! Hardy-space discretization in the rational (Malmquist–Takenaka) basis.

pub mod field;
pub mod grid;
pub mod laguerre;
pub mod norms;
pub mod symmetry;

pub use field::{
    analyze, closure_defect, conj_product, derivative, evaluate, plancherel_defect, product,
    project_function, synthesize, szego_project, HardyField, Spectrum,
};
pub use grid::{FrequencyGrid, Grid, SpatialGrid};
pub use norms::{extension_bound, fourier_tail_mass, holomorphic_extension, sobolev_norm, UpperHalfPoint};
pub use symmetry::{apply, apply_symmetry, Symmetry};
