//! Numerical laboratory for the focusing continuum Calogero–Moser equation
//!
//! ```text
//! i u_t + u_xx − 2i u Π⁺∂ₓ(|u|²) = 0
//! ```
//!
//! posed on the Hardy space L²₊(ℝ). States are expanded in the rational basis
//! φ_n(x) = √(σ/π)·((x−iσ)/(x+iσ))ⁿ/(x+iσ), which is orthonormal in L²₊ and
//! contains the soliton Q(x) = √2/(x+i) exactly when σ = 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conserved;
pub mod error;
pub mod evolution;
pub mod explicit;
pub mod hardy;
pub mod lax;
pub mod modulation;
pub mod scalar;
pub mod simplex;
pub mod states;

pub use error::{CcmError, Result};
pub use scalar::{Real, C};

pub type Grid = hardy::Grid<f64>;
pub type Field = hardy::HardyField<f64>;
pub type LaxMatrix = lax::LaxMatrix<f64>;
pub type SpectralReport = lax::SpectralReport<f64>;
pub type ConservedReport = conserved::ConservedReport<f64>;
pub type InitialDataSpec = states::InitialDataSpec<f64>;
pub type Trajectory = evolution::Trajectory<f64>;
pub type IntegratorConfig = evolution::IntegratorConfig<f64>;
pub type ModulationFit = modulation::ModulationFit<f64>;
