//! Laplacian spectra, Cheeger-type constants and step-function
//! approximations on measured weighted graphs, with discretized flat circles
//! and tori as reference models.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

// Negated comparisons are how NaN inputs get rejected; the index loops are
// dense linear-algebra kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod concentration;
pub mod constants;
pub mod error;
pub mod graph;
pub mod improved_cheeger;
pub mod isoperimetry;
pub mod linalg;
pub mod model_spaces;
pub mod report;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type MeasuredGraph64 = graph::MeasuredGraph<f64>;
pub type MeasuredGraph32 = graph::MeasuredGraph<f32>;
pub type Edge64 = graph::Edge<f64>;
pub type Edge32 = graph::Edge<f32>;
pub type Spectrum64 = spectra::Spectrum<f64>;
pub type Spectrum32 = spectra::Spectrum<f32>;
pub type ModelSpace64 = model_spaces::ModelSpace<f64>;
pub type ModelSpace32 = model_spaces::ModelSpace<f32>;
pub type TorusSpec64 = model_spaces::TorusSpec<f64>;
pub type ImprovedCheegerCertificate64 = improved_cheeger::ImprovedCheegerCertificate<f64>;
