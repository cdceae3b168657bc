//! Forecast-encompassing evaluation for quarterly macro forecasts.
//!
//! The crate builds lagged-value benchmark forecasts (expanding-window AR
//! equations, singly or summed over the components of an aggregation
//! identity), converts external growth-rate forecast paths to levels, and
//! tests whether each forecast source carries independent information by
//! regressing the actual `s`-quarter change on both forecast changes with
//! heteroskedasticity- and autocorrelation-robust standard errors.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` or `f32`); the
//! `*64` aliases below are what most callers want.

pub mod ar;
pub mod components;
pub mod convert;
pub mod error;
pub mod io;
mod linalg;
pub mod panel;
pub mod quarter;
pub mod regress;
pub mod rolling;
mod scalar;
pub mod series;

pub use error::{Error, ErrorKind};
pub use panel::{ForecastPanel, PanelForm};
pub use quarter::{Quarter, QuarterRange};
pub use regress::{CovMethod, EncompassResult};
pub use scalar::Scalar;
pub use series::Series;

/// Relative singular-value ratio below which a design matrix is treated as
/// rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Double-precision aliases for the main containers.
pub type Series64 = series::Series<f64>;
pub type ForecastPanel64 = panel::ForecastPanel<f64>;
pub type EncompassResult64 = regress::EncompassResult<f64>;

/// Single-precision aliases.
pub type Series32 = series::Series<f32>;
pub type ForecastPanel32 = panel::ForecastPanel<f32>;
