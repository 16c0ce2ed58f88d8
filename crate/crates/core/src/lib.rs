//! Confidence intervals for the turning-point location of a series modeled as
//! a deterministic trend plus i.i.d. exponential noise.
//!
//! The central routine is [`exactdist::location_distribution`], which returns
//! the exact law of `argmin_t (T_t + E_t)` for any trend. [`estimate`] plugs
//! a running-minimum trend estimate into it, and [`simulate`] measures how the
//! resulting intervals cover a known minimum.

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod exactdist;
pub mod io;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
pub use estimate::{estimate_minimum_location, Bandwidth};
pub use exactdist::location_distribution;
pub use model::{
    ConfidenceInterval, EstimationReport, IndexWindow, LocationDistribution, NoiseModel, TimeSeries,
    TrendSequence,
};
