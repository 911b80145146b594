//! Bottom-up network power model scaled to peak usage.
//!
//! A simplified national infrastructure (GPON fibre access, an edge/core
//! router tree, an international longhaul route and a single CDN site) is
//! dimensioned for the peak demand of a usage scenario. Equipment counts are
//! turned into static power, then into annual energy, and compared against a
//! sober baseline scenario.
//!
//! ```
//! use netpeak::{config::RunConfig, Model};
//!
//! let config = RunConfig::defaults();
//! let model: Model = config.model.clone();
//! let baseline = model.evaluate(config.scenario("baseline").unwrap()).unwrap();
//! assert!((baseline.segments.onu.energy_gwh - 667.0).abs() < 1.0);
//! ```

pub mod access;
pub mod catalog;
pub mod cdn;
pub mod config;
pub mod corenet;
pub mod longhaul;
pub mod peakstats;
pub mod report;
pub mod scenario;
pub mod server;

use thiserror::Error;

pub use access::{AccessError, Territory};
pub use peakstats::{ConfidenceLevel, HouseholdDistribution, PeakStatsError, QuantileApprox};
pub use scenario::{DemandCurve, EnergyReport, Model, Scenario};

/// Hours in a (non-leap) year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Annual energy in GWh of a constant load in watts.
pub fn annual_gwh(power_w: f64) -> f64 {
    power_w * HOURS_PER_YEAR / 1e9
}

/// Peak rate, in Mbps, offered by a pool of `pool` subscribers.
pub trait PeakRate {
    fn peak_mbps(&self, pool: u64) -> f64;

    fn peak_gbps(&self, pool: u64) -> f64 {
        self.peak_mbps(pool) / 1000.0
    }
}

impl<F: Fn(u64) -> f64> PeakRate for F {
    fn peak_mbps(&self, pool: u64) -> f64 {
        self(pool)
    }
}

/// A parameter outside its domain, named by its dotted path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{field}: {message}")]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Prefix the field path, e.g. with the scenario it belongs to.
    pub fn within(mut self, parent: &str) -> Self {
        self.field = format!("{parent}.{}", self.field);
        self
    }
}

pub(crate) fn check_fraction(field: &str, value: f64) -> Result<(), ValidationError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ValidationError::new(field, format!("must be a fraction in [0, 1], got {value}")))
    }
}

pub(crate) fn check_non_negative(field: &str, value: f64) -> Result<(), ValidationError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(field, format!("must be >= 0, got {value}")))
    }
}

pub(crate) fn check_positive(field: &str, value: f64) -> Result<(), ValidationError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ValidationError::new(field, format!("must be > 0, got {value}")))
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter {0}")]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    PeakStats(#[from] PeakStatsError),
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error("unknown sweep parameter `{name}`; expected one of: {}", expected.join(", "))]
    UnknownParameter {
        name: String,
        expected: Vec<&'static str>,
    },
}
