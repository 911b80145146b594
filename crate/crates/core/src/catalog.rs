//! Equipment power and capacity reference data, and the global dimensioning
//! factors applied on top of it.

use serde::{Deserialize, Serialize};

use crate::peakstats::ConfidenceLevel;
use crate::ValidationError;

/// Static power of one element and, for traffic-carrying elements, its capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerProfile {
    /// Watts.
    pub static_power: f64,
    /// Gbps. Absent for elements that are not scaled on traffic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
}

impl PowerProfile {
    pub const fn new(static_power: f64, capacity: f64) -> Self {
        Self {
            static_power,
            capacity: Some(capacity),
        }
    }

    pub const fn fixed(static_power: f64) -> Self {
        Self {
            static_power,
            capacity: None,
        }
    }

    /// Capacity in Gbps; 0 for uncapped elements.
    pub fn capacity_gbps(&self) -> f64 {
        self.capacity.unwrap_or(0.0)
    }

    fn validate(&self, field: &str, needs_capacity: bool) -> Result<(), ValidationError> {
        if !(self.static_power.is_finite() && self.static_power > 0.0) {
            return Err(ValidationError::new(
                format!("{field}.static_power"),
                format!("must be > 0, got {}", self.static_power),
            ));
        }
        match self.capacity {
            Some(c) if !(c.is_finite() && c > 0.0) => Err(ValidationError::new(
                format!("{field}.capacity"),
                format!("must be > 0, got {c}"),
            )),
            None if needs_capacity => Err(ValidationError::new(
                format!("{field}.capacity"),
                "is required for this element",
            )),
            _ => Ok(()),
        }
    }
}

/// One profile per element kind of the modelled network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquipmentCatalog {
    pub onu: PowerProfile,
    pub gpon_port: PowerProfile,
    pub ge_port: PowerProfile,
    pub ethernet_switch_module: PowerProfile,
    pub bng_module: PowerProfile,
    pub edge_router_module: PowerProfile,
    pub core_router_module: PowerProfile,
    pub flash_server: PowerProfile,
    pub storage_server: PowerProfile,
}

impl Default for EquipmentCatalog {
    fn default() -> Self {
        Self {
            onu: PowerProfile::fixed(2.5),
            gpon_port: PowerProfile::new(15.0, 2.5),
            ge_port: PowerProfile::new(30.0, 10.0),
            ethernet_switch_module: PowerProfile::new(60.0, 40.0),
            bng_module: PowerProfile::new(75.0, 40.0),
            edge_router_module: PowerProfile::new(120.0, 40.0),
            core_router_module: PowerProfile::new(1400.0, 560.0),
            flash_server: PowerProfile::new(320.0, 190.0),
            storage_server: PowerProfile::fixed(400.0),
        }
    }
}

impl EquipmentCatalog {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.onu.validate("catalog.onu", false)?;
        self.gpon_port.validate("catalog.gpon_port", true)?;
        self.ge_port.validate("catalog.ge_port", true)?;
        self.ethernet_switch_module
            .validate("catalog.ethernet_switch_module", true)?;
        self.bng_module.validate("catalog.bng_module", true)?;
        self.edge_router_module
            .validate("catalog.edge_router_module", true)?;
        self.core_router_module
            .validate("catalog.core_router_module", true)?;
        self.flash_server.validate("catalog.flash_server", true)?;
        self.storage_server.validate("catalog.storage_server", false)
    }

    /// The three module kinds stacked in every edge node.
    pub fn edge_modules(&self) -> [PowerProfile; 3] {
        [
            self.ethernet_switch_module,
            self.bng_module,
            self.edge_router_module,
        ]
    }
}

/// Terrestrial WDM transport: terminal multiplexers at both ends, in-line
/// amplifiers at a fixed spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WdmProfile {
    /// W per channel for each of the two terminals.
    pub terminal_power: f64,
    /// W per channel per amplifier.
    pub amplifier_power: f64,
    pub amplifier_spacing_km: f64,
    pub channel_capacity: f64,
}

impl Default for WdmProfile {
    fn default() -> Self {
        Self {
            terminal_power: 4.6,
            amplifier_power: 3.5,
            amplifier_spacing_km: 100.0,
            channel_capacity: 40.0,
        }
    }
}

impl WdmProfile {
    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("wdm.terminal_power", self.terminal_power),
            ("wdm.amplifier_power", self.amplifier_power),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ValidationError::new(name, format!("must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("wdm.amplifier_spacing_km", self.amplifier_spacing_km),
            ("wdm.channel_capacity", self.channel_capacity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ValidationError::new(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalFactors {
    pub pue: f64,
    /// Redundancy multiplier.
    pub eta: f64,
    /// Terrestrial growth margin.
    pub alpha_t: f64,
    /// Submarine growth margin.
    pub alpha_u: f64,
    pub epsilon: ConfidenceLevel,
}

impl Default for GlobalFactors {
    fn default() -> Self {
        Self {
            pue: 1.8,
            eta: 2.0,
            alpha_t: 1.5,
            alpha_u: 2.0,
            epsilon: ConfidenceLevel::DEFAULT,
        }
    }
}

impl GlobalFactors {
    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("factors.pue", self.pue),
            ("factors.eta", self.eta),
            ("factors.alpha_t", self.alpha_t),
            ("factors.alpha_u", self.alpha_u),
        ] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(ValidationError::new(name, format!("must be >= 1, got {v}")));
            }
        }
        Ok(())
    }
}

/// Power intensity (W/Gbps) of equipment characterised `years` before the
/// reference year, improved by a yearly efficiency gain `gamma`.
pub fn efficiency_scaled_intensity(p0: f64, c0: f64, years: u32, gamma: f64) -> f64 {
    p0 / c0 * (1.0 - gamma).powi(years as i32)
}

/// Rescale an old profile to the reference year, keeping its capacity.
pub fn rescale_profile(old: PowerProfile, years: u32, gamma: f64) -> PowerProfile {
    match old.capacity {
        Some(c) => PowerProfile::new(efficiency_scaled_intensity(old.static_power, c, years, gamma) * c, c),
        None => PowerProfile::fixed(old.static_power * (1.0 - gamma).powi(years as i32)),
    }
}
