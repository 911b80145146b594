//! Single-site CDN at the main IXP: flash servers scaled on served traffic,
//! a fixed storage tier refreshed nightly, and dedicated edge router modules.

use serde::{Deserialize, Serialize};

use crate::catalog::{EquipmentCatalog, GlobalFactors};
use crate::{check_fraction, check_positive, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdnConfig {
    pub storage_servers: u32,
    pub storage_capacity_tb: f64,
    pub daily_update_fraction: f64,
    pub fill_window_hours: f64,
    /// Share of VoD traffic served from the CDN when a scenario does not set its own.
    pub cdn_fraction: f64,
}

impl Default for CdnConfig {
    fn default() -> Self {
        Self {
            storage_servers: 40,
            storage_capacity_tb: 320.0,
            daily_update_fraction: 0.018,
            fill_window_hours: 8.0,
            cdn_fraction: 0.8,
        }
    }
}

impl CdnConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        check_positive("cdn.storage_capacity_tb", self.storage_capacity_tb)?;
        check_fraction("cdn.daily_update_fraction", self.daily_update_fraction)?;
        check_positive("cdn.fill_window_hours", self.fill_window_hours)?;
        check_fraction("cdn.cdn_fraction", self.cdn_fraction)
    }
}

/// Nightly catalog refresh rate in Gbps.
pub fn cdn_fill_rate(config: &CdnConfig) -> f64 {
    let bits = config.storage_servers as f64 * config.storage_capacity_tb * 1e12 * 8.0;
    bits * config.daily_update_fraction / (config.fill_window_hours * 3600.0) / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdnDimensions {
    pub peak_gbps: f64,
    pub flash_servers: u64,
    pub storage_servers: u64,
    pub edge_router_modules: u64,
    pub power_w: f64,
}

impl CdnDimensions {
    pub fn disabled() -> Self {
        Self {
            peak_gbps: 0.0,
            flash_servers: 0,
            storage_servers: 0,
            edge_router_modules: 0,
            power_w: 0.0,
        }
    }
}

/// Size the CDN for the margin-inflated share of the national VoD peak it
/// serves. `None` means the scenario has no VoD service and no CDN at all.
pub fn dimension_cdn(
    vod_global_gbps: Option<f64>,
    cdn_fraction: f64,
    config: &CdnConfig,
    catalog: &EquipmentCatalog,
    factors: &GlobalFactors,
) -> CdnDimensions {
    let Some(vod) = vod_global_gbps else {
        return CdnDimensions::disabled();
    };
    let peak_gbps = factors.alpha_t * cdn_fraction * vod;
    let steps = |capacity: f64| (peak_gbps / capacity).ceil().max(0.0) as u64;
    let flash_servers = steps(catalog.flash_server.capacity_gbps());
    let edge_router_modules = steps(catalog.edge_router_module.capacity_gbps());
    let storage_servers = config.storage_servers as u64;
    let power_w = factors.pue
        * (flash_servers as f64 * catalog.flash_server.static_power
            + storage_servers as f64 * catalog.storage_server.static_power
            + factors.eta * edge_router_modules as f64 * catalog.edge_router_module.static_power);
    CdnDimensions {
        peak_gbps,
        flash_servers,
        storage_servers,
        edge_router_modules,
        power_w,
    }
}
