//! International route from the main IXP to the remote datacenter: two
//! terrestrial WDM segments through transit core nodes, then a submarine cable.

use serde::{Deserialize, Serialize};

use crate::catalog::{EquipmentCatalog, GlobalFactors, WdmProfile};
use crate::corenet::{core_node_power, wdm_link_power};
use crate::{check_fraction, check_non_negative, check_positive, ValidationError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LonghaulRoute {
    pub terrestrial_segments_km: Vec<f64>,
    pub transit_core_nodes: u32,
    pub submarine_length_km: f64,
    pub repeater_spacing_km: f64,
    /// W per channel, per cable end.
    pub terminal_power: f64,
    /// W per channel, per repeater.
    pub repeater_power: f64,
    /// Efficiency of the shore power feed to the repeaters.
    pub feed_efficiency: f64,
    /// W per km per channel dissipated in the cable.
    pub cable_loss: f64,
    pub channel_capacity: f64,
    /// Share of the national baseline peak that leaves the country.
    pub baseline_share: f64,
}

impl Default for LonghaulRoute {
    fn default() -> Self {
        Self {
            terrestrial_segments_km: vec![600.0, 900.0],
            transit_core_nodes: 7,
            submarine_length_km: 8000.0,
            repeater_spacing_km: 50.0,
            terminal_power: 35.0,
            repeater_power: 0.2,
            feed_efficiency: 0.8,
            cable_loss: 0.004,
            channel_capacity: 40.0,
            baseline_share: 1.0 / 3.0,
        }
    }
}

impl LonghaulRoute {
    pub fn validate(&self) -> Result<(), ValidationError> {
        for d in &self.terrestrial_segments_km {
            check_positive("route.terrestrial_segments_km", *d)?;
        }
        check_non_negative("route.submarine_length_km", self.submarine_length_km)?;
        check_positive("route.repeater_spacing_km", self.repeater_spacing_km)?;
        check_non_negative("route.terminal_power", self.terminal_power)?;
        check_non_negative("route.repeater_power", self.repeater_power)?;
        check_non_negative("route.cable_loss", self.cable_loss)?;
        check_positive("route.channel_capacity", self.channel_capacity)?;
        check_fraction("route.baseline_share", self.baseline_share)?;
        if !(self.feed_efficiency > 0.0 && self.feed_efficiency <= 1.0) {
            return Err(ValidationError::new(
                "route.feed_efficiency",
                format!("must be in (0, 1], got {}", self.feed_efficiency),
            ));
        }
        Ok(())
    }
}

/// Power of one submarine channel over the whole cable: both terminals, the
/// repeaters through the feed losses, and the line loss.
pub fn submarine_channel_power(route: &LonghaulRoute) -> f64 {
    let length = route.submarine_length_km;
    let repeaters = length / route.repeater_spacing_km;
    2.0 * route.terminal_power + repeaters * route.repeater_power / route.feed_efficiency + route.cable_loss * length
}

/// Peak rate `R_u` of the international link in Gbps.
///
/// The CDN fill and the uncached share of VoD overlap, so only the larger of
/// the two counts; the exported share of the baseline peak adds on top.
pub fn longhaul_peak(
    baseline_global_gbps: f64,
    vod_global_gbps: f64,
    fill_gbps: f64,
    cdn_fraction: f64,
    route: &LonghaulRoute,
    margin: f64,
) -> f64 {
    let vod = fill_gbps.max((1.0 - cdn_fraction) * vod_global_gbps);
    margin * (vod + route.baseline_share * baseline_global_gbps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LonghaulDimensions {
    pub peak_gbps: f64,
    pub transit_modules_per_node: u64,
    pub transit_power_w: f64,
    pub terrestrial_channels: u64,
    pub terrestrial_wdm_power_w: f64,
    pub submarine_channels: u64,
    pub submarine_channel_w: f64,
    pub submarine_power_w: f64,
    pub power_w: f64,
}

impl LonghaulDimensions {
    pub fn submarine_share(&self) -> f64 {
        self.submarine_power_w / self.power_w
    }
}

pub fn dimension_longhaul(
    r_u: f64,
    route: &LonghaulRoute,
    catalog: &EquipmentCatalog,
    wdm: &WdmProfile,
    factors: &GlobalFactors,
) -> LonghaulDimensions {
    let node = core_node_power(r_u, catalog, factors);
    let transit_power_w = route.transit_core_nodes as f64 * node.power_w;
    let links: Vec<_> = route
        .terrestrial_segments_km
        .iter()
        .map(|d| wdm_link_power(r_u, *d, wdm, factors))
        .collect();
    let terrestrial_wdm_power_w = links.iter().map(|l| l.power_w).sum::<f64>();
    let terrestrial_channels = links.first().map_or(0, |l| l.channels);

    let submarine_channels = ((r_u / route.channel_capacity).ceil() as u64).max(1);
    let submarine_channel_w = submarine_channel_power(route);
    let submarine_power_w =
        factors.pue * factors.eta * factors.alpha_u * submarine_channels as f64 * submarine_channel_w;
    LonghaulDimensions {
        peak_gbps: r_u,
        transit_modules_per_node: node.modules,
        transit_power_w,
        terrestrial_channels,
        terrestrial_wdm_power_w,
        submarine_channels,
        submarine_channel_w,
        submarine_power_w,
        power_w: transit_power_w + terrestrial_wdm_power_w + submarine_power_w,
    }
}
