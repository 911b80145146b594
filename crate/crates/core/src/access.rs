//! GPON fibre-to-the-home access network: ONU splits per GPON port, OLTs in
//! the operator hubs, and the 10GE uplinks that connect them to the edge.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{EquipmentCatalog, GlobalFactors};
use crate::peakstats::HouseholdDistribution;
use crate::{check_positive, PeakRate, ValidationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AccessError {
    #[error(
        "infeasible: GPON port capacity ({capacity_gbps} Gbps) is reached by a single \
         subscriber (alpha_t * R(1) = {single_subscriber_gbps} Gbps)"
    )]
    Infeasible {
        single_subscriber_gbps: f64,
        capacity_gbps: f64,
    },
    #[error("demand curve decreases over the GPON search bracket: R(1) = {at_one} > R({max}) = {at_max} Mbps")]
    NonMonotone { at_one: f64, max: u32, at_max: f64 },
}

/// Homes and operator hubs of the modelled territory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Territory {
    pub inhabitants: u64,
    pub homes: u64,
    pub hubs: u64,
    pub household_distribution: HouseholdDistribution,
}

impl Default for Territory {
    fn default() -> Self {
        Self {
            inhabitants: 65_000_000,
            homes: 30_450_000,
            hubs: 3000,
            household_distribution: HouseholdDistribution::default(),
        }
    }
}

impl Territory {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.homes == 0 {
            return Err(ValidationError::new("territory.homes", "must be > 0"));
        }
        if self.hubs == 0 {
            return Err(ValidationError::new("territory.hubs", "must be >= 1"));
        }
        let implied = self.homes as f64 * self.household_distribution.mean();
        if (self.inhabitants as f64 - implied).abs() > 0.05 * implied {
            return Err(ValidationError::new(
                "territory.inhabitants",
                format!(
                    "{} is not within 5% of homes x mean household size ({implied:.0})",
                    self.inhabitants
                ),
            ));
        }
        Ok(())
    }
}

/// Physical limits of the OLT shelves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OltLayout {
    pub max_subscribers_per_gpon: u32,
    pub ports_per_card: u32,
    pub cards_per_olt: u32,
    /// Extra GPON cards per hub for partially filled shelves.
    pub spare_cards_per_hub: u32,
}

impl Default for OltLayout {
    fn default() -> Self {
        Self {
            max_subscribers_per_gpon: 128,
            ports_per_card: 16,
            cards_per_olt: 16,
            spare_cards_per_hub: 1,
        }
    }
}

impl OltLayout {
    pub fn validate(&self) -> Result<(), ValidationError> {
        for (name, v) in [
            ("access.max_subscribers_per_gpon", self.max_subscribers_per_gpon),
            ("access.ports_per_card", self.ports_per_card),
            ("access.cards_per_olt", self.cards_per_olt),
        ] {
            check_positive(name, v as f64)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessDimensions {
    pub subscribers_per_gpon: u32,
    pub gpon_ports: u64,
    pub olts: u64,
    pub subscribers_per_olt: u64,
    /// Uplink peak of one OLT, growth margin included.
    pub olt_peak_gbps: f64,
    pub ge_ports: u64,
    pub power_w: f64,
}

/// Largest split `n <= max_split` whose margin-inflated peak stays strictly
/// below the GPON port capacity, found by binary search.
pub fn max_subscribers_per_gpon(
    demand: &impl PeakRate,
    factors: &GlobalFactors,
    c_gpon: f64,
    max_split: u32,
) -> Result<u32, AccessError> {
    let fits = |n: u32| factors.alpha_t * demand.peak_gbps(n as u64) < c_gpon;

    let at_one = demand.peak_mbps(1);
    let at_max = demand.peak_mbps(max_split as u64);
    if at_max < at_one {
        return Err(AccessError::NonMonotone {
            at_one,
            max: max_split,
            at_max,
        });
    }
    if !fits(1) {
        return Err(AccessError::Infeasible {
            single_subscriber_gbps: factors.alpha_t * at_one / 1000.0,
            capacity_gbps: c_gpon,
        });
    }
    if fits(max_split) {
        return Ok(max_split);
    }
    // fits(lo) && !fits(hi)
    let (mut lo, mut hi) = (1, max_split);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn ceil_u64(x: f64) -> u64 {
    x.ceil().max(0.0) as u64
}

pub fn dimension_access(
    territory: &Territory,
    layout: &OltLayout,
    demand: &impl PeakRate,
    catalog: &EquipmentCatalog,
    factors: &GlobalFactors,
) -> Result<AccessDimensions, AccessError> {
    let split = max_subscribers_per_gpon(
        demand,
        factors,
        catalog.gpon_port.capacity_gbps(),
        layout.max_subscribers_per_gpon,
    )?;
    let homes = territory.homes as f64;
    let spare_ports = (territory.hubs * (layout.ports_per_card * layout.spare_cards_per_hub) as u64) as f64;
    let gpon_ports = ceil_u64(homes / split as f64 + spare_ports);
    let ports_per_olt = (layout.ports_per_card * layout.cards_per_olt) as u64;
    let olts = territory.hubs.max(gpon_ports.div_ceil(ports_per_olt));
    let subscribers_per_olt = territory.homes.div_ceil(olts);
    let olt_peak_gbps = factors.alpha_t * demand.peak_gbps(subscribers_per_olt);
    let uplinks_per_olt = ceil_u64(olt_peak_gbps / catalog.ge_port.capacity_gbps()).max(1);
    let ge_ports = ceil_u64(factors.eta * (olts * uplinks_per_olt) as f64);
    let power_w = factors.pue
        * (gpon_ports as f64 * catalog.gpon_port.static_power
            + ge_ports as f64 * catalog.ge_port.static_power);
    Ok(AccessDimensions {
        subscribers_per_gpon: split,
        gpon_ports,
        olts,
        subscribers_per_olt,
        olt_peak_gbps,
        ge_ports,
        power_w,
    })
}
