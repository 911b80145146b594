//! National edge and core router tree with WDM links between levels.
//!
//! Level 0 is the main IXP. Each core node has `branching` children down to
//! the last core level, whose nodes each feed `edge_fanout` edge nodes. A node
//! or link that exists in the topology always holds at least one module or
//! channel, so even an idle network draws power.

use serde::{Deserialize, Serialize};

use crate::catalog::{EquipmentCatalog, GlobalFactors, WdmProfile};
use crate::{check_positive, PeakRate, ValidationError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoreTreeTopology {
    pub branching: u32,
    pub core_levels: u32,
    pub edge_fanout: u32,
    /// Average link length between level `l - 1` and `l`, for `l = 1 ..= core_levels`.
    pub distances_km: Vec<f64>,
}

impl Default for CoreTreeTopology {
    fn default() -> Self {
        Self {
            branching: 8,
            core_levels: 3,
            edge_fanout: 8,
            distances_km: vec![300.0, 300.0, 100.0],
        }
    }
}

impl CoreTreeTopology {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.branching < 2 {
            return Err(ValidationError::new("topology.branching", "must be >= 2"));
        }
        if self.core_levels == 0 {
            return Err(ValidationError::new("topology.core_levels", "must be >= 1"));
        }
        if self.edge_fanout == 0 {
            return Err(ValidationError::new("topology.edge_fanout", "must be >= 1"));
        }
        if self.distances_km.len() != self.core_levels as usize {
            return Err(ValidationError::new(
                "topology.distances_km",
                format!(
                    "needs one distance per core level ({}), got {}",
                    self.core_levels,
                    self.distances_km.len()
                ),
            ));
        }
        for d in &self.distances_km {
            check_positive("topology.distances_km", *d)?;
        }
        Ok(())
    }

    /// Nodes at each level `0 ..= core_levels`, the last entry being the edge.
    /// With `literal_2l` every count (and pool divisor) is `2^l` instead.
    pub fn node_counts(&self, literal_2l: bool) -> Vec<u64> {
        let levels = self.core_levels;
        (0..=levels)
            .map(|l| {
                if literal_2l {
                    2u64.pow(l)
                } else if l < levels {
                    (self.branching as u64).pow(l)
                } else {
                    (self.branching as u64).pow(levels - 1) * self.edge_fanout as u64
                }
            })
            .collect()
    }
}

fn modules(r: f64, capacity: f64) -> u64 {
    ((r / capacity).ceil() as u64).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreNodePower {
    pub modules: u64,
    pub power_w: f64,
}

pub fn core_node_power(r: f64, catalog: &EquipmentCatalog, factors: &GlobalFactors) -> CoreNodePower {
    let m = &catalog.core_router_module;
    let modules = modules(r, m.capacity_gbps());
    CoreNodePower {
        modules,
        power_w: factors.pue * factors.eta * modules as f64 * m.static_power,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeNodePower {
    pub ethernet_modules: u64,
    pub bng_modules: u64,
    pub edge_router_modules: u64,
    pub power_w: f64,
}

pub fn edge_node_power(r: f64, catalog: &EquipmentCatalog, factors: &GlobalFactors) -> EdgeNodePower {
    let [eth, bng, erm] = catalog.edge_modules().map(|m| (modules(r, m.capacity_gbps()), m.static_power));
    let sum = [eth, bng, erm].iter().map(|(n, p)| *n as f64 * p).sum::<f64>();
    EdgeNodePower {
        ethernet_modules: eth.0,
        bng_modules: bng.0,
        edge_router_modules: erm.0,
        power_w: factors.pue * factors.eta * sum,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WdmLinkPower {
    pub channels: u64,
    pub amplifiers: u64,
    pub power_w: f64,
}

/// One WDM link of `dist` km sized for `r` Gbps. Terminal power sits in
/// facilities (PUE applies), in-line amplifiers do not.
pub fn wdm_link_power(r: f64, dist: f64, wdm: &WdmProfile, factors: &GlobalFactors) -> WdmLinkPower {
    let channels = modules(r, wdm.channel_capacity);
    let amplifiers = (dist / wdm.amplifier_spacing_km - 1.0).ceil().max(0.0) as u64;
    let per_channel = factors.pue * 2.0 * wdm.terminal_power + amplifiers as f64 * wdm.amplifier_power;
    WdmLinkPower {
        channels,
        amplifiers,
        power_w: factors.eta * channels as f64 * per_channel,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreLevel {
    pub level: u32,
    pub nodes: u64,
    pub subscribers_per_node: u64,
    pub peak_gbps: f64,
    pub modules_per_node: u64,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLevel {
    pub nodes: u64,
    pub subscribers_per_node: u64,
    pub peak_gbps: f64,
    pub node: EdgeNodePower,
    pub power_w: f64,
}

/// The links from every node of `level` up to its parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkLevel {
    pub level: u32,
    pub links: u64,
    pub distance_km: f64,
    pub link: WdmLinkPower,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NationalDimensions {
    pub core: Vec<CoreLevel>,
    pub edge: EdgeLevel,
    pub links: Vec<LinkLevel>,
    pub core_power_w: f64,
    pub edge_power_w: f64,
    pub wdm_power_w: f64,
    pub power_w: f64,
}

pub fn dimension_national(
    homes: u64,
    demand: &impl PeakRate,
    topology: &CoreTreeTopology,
    literal_2l: bool,
    catalog: &EquipmentCatalog,
    wdm: &WdmProfile,
    factors: &GlobalFactors,
) -> NationalDimensions {
    let counts = topology.node_counts(literal_2l);
    let levels = topology.core_levels as usize;
    let pool = |nodes: u64| homes.div_ceil(nodes);
    let peak = |subs: u64| factors.alpha_t * demand.peak_gbps(subs);

    let core: Vec<CoreLevel> = (0..levels)
        .map(|l| {
            let nodes = counts[l];
            let subscribers_per_node = pool(nodes);
            let peak_gbps = peak(subscribers_per_node);
            let node = core_node_power(peak_gbps, catalog, factors);
            CoreLevel {
                level: l as u32,
                nodes,
                subscribers_per_node,
                peak_gbps,
                modules_per_node: node.modules,
                power_w: nodes as f64 * node.power_w,
            }
        })
        .collect();

    let edge = {
        let nodes = counts[levels];
        let subscribers_per_node = pool(nodes);
        let peak_gbps = peak(subscribers_per_node);
        let node = edge_node_power(peak_gbps, catalog, factors);
        EdgeLevel {
            nodes,
            subscribers_per_node,
            peak_gbps,
            node,
            power_w: nodes as f64 * node.power_w,
        }
    };

    let links: Vec<LinkLevel> = (1..=levels)
        .map(|l| {
            let (links, peak_gbps) = if l < levels {
                (core[l].nodes, core[l].peak_gbps)
            } else {
                (edge.nodes, edge.peak_gbps)
            };
            let distance_km = topology.distances_km[l - 1];
            let link = wdm_link_power(peak_gbps, distance_km, wdm, factors);
            LinkLevel {
                level: l as u32,
                links,
                distance_km,
                link,
                power_w: links as f64 * link.power_w,
            }
        })
        .collect();

    let core_power_w = core.iter().map(|c| c.power_w).sum::<f64>();
    let edge_power_w = edge.power_w;
    let wdm_power_w = links.iter().map(|l| l.power_w).sum::<f64>();
    NationalDimensions {
        core,
        edge,
        links,
        core_power_w,
        edge_power_w,
        wdm_power_w,
        power_w: core_power_w + edge_power_w + wdm_power_w,
    }
}
