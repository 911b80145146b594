//! Usage scenarios, the peak demand curve they induce, and the end-to-end
//! evaluation of every network segment into an [`EnergyReport`].

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::access::{dimension_access, AccessDimensions, OltLayout, Territory};
use crate::catalog::{EquipmentCatalog, GlobalFactors, WdmProfile};
use crate::cdn::{cdn_fill_rate, dimension_cdn, CdnConfig, CdnDimensions};
use crate::corenet::{dimension_national, CoreTreeTopology, NationalDimensions};
use crate::longhaul::{dimension_longhaul, longhaul_peak, LonghaulDimensions, LonghaulRoute};
use crate::peakstats::{
    binomial_quantile, convolution_quantile, fit_quantile_approx, ConfidenceLevel, HouseholdDistribution,
    PeakStatsError, QuantileApprox, DEFAULT_ANCHORS,
};
use crate::{annual_gwh, check_fraction, check_non_negative, check_positive, ModelError, PeakRate, ValidationError};

const DAYS_PER_YEAR: f64 = 365.0;
const MONTHS_PER_YEAR: f64 = 12.0;

/// Parameters accepted by [`Model::sweep`].
pub const SWEEP_PARAMETERS: [&str; 8] = [
    "r_v",
    "s_v",
    "sharing",
    "cdn_fraction",
    "daily_hours",
    "r_b",
    "s_b",
    "ott_reduction",
];

/// Background traffic every subscription generates regardless of the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineUsage {
    /// Mbps per active subscription.
    pub r_b: f64,
    /// Fraction of subscriptions active at the peak.
    pub s_b: f64,
    pub monthly_volume_gb: f64,
}

impl Default for BaselineUsage {
    fn default() -> Self {
        Self {
            r_b: 10.0,
            s_b: 0.02,
            monthly_volume_gb: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VodMode {
    /// `s_v` is a fraction of inhabitants; streams are shared by `sharing` viewers.
    #[default]
    PerInhabitant,
    /// `s_v` is a fraction of subscriptions.
    PerSubscriber,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VodUsage {
    /// Mbps per stream.
    pub r_v: f64,
    pub s_v: f64,
    /// Viewers per stream.
    pub sharing: f64,
    /// Overrides the CDN default when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdn_fraction: Option<f64>,
    /// Viewing hours per subscription per day.
    pub daily_hours: f64,
    pub mode: VodMode,
}

impl Default for VodUsage {
    fn default() -> Self {
        Self {
            r_v: 0.0,
            s_v: 0.2,
            sharing: 1.5,
            cdn_fraction: None,
            daily_hours: 3.2,
            mode: VodMode::PerInhabitant,
        }
    }
}

/// Bulk downloads counted per subscription, with their own confidence level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DlUsage {
    pub r_v: f64,
    pub s_v: f64,
    pub epsilon: ConfidenceLevel,
    pub monthly_volume_gb: f64,
    pub cdn_fraction: f64,
}

impl Default for DlUsage {
    fn default() -> Self {
        Self {
            r_v: 200.0,
            s_v: 0.03,
            epsilon: ConfidenceLevel::new(1e-7).expect("valid epsilon"),
            monthly_volume_gb: 25.0,
            cdn_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheKind {
    /// Home caching devices filled over terrestrial broadcast.
    HomeDtt,
    /// Caching devices inside the OLT shelves.
    Olt,
}

/// Moves `ott_reduction` of the VoD usage off the network onto caches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheVariant {
    pub kind: CacheKind,
    pub ott_reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub baseline: BaselineUsage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vod: Option<VodUsage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dl: Option<DlUsage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<CacheVariant>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "baseline".into(),
            baseline: BaselineUsage::default(),
            vod: None,
            dl: None,
            cache: None,
        }
    }
}

impl Scenario {
    pub fn baseline() -> Self {
        Self::default()
    }

    /// Per-inhabitant VoD at `r_v` Mbps with default usage figures.
    pub fn vod(name: &str, r_v: f64) -> Self {
        Self {
            name: name.into(),
            vod: Some(VodUsage { r_v, ..Default::default() }),
            ..Default::default()
        }
    }

    pub fn download(name: &str) -> Self {
        Self {
            name: name.into(),
            dl: Some(DlUsage::default()),
            ..Default::default()
        }
    }

    pub fn with_cache(mut self, kind: CacheKind, ott_reduction: f64) -> Self {
        self.cache = Some(CacheVariant { kind, ott_reduction });
        self
    }

    /// True when a VoD or download service (and thus a CDN) exists.
    pub fn has_service(&self) -> bool {
        self.vod.is_some() || self.dl.is_some()
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        self.validate_fields().map_err(|e| e.within(&self.name))
    }

    fn validate_fields(&self) -> Result<(), ValidationError> {
        let b = &self.baseline;
        check_non_negative("baseline.r_b", b.r_b)?;
        check_fraction("baseline.s_b", b.s_b)?;
        check_non_negative("baseline.monthly_volume_gb", b.monthly_volume_gb)?;
        if self.vod.is_some() && self.dl.is_some() {
            return Err(ValidationError::new("dl", "a scenario carries either vod or dl usage, not both"));
        }
        if let Some(v) = &self.vod {
            check_non_negative("vod.r_v", v.r_v)?;
            check_fraction("vod.s_v", v.s_v)?;
            check_positive("vod.sharing", v.sharing)?;
            if let Some(f) = v.cdn_fraction {
                check_fraction("vod.cdn_fraction", f)?;
            }
            check_non_negative("vod.daily_hours", v.daily_hours)?;
            if v.daily_hours > 24.0 {
                return Err(ValidationError::new(
                    "vod.daily_hours",
                    format!("must be <= 24, got {}", v.daily_hours),
                ));
            }
        }
        if let Some(d) = &self.dl {
            check_non_negative("dl.r_v", d.r_v)?;
            check_fraction("dl.s_v", d.s_v)?;
            check_non_negative("dl.monthly_volume_gb", d.monthly_volume_gb)?;
            check_fraction("dl.cdn_fraction", d.cdn_fraction)?;
        }
        if let Some(c) = &self.cache {
            check_fraction("cache.ott_reduction", c.ott_reduction)?;
            if self.vod.is_none() {
                return Err(ValidationError::new("cache", "cache variants need a vod usage to offload"));
            }
        }
        Ok(())
    }

    /// The usage left on the network once the cache variant has taken its share.
    pub fn network_usage(&self) -> Scenario {
        let mut s = self.clone();
        if let (Some(cache), Some(vod)) = (self.cache, s.vod.as_mut()) {
            let keep = 1.0 - cache.ott_reduction;
            vod.s_v *= keep;
            vod.daily_hours *= keep;
        }
        s
    }
}

fn inhabitant_quantile(dist: &HouseholdDistribution, n: u64, eps: ConfidenceLevel) -> Result<u64, PeakStatsError> {
    type Key = (u32, Vec<u64>, u64, u64);
    static MEMO: OnceLock<Mutex<HashMap<Key, u64>>> = OnceLock::new();
    let key = (
        dist.min_inhabitants(),
        dist.probabilities().iter().map(|p| p.to_bits()).collect(),
        eps.get().to_bits(),
        n,
    );
    let memo = MEMO.get_or_init(Default::default);
    if let Some(q) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(*q);
    }
    let q = convolution_quantile(dist, n, eps)?;
    memo.lock().unwrap_or_else(|e| e.into_inner()).insert(key, q);
    Ok(q)
}

/// Fitted `q_{s_v}` composed with the inhabitant quantile of `n` homes.
pub fn fit_viewer_quantile(
    dist: &HouseholdDistribution,
    s_v: f64,
    eps: ConfidenceLevel,
) -> Result<QuantileApprox, PeakStatsError> {
    if s_v == 0.0 {
        return Ok(QuantileApprox::zero());
    }
    fit_quantile_approx(
        |n| {
            let inhabitants = inhabitant_quantile(dist, n, eps)?;
            Ok(binomial_quantile(inhabitants, s_v, eps)? as f64)
        },
        DEFAULT_ANCHORS,
        s_v * dist.mean(),
    )
}

#[derive(Debug, Clone, PartialEq)]
enum UsageTerm {
    None,
    Viewers { r_v: f64, sharing: f64, approx: QuantileApprox },
    Subscribers { r_v: f64, divisor: f64, s_v: f64, eps: ConfidenceLevel },
}

/// Peak rate `R(n)` of a pool of `n` homes: the baseline term plus the usage
/// term of the scenario, both at the `1 - eps` percentile and summed as if
/// fully correlated.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandCurve {
    r_b: f64,
    s_b: f64,
    eps: ConfidenceLevel,
    usage: UsageTerm,
}

impl DemandCurve {
    pub fn new(scenario: &Scenario, dist: &HouseholdDistribution, eps: ConfidenceLevel) -> Result<Self, PeakStatsError> {
        let usage = match (&scenario.vod, &scenario.dl) {
            (Some(v), _) if v.r_v > 0.0 => match v.mode {
                VodMode::PerInhabitant => UsageTerm::Viewers {
                    r_v: v.r_v,
                    sharing: v.sharing,
                    approx: fit_viewer_quantile(dist, v.s_v, eps)?,
                },
                VodMode::PerSubscriber => UsageTerm::Subscribers {
                    r_v: v.r_v,
                    divisor: v.sharing,
                    s_v: v.s_v,
                    eps,
                },
            },
            (_, Some(d)) if d.r_v > 0.0 => UsageTerm::Subscribers {
                r_v: d.r_v,
                divisor: 1.0,
                s_v: d.s_v,
                eps: d.epsilon,
            },
            _ => UsageTerm::None,
        };
        Ok(Self {
            r_b: scenario.baseline.r_b,
            s_b: scenario.baseline.s_b,
            eps,
            usage,
        })
    }

    /// The fitted viewer quantile, for per-inhabitant VoD.
    pub fn viewer_approx(&self) -> Option<QuantileApprox> {
        match self.usage {
            UsageTerm::Viewers { approx, .. } => Some(approx),
            _ => None,
        }
    }
}

// Probabilities were validated with the scenario, so the quantiles cannot fail.
fn quantile(n: u64, p: f64, eps: ConfidenceLevel) -> f64 {
    binomial_quantile(n, p, eps).expect("validated probability") as f64
}

impl PeakRate for DemandCurve {
    fn peak_mbps(&self, pool: u64) -> f64 {
        let base = if self.r_b > 0.0 {
            self.r_b * quantile(pool, self.s_b, self.eps)
        } else {
            0.0
        };
        let usage = match &self.usage {
            UsageTerm::None => 0.0,
            UsageTerm::Viewers { r_v, sharing, approx } => r_v * approx.eval(pool as f64) / sharing,
            UsageTerm::Subscribers { r_v, divisor, s_v, eps } => r_v * quantile(pool, *s_v, *eps) / divisor,
        };
        base + usage
    }
}

/// National mean peaks in Gbps, before any margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalPeaks {
    pub baseline_gbps: f64,
    pub usage_gbps: f64,
}

pub fn global_peaks(scenario: &Scenario, territory: &Territory, per_stream: bool) -> GlobalPeaks {
    let homes = territory.homes as f64;
    let b = &scenario.baseline;
    let usage_mbps = match (&scenario.vod, &scenario.dl) {
        (Some(v), _) => {
            let streams = match v.mode {
                VodMode::PerInhabitant => v.s_v * territory.household_distribution.mean() * homes,
                VodMode::PerSubscriber => v.s_v * homes,
            };
            let sharing = if per_stream { v.sharing } else { 1.0 };
            streams * v.r_v / sharing
        }
        (_, Some(d)) => d.s_v * homes * d.r_v,
        _ => 0.0,
    };
    GlobalPeaks {
        baseline_gbps: b.s_b * homes * b.r_b / 1000.0,
        usage_gbps: usage_mbps / 1000.0,
    }
}

/// Time-averaged power of a device idling at `standby_w` and drawing
/// `active_w` for `active_hours` a day.
pub fn average_device_power(standby_w: f64, active_w: f64, active_hours: f64) -> f64 {
    (standby_w * (24.0 - active_hours) + active_w * active_hours) / 24.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomeCacheDevice {
    pub standby_w: f64,
    pub active_w: f64,
    pub active_hours: f64,
}

impl Default for HomeCacheDevice {
    fn default() -> Self {
        Self {
            standby_w: 0.5,
            active_w: 10.0,
            active_hours: 3.5,
        }
    }
}

impl HomeCacheDevice {
    pub fn average_power(&self) -> f64 {
        average_device_power(self.standby_w, self.active_w, self.active_hours)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OltCacheDevice {
    pub device_w: f64,
    pub subscribers_per_olt: u64,
}

impl Default for OltCacheDevice {
    fn default() -> Self {
        Self {
            device_w: 30.0,
            subscribers_per_olt: 8000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheDevices {
    pub home: HomeCacheDevice,
    pub olt: OltCacheDevice,
}

impl CacheDevices {
    pub fn validate(&self) -> Result<(), ValidationError> {
        check_non_negative("cache_devices.home.standby_w", self.home.standby_w)?;
        check_non_negative("cache_devices.home.active_w", self.home.active_w)?;
        check_non_negative("cache_devices.home.active_hours", self.home.active_hours)?;
        if self.home.active_hours > 24.0 {
            return Err(ValidationError::new(
                "cache_devices.home.active_hours",
                format!("must be <= 24, got {}", self.home.active_hours),
            ));
        }
        check_non_negative("cache_devices.olt.device_w", self.olt.device_w)?;
        check_positive("cache_devices.olt.subscribers_per_olt", self.olt.subscribers_per_olt as f64)
    }
}

/// Traffic-proportional energy added per transferred GB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicPower {
    pub enabled: bool,
    pub intensity_wh_per_gb: f64,
}

impl Default for DynamicPower {
    fn default() -> Self {
        Self {
            enabled: false,
            intensity_wh_per_gb: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OnuFleet {
    /// Share of ONUs assumed switched off at any time.
    pub off_fraction: f64,
}

/// Switches between alternative readings of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelFlags {
    /// Size the national tree with `2^l` nodes per level instead of `branching^l`.
    pub literal_2l: bool,
    /// Apply the terrestrial growth margin to the international peak.
    pub apply_growth_margin_longhaul: bool,
    /// Divide the national VoD peak by the stream sharing factor.
    pub rv_star_per_stream: bool,
}

impl Default for ModelFlags {
    fn default() -> Self {
        Self {
            literal_2l: false,
            apply_growth_margin_longhaul: true,
            rv_star_per_stream: true,
        }
    }
}

/// Everything but the scenario: territory, equipment, topology and knobs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model {
    pub territory: Territory,
    pub access: OltLayout,
    pub catalog: EquipmentCatalog,
    pub wdm: WdmProfile,
    pub factors: GlobalFactors,
    pub topology: CoreTreeTopology,
    pub route: LonghaulRoute,
    pub cdn: CdnConfig,
    pub cache_devices: CacheDevices,
    pub dynamic: DynamicPower,
    pub onu: OnuFleet,
    pub flags: ModelFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Segment {
    pub power_w: f64,
    pub energy_gwh: f64,
}

impl Segment {
    pub fn from_power(power_w: f64) -> Self {
        Self {
            power_w,
            energy_gwh: annual_gwh(power_w),
        }
    }

    pub fn from_energy(energy_gwh: f64) -> Self {
        Self {
            power_w: energy_gwh * 1e9 / crate::HOURS_PER_YEAR,
            energy_gwh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Segments {
    pub onu: Segment,
    pub access: Segment,
    pub national: Segment,
    pub longhaul: Segment,
    pub cdn: Segment,
    pub home_cache: Segment,
    pub olt_cache: Segment,
    pub dynamic: Segment,
}

impl Segments {
    pub const NAMES: [&'static str; 8] = [
        "onu",
        "access",
        "national",
        "longhaul",
        "cdn",
        "home_cache",
        "olt_cache",
        "dynamic",
    ];

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Segment)> {
        Self::NAMES.into_iter().zip([
            self.onu,
            self.access,
            self.national,
            self.longhaul,
            self.cdn,
            self.home_cache,
            self.olt_cache,
            self.dynamic,
        ])
    }

    pub fn total_gwh(&self) -> f64 {
        self.iter().map(|(_, s)| s.energy_gwh).sum()
    }

    /// Everything except the cache device fleets.
    pub fn network_gwh(&self) -> f64 {
        self.total_gwh() - self.home_cache.energy_gwh - self.olt_cache.energy_gwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub baseline: String,
    pub delta_gwh: f64,
    pub delta_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub peaks: GlobalPeaks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub viewer_quantile: Option<QuantileApprox>,
    pub access: AccessDimensions,
    pub national: NationalDimensions,
    /// National power under the other node-count convention.
    pub national_alternative_power_w: f64,
    pub longhaul: LonghaulDimensions,
    pub cdn: CdnDimensions,
    pub home_cache_devices: u64,
    pub olt_cache_devices: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParameters {
    pub scenario: Scenario,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub scenario: String,
    pub segments: Segments,
    pub total_gwh: f64,
    pub volume_eb: f64,
    pub efficiency_wh_per_gb: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Delta>,
    pub dimensions: Dimensions,
    pub parameters: ResolvedParameters,
}

impl EnergyReport {
    /// Attach the difference to `baseline`.
    pub fn with_delta(mut self, baseline: &EnergyReport) -> Self {
        let delta_gwh = self.total_gwh - baseline.total_gwh;
        self.delta = Some(Delta {
            baseline: baseline.scenario.clone(),
            delta_gwh,
            delta_percent: 100.0 * delta_gwh / baseline.total_gwh,
        });
        self
    }

    pub fn network_gwh(&self) -> f64 {
        self.segments.network_gwh()
    }
}

/// Yearly transferred volume in GB.
fn yearly_volume_gb(scenario: &Scenario, homes: f64) -> f64 {
    let mut gb = homes * scenario.baseline.monthly_volume_gb * MONTHS_PER_YEAR;
    if let Some(v) = &scenario.vod {
        let gb_per_hour = v.r_v * 1e6 / 8.0 * 3600.0 / 1e9;
        gb += homes * v.daily_hours * DAYS_PER_YEAR * gb_per_hour;
    }
    if let Some(d) = &scenario.dl {
        gb += homes * d.monthly_volume_gb * MONTHS_PER_YEAR;
    }
    gb
}

impl Model {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.territory.validate()?;
        self.access.validate()?;
        self.catalog.validate()?;
        self.wdm.validate()?;
        self.factors.validate()?;
        self.topology.validate()?;
        self.route.validate()?;
        self.cdn.validate()?;
        self.cache_devices.validate()?;
        check_non_negative("dynamic.intensity_wh_per_gb", self.dynamic.intensity_wh_per_gb)?;
        check_fraction("onu.off_fraction", self.onu.off_fraction)
    }

    pub fn demand_curve(&self, scenario: &Scenario) -> Result<DemandCurve, ModelError> {
        Ok(DemandCurve::new(
            scenario,
            &self.territory.household_distribution,
            self.factors.epsilon,
        )?)
    }

    pub fn evaluate(&self, scenario: &Scenario) -> Result<EnergyReport, ModelError> {
        self.validate()?;
        scenario.validate()?;
        let net = scenario.network_usage();
        let homes = self.territory.homes as f64;
        let (catalog, factors) = (&self.catalog, &self.factors);

        let demand = self.demand_curve(&net)?;
        let access = dimension_access(&self.territory, &self.access, &demand, catalog, factors)?;
        let national_for = |literal| {
            dimension_national(
                self.territory.homes,
                &demand,
                &self.topology,
                literal,
                catalog,
                &self.wdm,
                factors,
            )
        };
        let national = national_for(self.flags.literal_2l);
        let national_alternative_power_w = national_for(!self.flags.literal_2l).power_w;

        let peaks = global_peaks(&net, &self.territory, self.flags.rv_star_per_stream);
        let cdn_fraction = match (&net.vod, &net.dl) {
            (Some(v), _) => v.cdn_fraction.unwrap_or(self.cdn.cdn_fraction),
            (_, Some(d)) => d.cdn_fraction,
            _ => self.cdn.cdn_fraction,
        };
        let fill = if net.has_service() { cdn_fill_rate(&self.cdn) } else { 0.0 };
        let margin = if self.flags.apply_growth_margin_longhaul { factors.alpha_t } else { 1.0 };
        let r_u = longhaul_peak(peaks.baseline_gbps, peaks.usage_gbps, fill, cdn_fraction, &self.route, margin);
        let longhaul = dimension_longhaul(r_u, &self.route, catalog, &self.wdm, factors);
        let cdn = dimension_cdn(
            net.has_service().then_some(peaks.usage_gbps),
            cdn_fraction,
            &self.cdn,
            catalog,
            factors,
        );

        let cache = scenario.cache.map(|c| c.kind);
        let home_cache_devices = if cache == Some(CacheKind::HomeDtt) { self.territory.homes } else { 0 };
        let olt_cache_devices = if cache == Some(CacheKind::Olt) {
            self.territory.homes.div_ceil(self.cache_devices.olt.subscribers_per_olt)
        } else {
            0
        };

        let volume_gb = yearly_volume_gb(&net, homes);
        let dynamic_gwh = if self.dynamic.enabled {
            volume_gb * self.dynamic.intensity_wh_per_gb / 1e9
        } else {
            0.0
        };

        let segments = Segments {
            onu: Segment::from_power(homes * catalog.onu.static_power * (1.0 - self.onu.off_fraction)),
            access: Segment::from_power(access.power_w),
            national: Segment::from_power(national.power_w),
            longhaul: Segment::from_power(longhaul.power_w),
            cdn: Segment::from_power(cdn.power_w),
            home_cache: Segment::from_power(home_cache_devices as f64 * self.cache_devices.home.average_power()),
            olt_cache: Segment::from_power(olt_cache_devices as f64 * self.cache_devices.olt.device_w),
            dynamic: Segment::from_energy(dynamic_gwh),
        };
        let total_gwh = segments.total_gwh();
        Ok(EnergyReport {
            scenario: scenario.name.clone(),
            segments,
            total_gwh,
            volume_eb: volume_gb / 1e9,
            efficiency_wh_per_gb: total_gwh * 1e9 / volume_gb,
            delta: None,
            dimensions: Dimensions {
                peaks,
                viewer_quantile: demand.viewer_approx(),
                access,
                national,
                national_alternative_power_w,
                longhaul,
                cdn,
                home_cache_devices,
                olt_cache_devices,
            },
            parameters: ResolvedParameters {
                scenario: scenario.clone(),
                model: self.clone(),
            },
        })
    }

    /// `scenario` with `ott_reduction` of its VoD moved to home caches fed by broadcast.
    pub fn evaluate_dtt_variant(&self, scenario: &Scenario, ott_reduction: f64) -> Result<EnergyReport, ModelError> {
        let mut s = scenario.clone().with_cache(CacheKind::HomeDtt, ott_reduction);
        s.name = format!("{}+DTT", scenario.name);
        self.evaluate(&s)
    }

    /// `scenario` with `ott_reduction` of its VoD moved to caches in the OLTs.
    pub fn evaluate_olt_cache_variant(
        &self,
        scenario: &Scenario,
        ott_reduction: f64,
    ) -> Result<EnergyReport, ModelError> {
        let mut s = scenario.clone().with_cache(CacheKind::Olt, ott_reduction);
        s.name = format!("{}+OLT", scenario.name);
        self.evaluate(&s)
    }

    /// One report per value of `parameter`, each with its delta to `baseline`.
    /// Points are evaluated concurrently; the output keeps the input order.
    pub fn sweep(
        &self,
        template: &Scenario,
        parameter: &str,
        values: &[f64],
        baseline: &EnergyReport,
    ) -> Result<Vec<EnergyReport>, ModelError> {
        let scenarios = values
            .iter()
            .map(|v| with_parameter(template, parameter, *v))
            .collect::<Result<Vec<_>, _>>()?;
        let results: Vec<Result<EnergyReport, ModelError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = scenarios
                .iter()
                .map(|s| scope.spawn(move || self.evaluate(s)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        results
            .into_iter()
            .map(|r| r.map(|report| report.with_delta(baseline)))
            .collect()
    }
}

/// `template` with one parameter replaced, renamed after the value.
pub fn with_parameter(template: &Scenario, parameter: &str, value: f64) -> Result<Scenario, ModelError> {
    let mut s = template.clone();
    let missing = |section: &str| ValidationError::new(section, format!("scenario has no {section} section to vary"));
    match parameter {
        "r_b" => s.baseline.r_b = value,
        "s_b" => s.baseline.s_b = value,
        "r_v" | "s_v" | "cdn_fraction" => match (s.vod.as_mut(), s.dl.as_mut()) {
            (Some(v), _) => match parameter {
                "r_v" => v.r_v = value,
                "s_v" => v.s_v = value,
                _ => v.cdn_fraction = Some(value),
            },
            (_, Some(d)) => match parameter {
                "r_v" => d.r_v = value,
                "s_v" => d.s_v = value,
                _ => d.cdn_fraction = value,
            },
            _ => return Err(missing("vod").within(&template.name).into()),
        },
        "sharing" | "daily_hours" => {
            let v = s.vod.as_mut().ok_or_else(|| missing("vod").within(&template.name))?;
            if parameter == "sharing" {
                v.sharing = value;
            } else {
                v.daily_hours = value;
            }
        }
        "ott_reduction" => {
            let c = s.cache.as_mut().ok_or_else(|| missing("cache").within(&template.name))?;
            c.ott_reduction = value;
        }
        _ => {
            return Err(ModelError::UnknownParameter {
                name: parameter.into(),
                expected: SWEEP_PARAMETERS.to_vec(),
            })
        }
    }
    s.name = format!("{}[{parameter}={value}]", template.name);
    Ok(s)
}
