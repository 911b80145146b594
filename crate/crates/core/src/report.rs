//! Rendering of energy reports: fixed-width tables for people and a
//! versioned JSON document for programs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::OutputFormat;
use crate::scenario::{EnergyReport, Segments};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("baseline `{0}` is not among the rendered reports")]
    MissingBaseline(String),
    #[error("malformed report document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub baseline: String,
    pub reports: Vec<EnergyReport>,
}

impl ReportDocument {
    /// Bundle `reports`, attaching to each its delta against `baseline`.
    pub fn new(baseline: &str, reports: Vec<EnergyReport>) -> Result<Self, ReportError> {
        let base = reports
            .iter()
            .find(|r| r.scenario == baseline)
            .cloned()
            .ok_or_else(|| ReportError::MissingBaseline(baseline.into()))?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            baseline: baseline.into(),
            reports: reports.into_iter().map(|r| r.with_delta(&base)).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Malformed(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Ok(doc)
    }
}

/// `x` with three significant figures, never in exponent notation.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    let rounded = format!("{x:.decimals$}");
    // Rounding can carry into a new digit (999.7 -> 1000); keep the width honest.
    let digits = rounded.trim_start_matches('-').replace('.', "");
    if digits.trim_start_matches('0').len() > 3 && decimals > 0 {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    rounded
}

/// Whole percent with an explicit sign: `+0%`, `+17%`, `-3%`.
pub fn percent(p: f64) -> String {
    let r = p.round();
    if r == 0.0 {
        "+0%".into()
    } else {
        format!("{r:+.0}%")
    }
}

const SEGMENT_HEADERS: [(&str, &str); 8] = [
    ("onu", "ONU"),
    ("access", "Access"),
    ("national", "National"),
    ("longhaul", "Longhaul"),
    ("cdn", "CDN"),
    ("home_cache", "HomeCache"),
    ("olt_cache", "OltCache"),
    ("dynamic", "Dynamic"),
];

// The five network columns always show; device and dynamic columns only when used.
fn visible_segments(reports: &[&EnergyReport]) -> Vec<(usize, &'static str)> {
    SEGMENT_HEADERS
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            *i < 5
                || reports
                    .iter()
                    .any(|r| r.segments.iter().nth(*i).is_some_and(|(_, s)| s.energy_gwh != 0.0))
        })
        .map(|(i, (_, h))| (i, *h))
        .collect()
}

fn segment(segments: &Segments, i: usize) -> f64 {
    segments.iter().nth(i).map_or(0.0, |(_, s)| s.energy_gwh)
}

struct Grid {
    rows: Vec<Vec<String>>,
}

impl Grid {
    fn render(&self, out: &mut String) {
        let cols = self.rows[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| self.rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for row in &self.rows {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c == 0 {
                    let _ = write!(line, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(line, "  {cell:>w$}", w = widths[c]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

/// Annual energy per segment in GWh, one row per report, with the delta to
/// `baseline`, then volumes and energy intensity.
pub fn render_table(reports: &[EnergyReport], baseline: &str) -> Result<String, ReportError> {
    let base = reports
        .iter()
        .find(|r| r.scenario == baseline)
        .ok_or_else(|| ReportError::MissingBaseline(baseline.into()))?;
    let refs: Vec<&EnergyReport> = reports.iter().collect();
    let columns = visible_segments(&refs);

    let mut header = vec!["Scenario".to_string()];
    header.extend(columns.iter().map(|(_, h)| h.to_string()));
    header.extend(["Total".into(), "Delta".into()]);
    let mut energy = Grid { rows: vec![header] };
    for r in reports {
        let mut row = vec![r.scenario.clone()];
        row.extend(columns.iter().map(|(i, _)| sig3(segment(&r.segments, *i))));
        row.push(sig3(r.total_gwh));
        row.push(percent(100.0 * (r.total_gwh - base.total_gwh) / base.total_gwh));
        energy.rows.push(row);
    }

    let mut efficiency = Grid {
        rows: vec![vec![
            "Scenario".into(),
            "Volume (EB)".into(),
            "Energy (GWh)".into(),
            "Wh/GB".into(),
        ]],
    };
    for r in reports {
        efficiency.rows.push(vec![
            r.scenario.clone(),
            sig3(r.volume_eb),
            sig3(r.total_gwh),
            sig3(r.efficiency_wh_per_gb),
        ]);
    }

    let mut out = String::from("Annual energy (GWh)\n");
    energy.render(&mut out);
    out.push_str("\nYearly volume and intensity\n");
    efficiency.render(&mut out);
    Ok(out)
}

/// Equipment counts and peak rates behind one report.
pub fn render_details(report: &EnergyReport) -> String {
    let d = &report.dimensions;
    let mut out = format!("Dimensioning of {}\n", report.scenario);
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "  {k:<32} {v}");
    };
    line("national baseline peak (Gbps)", sig3(d.peaks.baseline_gbps));
    line("national usage peak (Gbps)", sig3(d.peaks.usage_gbps));
    if let Some(q) = d.viewer_quantile {
        line(
            "viewer quantile fit (a, b, c)",
            format!("{:.6}, {:.6}, {:.6}", q.a, q.b, q.c),
        );
    }
    line("subscribers per GPON port", d.access.subscribers_per_gpon.to_string());
    line("GPON ports", d.access.gpon_ports.to_string());
    line("OLTs", d.access.olts.to_string());
    line("OLT uplink peak (Gbps)", sig3(d.access.olt_peak_gbps));
    line("10GE ports", d.access.ge_ports.to_string());
    for c in &d.national.core {
        line(
            &format!("core level {} nodes x modules", c.level),
            format!("{} x {} ({} Gbps)", c.nodes, c.modules_per_node, sig3(c.peak_gbps)),
        );
    }
    line(
        "edge nodes",
        format!("{} ({} Gbps each)", d.national.edge.nodes, sig3(d.national.edge.peak_gbps)),
    );
    for l in &d.national.links {
        line(
            &format!("WDM links to level {}", l.level),
            format!("{} x {} ch over {} km", l.links, l.link.channels, l.distance_km),
        );
    }
    line("national power (W)", sig3(d.national.power_w));
    line("national power, other node count (W)", sig3(d.national_alternative_power_w));
    line("international peak (Gbps)", sig3(d.longhaul.peak_gbps));
    line("submarine channels", d.longhaul.submarine_channels.to_string());
    line("submarine share of longhaul", format!("{:.1}%", 100.0 * d.longhaul.submarine_share()));
    line("CDN peak (Gbps)", sig3(d.cdn.peak_gbps));
    line(
        "CDN flash / storage servers",
        format!("{} / {}", d.cdn.flash_servers, d.cdn.storage_servers),
    );
    if d.home_cache_devices > 0 {
        line("home cache devices", d.home_cache_devices.to_string());
    }
    if d.olt_cache_devices > 0 {
        line("OLT cache devices", d.olt_cache_devices.to_string());
    }
    out
}

/// Render reports in the requested format.
pub fn render(reports: &[EnergyReport], baseline: &str, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Table => render_table(reports, baseline),
        OutputFormat::Json => Ok(ReportDocument::new(baseline, reports.to_vec())?.to_json()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDelta {
    pub segment: String,
    pub a_gwh: f64,
    pub b_gwh: f64,
    pub delta_gwh: f64,
    /// Relative to `a`; absent when `a` is zero.
    pub delta_percent: Option<f64>,
}

impl SegmentDelta {
    fn new(segment: &str, a: f64, b: f64) -> Self {
        Self {
            segment: segment.into(),
            a_gwh: a,
            b_gwh: b,
            delta_gwh: b - a,
            delta_percent: (a != 0.0).then(|| 100.0 * (b - a) / a),
        }
    }
}

/// Side-by-side comparison of two reports; deltas read `b - a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub schema_version: u32,
    pub a: EnergyReport,
    pub b: EnergyReport,
    pub segments: Vec<SegmentDelta>,
    pub total: SegmentDelta,
    pub volume: SegmentDelta,
}

pub fn compare(a: EnergyReport, b: EnergyReport) -> DeltaReport {
    let segments = a
        .segments
        .iter()
        .zip(b.segments.iter())
        .map(|((name, sa), (_, sb))| SegmentDelta::new(name, sa.energy_gwh, sb.energy_gwh))
        .collect();
    let total = SegmentDelta::new("total", a.total_gwh, b.total_gwh);
    let mut volume = SegmentDelta::new("volume", a.volume_eb, b.volume_eb);
    volume.segment = "volume_eb".into();
    DeltaReport {
        schema_version: SCHEMA_VERSION,
        a,
        b,
        segments,
        total,
        volume,
    }
}

impl DeltaReport {
    pub fn render_table(&self) -> String {
        let mut grid = Grid {
            rows: vec![vec![
                "Segment".into(),
                self.a.scenario.clone(),
                self.b.scenario.clone(),
                "Delta".into(),
                "Delta %".into(),
            ]],
        };
        let shown = self
            .segments
            .iter()
            .enumerate()
            .filter(|(i, s)| *i < 5 || s.a_gwh != 0.0 || s.b_gwh != 0.0);
        for (i, s) in shown {
            let label = SEGMENT_HEADERS[i].1;
            grid.rows.push(row(label, s));
        }
        grid.rows.push(row("Total", &self.total));
        grid.rows.push(row("Volume (EB)", &self.volume));
        let mut out = String::from("Annual energy (GWh)\n");
        grid.render(&mut out);
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("delta report serializes");
        s.push('\n');
        s
    }
}

fn row(label: &str, s: &SegmentDelta) -> Vec<String> {
    let signed = if s.delta_gwh >= 0.0 {
        format!("+{}", sig3(s.delta_gwh))
    } else {
        sig3(s.delta_gwh)
    };
    vec![
        label.into(),
        sig3(s.a_gwh),
        sig3(s.b_gwh),
        signed,
        s.delta_percent.map_or_else(|| "n/a".into(), percent),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub delta_gwh: f64,
    pub total_gwh: f64,
    pub efficiency_wh_per_gb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub schema_version: u32,
    pub template: String,
    pub parameter: String,
    pub baseline: String,
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn new(template: &str, parameter: &str, values: &[f64], reports: &[EnergyReport]) -> Self {
        let baseline = reports
            .first()
            .and_then(|r| r.delta.as_ref())
            .map(|d| d.baseline.clone())
            .unwrap_or_default();
        let points = values
            .iter()
            .zip(reports)
            .map(|(v, r)| SweepPoint {
                value: *v,
                delta_gwh: r.delta.as_ref().map_or(0.0, |d| d.delta_gwh),
                total_gwh: r.total_gwh,
                efficiency_wh_per_gb: r.efficiency_wh_per_gb,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            template: template.into(),
            parameter: parameter.into(),
            baseline,
            points,
        }
    }

    pub fn render_table(&self) -> String {
        let mut grid = Grid {
            rows: vec![vec![
                self.parameter.clone(),
                "Delta (GWh)".into(),
                "Total (GWh)".into(),
                "Wh/GB".into(),
            ]],
        };
        for p in &self.points {
            grid.rows.push(vec![
                p.value.to_string(),
                sig3(p.delta_gwh),
                sig3(p.total_gwh),
                sig3(p.efficiency_wh_per_gb),
            ]);
        }
        let mut out = format!("Sweep of {} over {} against {}\n", self.template, self.parameter, self.baseline);
        grid.render(&mut out);
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        s
    }
}
