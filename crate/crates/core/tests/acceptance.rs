//! Acceptance criteria A1 to A10, one PASS/FAIL line each, followed by the
//! worked examples whose values depend on the same calibration.
//! Exits non-zero when any line fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{agrees, binomial_oracle, convolution_oracle, within};
use netpeak::access::{dimension_access, OltLayout};
use netpeak::catalog::{EquipmentCatalog, GlobalFactors, WdmProfile};
use netpeak::cdn::{dimension_cdn, CdnConfig};
use netpeak::config::RunConfig;
use netpeak::corenet::{core_node_power, edge_node_power, wdm_link_power};
use netpeak::longhaul::{dimension_longhaul, submarine_channel_power, LonghaulRoute};
use netpeak::peakstats::{binomial_quantile, convolution_quantile};
use netpeak::report::{compare, ReportDocument};
use netpeak::scenario::fit_viewer_quantile;
use netpeak::{ConfidenceLevel, EnergyReport, HouseholdDistribution, Model, PeakRate, Territory};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Check = (&'static str, &'static str, fn() -> Outcome);

const SUITE: [&str; 6] = ["baseline", "HD", "FHD", "UHD", "UHD++", "DL"];

fn config() -> RunConfig {
    RunConfig::defaults()
}

fn eval(model: &Model, config: &RunConfig, name: &str) -> EnergyReport {
    model.evaluate(config.scenario(name).unwrap()).unwrap()
}

fn suite(model: &Model, config: &RunConfig) -> Vec<EnergyReport> {
    SUITE.iter().map(|n| eval(model, config, n)).collect()
}

fn in_range(label: &str, x: f64, lo: f64, hi: f64, failures: &mut Vec<String>) {
    if !(lo..=hi).contains(&x) {
        failures.push(format!("{label} {x:.3} not in [{lo}, {hi}]"));
    }
}

fn verdict(summary: String, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn a1() -> Outcome {
    let start = Instant::now();
    let c = config();
    let r = eval(&c.model, &c, "baseline");
    let elapsed = start.elapsed().as_secs_f64();
    let exact = 30.45e6 * 2.5 * 8760.0 / 1e9;
    let mut f = Vec::new();
    if !within(r.segments.onu.energy_gwh, 667.0, 0.005) {
        f.push(format!("onu {:.2} GWh", r.segments.onu.energy_gwh));
    }
    if (r.segments.onu.energy_gwh - exact).abs() > 1e-9 {
        f.push(format!("onu {} != {exact}", r.segments.onu.energy_gwh));
    }
    if elapsed >= 1.0 {
        f.push(format!("runtime {elapsed:.3} s"));
    }
    verdict(format!("onu {:.2} GWh in {elapsed:.3} s", r.segments.onu.energy_gwh), f)
}

fn a2() -> Outcome {
    let c = config();
    let r = eval(&c.model, &c, "baseline");
    let s = &r.segments;
    let mut f = Vec::new();
    in_range("access", s.access.energy_gwh, 65.0, 73.0, &mut f);
    in_range("national", s.national.energy_gwh, 7.5, 10.5, &mut f);
    in_range("longhaul", s.longhaul.energy_gwh, 2.0, 3.6, &mut f);
    in_range("cdn", s.cdn.energy_gwh, 0.0, 0.0, &mut f);
    in_range("total", r.total_gwh, 730.0, 766.0, &mut f);
    verdict(
        format!(
            "access {:.1} national {:.2} longhaul {:.2} cdn {} total {:.1}",
            s.access.energy_gwh, s.national.energy_gwh, s.longhaul.energy_gwh, s.cdn.energy_gwh, r.total_gwh
        ),
        f,
    )
}

fn a3() -> Outcome {
    let c = config();
    let reports = suite(&c.model, &c);
    let mut f = Vec::new();
    for w in reports.windows(2) {
        if w[0].total_gwh >= w[1].total_gwh {
            f.push(format!("{} {:.1} >= {} {:.1}", w[0].scenario, w[0].total_gwh, w[1].scenario, w[1].total_gwh));
        }
    }
    let base = reports[0].total_gwh;
    let mut deltas = Vec::new();
    for (r, target) in reports[1..].iter().zip([19.0, 34.0, 127.0, 257.0, 365.0]) {
        let d = r.total_gwh - base;
        deltas.push(format!("{} {d:+.0}", r.scenario));
        if !within(d, target, 0.2) {
            f.push(format!("{} delta {d:.1} vs {target} +-20%", r.scenario));
        }
    }
    verdict(format!("ordered totals, deltas {}", deltas.join(" ")), f)
}

fn a4() -> Outcome {
    let c = config();
    let reports = suite(&c.model, &c);
    let mut f = Vec::new();
    for (r, target) in reports.iter().zip([0.73, 49.0, 81.0, 257.0, 433.0, 10.0]) {
        if !within(r.volume_eb, target, 0.03) {
            f.push(format!("{} volume {:.3} EB vs {target}", r.scenario, r.volume_eb));
        }
    }
    for w in reports[1..5].windows(2) {
        if w[1].efficiency_wh_per_gb >= w[0].efficiency_wh_per_gb {
            f.push(format!("{} Wh/GB not below {}", w[1].scenario, w[0].scenario));
        }
        if w[1].total_gwh <= w[0].total_gwh {
            f.push(format!("{} total not above {}", w[1].scenario, w[0].scenario));
        }
    }
    in_range("baseline Wh/GB", reports[0].efficiency_wh_per_gb, 950.0, 1100.0, &mut f);

    let mut dynamic = c.model.clone();
    dynamic.dynamic.enabled = true;
    let hd = &reports[1];
    let shift = eval(&dynamic, &c, "HD").total_gwh - hd.total_gwh;
    in_range("HD dynamic shift", shift, 4.4, 5.4, &mut f);
    verdict(
        format!(
            "volumes {:.3}..{:.0} EB, baseline {:.0} Wh/GB, HD dynamic +{shift:.2} GWh",
            reports[0].volume_eb, reports[4].volume_eb, reports[0].efficiency_wh_per_gb
        ),
        f,
    )
}

fn a5() -> Outcome {
    let w = submarine_channel_power(&LonghaulRoute::default());
    if w == 142.0 {
        Ok(format!("{w} W per channel"))
    } else {
        Err(format!("{w} W per channel"))
    }
}

fn a6() -> Outcome {
    let c = config();
    let mut model = c.model.clone();
    model.dynamic.enabled = true;
    let mut f = Vec::new();

    let fhd = eval(&model, &c, "FHD");
    let fhd_dtt = eval(&model, &c, "FHD+DTT");
    let uhd = eval(&model, &c, "UHD");
    let uhd_dtt = eval(&model, &c, "UHD+DTT");

    let fleet = fhd_dtt.segments.home_cache.energy_gwh;
    if !within(fleet, 502.0, 0.01) {
        f.push(format!("home cache fleet {fleet:.1} GWh"));
    }
    for (a, b) in [(&fhd, &fhd_dtt), (&uhd, &uhd_dtt)] {
        if b.total_gwh <= a.total_gwh {
            f.push(format!("{} total {:.1} not above {}", b.scenario, b.total_gwh, a.scenario));
        }
    }
    for (r, target) in [(&fhd, 790.0), (&fhd_dtt, 768.0), (&uhd, 901.0), (&uhd_dtt, 860.0)] {
        if !within(r.network_gwh(), target, 0.2) {
            f.push(format!("{} network {:.1} vs {target}", r.scenario, r.network_gwh()));
        }
    }
    let cut = |a: &EnergyReport, b: &EnergyReport| 1.0 - b.network_gwh() / a.network_gwh();
    let (fhd_cut, uhd_cut) = (cut(&fhd, &fhd_dtt), cut(&uhd, &uhd_dtt));
    if uhd_cut <= fhd_cut {
        f.push(format!("UHD cut {uhd_cut:.4} not above FHD cut {fhd_cut:.4}"));
    }
    verdict(
        format!(
            "fleet {fleet:.1} GWh, network FHD {:.0}->{:.0} ({:.1}%), UHD {:.0}->{:.0} ({:.1}%)",
            fhd.network_gwh(),
            fhd_dtt.network_gwh(),
            100.0 * fhd_cut,
            uhd.network_gwh(),
            uhd_dtt.network_gwh(),
            100.0 * uhd_cut
        ),
        f,
    )
}

fn a7() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let conf = |e: f64| ConfidenceLevel::new(e).unwrap();
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 128, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let eps = (-12.0..-1.0f64).prop_map(|x| 10f64.powf(x));

    let monotone = runner.run(&(0u64..5000, 0.0..0.99f64, 0.0..0.01f64, eps.clone(), 1.0..100.0f64), |(n, p, dp, e, k)| {
        let q = binomial_quantile(n, p, conf(e)).unwrap();
        prop_assert!(q <= binomial_quantile(n + 1, p, conf(e)).unwrap());
        prop_assert!(q <= binomial_quantile(n, p + dp, conf(e)).unwrap());
        prop_assert!(q <= binomial_quantile(n, p, conf(e / k)).unwrap());
        prop_assert!(q >= (n as f64 * p).floor() as u64);
        Ok(())
    });
    if let Err(e) = monotone {
        f.push(format!("binomial monotonicity: {e}"));
    }

    let oracle = runner.run(&(1u64..1500, 0.001..0.999f64, eps.clone()), |(n, p, e)| {
        let got = binomial_quantile(n, p, conf(e)).unwrap();
        let (expected, tails) = binomial_oracle(n, p, e);
        prop_assert!(agrees(got, expected, &tails, e), "{got} vs {expected}");
        Ok(())
    });
    if let Err(e) = oracle {
        f.push(format!("binomial oracle: {e}"));
    }

    let dist = HouseholdDistribution::france_2019();
    for n in 0..=64 {
        for e in [1e-2, 1e-5, 1e-9] {
            let got = convolution_quantile(&dist, n, conf(e)).unwrap();
            let (expected, tails) = convolution_oracle(&dist, n, e);
            if !agrees(got, expected, &tails, e) {
                f.push(format!("convolution n={n} eps={e}: {got} vs {expected}"));
            }
        }
    }

    let e = ConfidenceLevel::DEFAULT;
    let fit = fit_viewer_quantile(&dist, 0.2, e).unwrap();
    let mut worst: f64 = 0.0;
    for n in [32u64, 256, 512] {
        let exact = binomial_quantile(convolution_quantile(&dist, n, e).unwrap(), 0.2, e).unwrap() as f64;
        let err = (fit.eval(n as f64) - exact).abs() / exact;
        worst = worst.max(err);
    }
    if worst > 0.03 {
        f.push(format!("fit error {:.2}%", 100.0 * worst));
    }

    let q64 = binomial_quantile(64, 0.03, e).unwrap();
    in_range("q_3%(64)/64", q64 as f64 / 64.0, 0.20, 0.24, &mut f);

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        f.push(format!("runtime {elapsed:.2} s"));
    }
    verdict(
        format!("fit error {:.2}%, q_3%(64) = {q64}, {elapsed:.2} s", 100.0 * worst),
        f,
    )
}

fn a8() -> Outcome {
    let c = config();
    let mut f = Vec::new();
    let mut splits = Vec::new();
    let cap = c.model.catalog.gpon_port.capacity_gbps();
    let alpha = c.model.factors.alpha_t;
    let max = c.model.access.max_subscribers_per_gpon;
    for name in c.scenario_names() {
        let s = c.scenario(&name).unwrap();
        let n = eval(&c.model, &c, &name).dimensions.access.subscribers_per_gpon;
        let demand = c.model.demand_curve(&s.network_usage()).unwrap();
        if alpha * demand.peak_gbps(n as u64) >= cap {
            f.push(format!("{name}: R({n}) does not fit"));
        }
        if n < max && alpha * demand.peak_gbps(n as u64 + 1) < cap {
            f.push(format!("{name}: R({}) also fits", n + 1));
        }
        splits.push(format!("{name} 1:{n}"));
    }
    let base = eval(&c.model, &c, "baseline").dimensions.access.subscribers_per_gpon;
    let uhdpp = eval(&c.model, &c, "UHD++").dimensions.access.subscribers_per_gpon;
    if base != 128 {
        f.push(format!("baseline 1:{base}"));
    }
    if !(71..=79).contains(&uhdpp) {
        f.push(format!("UHD++ 1:{uhdpp}"));
    }
    verdict(splits.join(", "), f)
}

/// Scan `power` over a grid that brackets every multiple of `step` up to
/// `steps` of them, checking it is non-decreasing and only moves across a multiple.
fn staircase(label: &str, step: f64, steps: u32, power: impl Fn(f64) -> f64, f: &mut Vec<String>) -> usize {
    let mut grid: Vec<f64> = (0..=steps * 20).map(|i| step * i as f64 / 20.0).collect();
    for m in 1..=steps {
        let b = step * m as f64;
        grid.extend([b * (1.0 - 1e-9), b, b * (1.0 + 1e-9)]);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut jumps = 0;
    let mut prev = (grid[0], power(grid[0]));
    for &r in &grid[1..] {
        let p = power(r);
        if p < prev.1 {
            f.push(format!("{label}: power drops at {r}"));
            return jumps;
        }
        if p > prev.1 {
            jumps += 1;
            // Counts are ceilings of r / capacity, so they move only past a multiple in [prev, r).
            let multiple = (prev.0 / step).ceil() * step;
            if multiple >= r {
                f.push(format!("{label}: step between {} and {r} crosses no multiple of {step}", prev.0));
                return jumps;
            }
        }
        prev = (r, p);
    }
    jumps
}

fn a9() -> Outcome {
    let catalog = EquipmentCatalog::default();
    let wdm = WdmProfile::default();
    let factors = GlobalFactors::default();
    let route = LonghaulRoute::default();
    let cdn = CdnConfig::default();
    let mut f = Vec::new();
    let mut counts = Vec::new();

    let core_cap = catalog.core_router_module.capacity_gbps();
    counts.push(staircase("core", core_cap, 8, |r| core_node_power(r, &catalog, &factors).power_w, &mut f));
    let edge_cap = catalog.edge_router_module.capacity_gbps();
    counts.push(staircase("edge", edge_cap, 8, |r| edge_node_power(r, &catalog, &factors).power_w, &mut f));
    counts.push(staircase("wdm", wdm.channel_capacity, 8, |r| wdm_link_power(r, 480.0, &wdm, &factors).power_w, &mut f));
    counts.push(staircase(
        "submarine",
        route.channel_capacity,
        8,
        |r| dimension_longhaul(r, &route, &catalog, &wdm, &factors).submarine_power_w,
        &mut f,
    ));
    // Transit routers step at 560, WDM and submarine channels at 40.
    let common_step = 40.0;
    counts.push(staircase(
        "longhaul",
        common_step,
        60,
        |r| dimension_longhaul(r, &route, &catalog, &wdm, &factors).power_w,
        &mut f,
    ));
    // CDN steps on its margin-inflated served rate.
    let served = |peak: f64| peak / (factors.alpha_t * cdn.cdn_fraction);
    counts.push(staircase(
        "cdn",
        10.0,
        60,
        |peak| dimension_cdn(Some(served(peak)), cdn.cdn_fraction, &cdn, &catalog, &factors).power_w,
        &mut f,
    ));
    // Access uplinks step on the OLT peak with the split held at its maximum.
    let territory = Territory::default();
    let layout = OltLayout::default();
    let ge = catalog.ge_port.capacity_gbps();
    counts.push(staircase(
        "access",
        ge,
        6,
        |peak| {
            let mbps = 1000.0 * peak / factors.alpha_t;
            let demand = move |n: u64| if n <= 128 { 1.0 } else { mbps.max(1.0) };
            dimension_access(&territory, &layout, &demand, &catalog, &factors).unwrap().power_w
        },
        &mut f,
    ));
    if counts.contains(&0) {
        f.push(format!("a segment never stepped: {counts:?}"));
    }
    verdict(format!("steps seen {counts:?}"), f)
}

fn a10() -> Outcome {
    let c = config();
    let run = || ReportDocument::new(&c.baseline, suite(&c.model, &c)).unwrap().to_json();
    let (first, second) = (run(), run());
    let mut f = Vec::new();
    if first != second {
        f.push("in-process reports differ".into());
    }
    let cli = || {
        let out = Command::new(env!("CARGO_BIN_EXE_netpeak"))
            .args(["--format", "json", "run"])
            .args(SUITE.iter().flat_map(|s| ["-s", s]))
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let (a, b) = (cli(), cli());
    if a != b {
        f.push("CLI reports differ".into());
    }
    if a != first.as_bytes() {
        f.push("CLI report differs from library report".into());
    }
    verdict(format!("{} bytes identical across runs", first.len()), f)
}

fn uhd_cdn_row() -> Outcome {
    let c = config();
    let g = eval(&c.model, &c, "UHD").segments.cdn.energy_gwh;
    let mut f = Vec::new();
    in_range("UHD cdn", g, 8.0, 14.0, &mut f);
    verdict(format!("UHD cdn {g:.1} GWh"), f)
}

fn rv_sweep_deltas() -> Outcome {
    let c = config();
    let base = eval(&c.model, &c, "baseline");
    let template = c.scenario("HD").unwrap();
    let reports = c.model.sweep(template, "r_v", &[3.0, 5.0, 16.0, 27.0], &base).unwrap();
    let mut f = Vec::new();
    let mut seen = Vec::new();
    for (r, target) in reports.iter().zip([19.0, 34.0, 127.0, 257.0]) {
        let d = r.delta.as_ref().unwrap().delta_gwh;
        seen.push(format!("{d:.0}"));
        if !within(d, target, 0.2) {
            f.push(format!("{} {d:.1} vs {target}", r.scenario));
        }
    }
    verdict(format!("deltas {}", seen.join(" ")), f)
}

fn compare_baseline_uhd() -> Outcome {
    let c = config();
    let d = compare(eval(&c.model, &c, "baseline"), eval(&c.model, &c, "UHD"));
    let total = d.total.delta_gwh;
    if within(total, 127.0, 0.2) {
        Ok(format!("total {total:+.1} GWh"))
    } else {
        Err(format!("total {total:+.1} GWh vs +127"))
    }
}

fn main() -> ExitCode {
    let checks: [Check; 13] = [
        ("A1", "baseline ONU energy", a1),
        ("A2", "baseline segment row", a2),
        ("A3", "scenario ordering and deltas", a3),
        ("A4", "volumes and intensity", a4),
        ("A5", "submarine channel power", a5),
        ("A6", "home cache comparison", a6),
        ("A7", "quantile suite", a7),
        ("A8", "GPON split certificates", a8),
        ("A9", "dimensioning staircases", a9),
        ("A10", "determinism", a10),
        ("E1", "UHD CDN row", uhd_cdn_row),
        ("E2", "r_v sweep deltas", rv_sweep_deltas),
        ("E3", "compare baseline UHD", compare_baseline_uhd),
    ];
    let mut failed = 0;
    for (id, title, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {title}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
