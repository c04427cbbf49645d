//! Acceptance suite: one test per criterion, each printing a PASS line on
//! success. Published arithmetic anchors are checked exactly; model-level
//! claims are checked as oracle equivalence or ordering properties.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::time::Instant;

use rayon::prelude::*;

use pscale_core::config::SweepConfig;
use pscale_core::dataflow::{plan_folds, ws_cycles, ws_utilization};
use pscale_core::memory::demand_traffic;
use pscale_core::metrics::{effective_metrics, scaling_efficiency, ArchProfile, ScalingPoint};
use pscale_core::optics::{
    fanout_loss_db, laser_energy_j, link_feasible, mesh_loss_db, LaserParams, OpticalParams,
};
use pscale_core::refsim::simulate_ws_reference;
use pscale_core::report::{rederive, write_bundle, BUNDLE_FILES};
use pscale_core::sweep::{detect_symmetric_rule, detect_utilization_wall, run_sweep};
use pscale_core::workload::{layer_macs, LayerShape};

fn pass(id: u32, detail: &str) {
    println!("acceptance criterion {id:2}: PASS: {detail}");
}

#[allow(clippy::too_many_arguments)]
fn layer(h: u64, w: u64, r: u64, s: u64, c: u64, m: u64, stride: u64, p: u64) -> LayerShape {
    LayerShape {
        name: format!("h{h}w{w}r{r}s{s}c{c}m{m}st{stride}p{p}"),
        ifmap_h: h,
        ifmap_w: w,
        filt_h: r,
        filt_w: s,
        channels: c,
        num_filters: m,
        stride,
        padding: p,
    }
}

fn fresh_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pscale_acceptance_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

/// Every valid layer in the small-instance domain:
/// H,W <= 6, R,S <= 3, C <= 3, M <= 6, stride in {1,2}, padding in {0,1}.
fn small_instance_layers() -> Vec<LayerShape> {
    let mut layers = Vec::new();
    for h in 1..=6 {
        for w in 1..=6 {
            for r in 1..=3 {
                for s in 1..=3 {
                    for c in 1..=3 {
                        for m in 1..=6 {
                            for stride in [1, 2] {
                                for p in [0, 1] {
                                    let l = layer(h, w, r, s, c, m, stride, p);
                                    if l.validate().is_ok() {
                                        layers.push(l);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    layers
}

/// Counts MACs the slow way: every window position times every weight.
fn brute_force_conv_macs(l: &LayerShape) -> u64 {
    let padded_h = l.ifmap_h + 2 * l.padding;
    let padded_w = l.ifmap_w + 2 * l.padding;
    let mut macs = 0u64;
    let mut y = 0;
    while y + l.filt_h <= padded_h {
        let mut x = 0;
        while x + l.filt_w <= padded_w {
            for _rr in 0..l.filt_h {
                for _ss in 0..l.filt_w {
                    for _cc in 0..l.channels {
                        for _mm in 0..l.num_filters {
                            macs += 1;
                        }
                    }
                }
            }
            x += l.stride;
        }
        y += l.stride;
    }
    macs
}

#[test]
fn ac01_scaling_efficiency_anchor() {
    let base = ScalingPoint {
        pe_count: 128,
        total_cycles: 773_000,
        avg_utilization: 0.85,
    };
    let scaled = ScalingPoint {
        pe_count: 1024,
        total_cycles: 159_000,
        avg_utilization: 0.52,
    };
    let eta = scaling_efficiency(&base, &scaled).unwrap();
    assert!(
        (0.60..=0.61).contains(&eta),
        "eta {eta} outside [0.60, 0.61]"
    );
    pass(
        1,
        &format!("eta(7.73e5 @128 -> 1.59e5 @1024) = {eta:.4} in [0.60, 0.61]"),
    );
}

#[test]
fn ac02_fanout_losses() {
    let four = fanout_loss_db(4);
    let sixteen = fanout_loss_db(16);
    assert!((four - 6.02).abs() <= 0.01, "fanout(4) = {four}");
    assert!((sixteen - 12.04).abs() <= 0.01, "fanout(16) = {sixteen}");
    pass(
        2,
        &format!("fanout(4) = {four:.4} dB, fanout(16) = {sixteen:.4} dB"),
    );
}

#[test]
fn ac03_mesh_loss_and_feasibility() {
    let p = OpticalParams::default(); // 0.4 dB/MZI, 15 dB budget
    let mesh16 = mesh_loss_db(16, &p);
    assert!((6.3..=6.6).contains(&mesh16), "mesh(16) = {mesh16}");
    assert!(!link_feasible(16, &p), "16x16 must exceed the budget");
    assert!(link_feasible(4, &p), "4x4 must close the budget");
    pass(
        3,
        &format!(
            "mesh(16) = {mesh16:.2} dB in [6.3, 6.6]; feasible(16) = false, feasible(4) = true"
        ),
    );
}

#[test]
fn ac04_oracle_equivalence_exhaustive() {
    let start = Instant::now();
    let layers = small_instance_layers();
    let instances: u64 = layers
        .par_iter()
        .map(|l| {
            let mut checked = 0u64;
            for ar in 1..=8 {
                for ac in 1..=8 {
                    let sim = simulate_ws_reference(l, ar, ac, 0).unwrap();
                    let plan = plan_folds(l, ar, ac, 0);
                    let cycles = ws_cycles(&plan).unwrap();
                    let util = ws_utilization(&plan, cycles, ar, ac).unwrap();
                    let traffic = demand_traffic(&plan).unwrap();
                    assert_eq!(sim.cycles, cycles, "{l:?} on {ar}x{ac}");
                    assert_eq!(sim.useful_mac_events, plan.sr * plan.sc * plan.t, "{l:?}");
                    let sim_util = sim.useful_mac_events as f64 / (sim.cycles * ar * ac) as f64;
                    assert_eq!(sim_util, util, "{l:?} on {ar}x{ac}");
                    assert_eq!(sim.ifmap_reads, traffic.ifmap_reads, "{l:?} on {ar}x{ac}");
                    assert_eq!(sim.filter_reads, traffic.filter_reads, "{l:?} on {ar}x{ac}");
                    assert_eq!(sim.psum_reads, traffic.psum_reads, "{l:?} on {ar}x{ac}");
                    assert_eq!(sim.ofmap_writes, traffic.ofmap_writes, "{l:?} on {ar}x{ac}");
                    checked += 1;
                }
            }
            checked
        })
        .sum();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "oracle sweep took {elapsed:?}");
    pass(
        4,
        &format!(
            "analytical model == reference simulator on {instances} instances in {elapsed:.2?}"
        ),
    );
}

#[test]
fn ac05_symmetric_grid_rule() {
    let start = Instant::now();
    let config = SweepConfig {
        workloads: vec!["preset:alphagozero".into()],
        pe_counts: vec![512],
        ..SweepConfig::default()
    };
    let result = run_sweep(&config).unwrap();
    let rule = detect_symmetric_rule(&result, "alphagozero", 512).unwrap();
    assert!(
        rule.util_ratio >= 3.0,
        "utilization ratio {}",
        rule.util_ratio
    );
    assert!(
        rule.traffic_ratio >= 1.4,
        "traffic ratio {}",
        rule.traffic_ratio
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 30,
        "symmetric rule check took {elapsed:?}"
    );
    pass(
        5,
        &format!(
            "alphagozero @512: best {} beats worst linear {:.2}x on utilization, {:.2}x on traffic",
            rule.best.label(),
            rule.util_ratio,
            rule.traffic_ratio
        ),
    );
}

#[test]
fn ac06_utilization_wall() {
    let start = Instant::now();
    let config = SweepConfig {
        workloads: vec!["preset:googlenet".into()],
        pe_counts: vec![64, 128, 256, 512, 1024],
        ..SweepConfig::default()
    };
    let result = run_sweep(&config).unwrap();
    let wall = detect_utilization_wall(&result, "googlenet", 0.7).unwrap();
    let etas: Vec<f64> = wall.points.iter().map(|p| p.eta).collect();
    for pair in etas.windows(2) {
        assert!(
            pair[1] <= pair[0],
            "eta must be monotone non-increasing, got {etas:?}"
        );
    }
    let last = *etas.last().unwrap();
    assert!(last < 1.0, "eta(64->1024) = {last} must be sublinear");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "wall sweep took {elapsed:?}");
    pass(
        6,
        &format!("googlenet eta(64->N) = {etas:.4?}, monotone decline to {last:.4}"),
    );
}

#[test]
fn ac07_effective_metric_anchor() {
    let photonic = ArchProfile {
        name: "photonic".into(),
        energy_fj_per_op: 47.2,
        peak_tops_w: 21.2,
        baseline_eff: vec![],
    };
    let eff = effective_metrics(&photonic, 0.8715).unwrap();
    assert!((eff - 18.48).abs() <= 0.05, "eff {eff}");
    pass(
        7,
        &format!("21.2 TOPS/W x 0.8715 = {eff:.4} within 18.48 +/- 0.05"),
    );
}

#[test]
fn ac08_laser_energy_linearity() {
    let params = [
        LaserParams {
            laser_power_w: 1.0,
            cycle_time_s: 1e-9,
        },
        LaserParams {
            laser_power_w: 0.35,
            cycle_time_s: 7.7e-10,
        },
        LaserParams {
            laser_power_w: 12.5,
            cycle_time_s: 2.5e-10,
        },
    ];
    for lp in &params {
        for k in [1u64, 2, 3, 10, 999, 123_456, 987_654_321] {
            assert_eq!(
                laser_energy_j(2 * k, lp),
                2.0 * laser_energy_j(k, lp),
                "k = {k}, params {lp:?}"
            );
        }
    }
    pass(
        8,
        "laser_energy(2k) == 2 * laser_energy(k) exactly across parameter sets",
    );
}

#[test]
fn ac09_determinism_and_round_trip() {
    let dir = fresh_dir("determinism");
    let config = SweepConfig {
        workloads: vec!["preset:alphagozero".into(), "preset:resnet18".into()],
        pe_counts: vec![64, 128],
        output_dir: dir.clone(),
        ..SweepConfig::default()
    };

    // Run the identical config twice, snapshotting the bundle in between.
    let result_a = run_sweep(&config).unwrap();
    write_bundle(&result_a).unwrap();
    let snapshot: Vec<(&str, Vec<u8>)> = BUNDLE_FILES
        .iter()
        .map(|name| (*name, std::fs::read(dir.join(name)).unwrap()))
        .collect();

    let result_b = run_sweep(&config).unwrap();
    assert_eq!(result_a, result_b, "in-memory results must be identical");
    write_bundle(&result_b).unwrap();
    for (name, bytes_a) in &snapshot {
        let bytes_b = std::fs::read(dir.join(name)).unwrap();
        assert_eq!(bytes_a, &bytes_b, "{name} not byte-identical across runs");
    }

    let (echo, rederived) = rederive(&dir).unwrap();
    assert_eq!(echo, config);
    assert_eq!(
        rederived, result_a.workloads,
        "re-derived summaries must match in-memory"
    );

    pass(
        9,
        "byte-identical bundles across identical runs; re-derivation reproduces summaries exactly",
    );
}

#[test]
fn ac10_mac_conservation() {
    let layers = small_instance_layers();
    let total: u64 = layers
        .par_iter()
        .map(|l| {
            let brute = brute_force_conv_macs(l);
            assert_eq!(brute, layer_macs(l).unwrap(), "{l:?}");
            // Useful work must not depend on the array shape.
            for (ar, ac) in [(1, 1), (2, 7), (5, 3), (8, 8), (64, 2)] {
                let plan = plan_folds(l, ar, ac, 0);
                assert_eq!(plan.sr * plan.sc * plan.t, brute, "{l:?} on {ar}x{ac}");
            }
            for (ar, ac) in [(1, 4), (4, 4), (8, 3)] {
                let sim = simulate_ws_reference(l, ar, ac, 0).unwrap();
                assert_eq!(sim.useful_mac_events, brute, "{l:?} on {ar}x{ac}");
            }
            brute
        })
        .sum();
    pass(10, &format!(
        "useful MACs topology-invariant and equal to the 6-loop count over {} layers ({total} MACs)",
        layers.len()
    ));
}
