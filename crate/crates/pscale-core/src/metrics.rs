//! Derived system metrics: scaling efficiency, workload-average utilization,
//! effective TOPS/W, and best-topology selection.

use serde::Serialize;

use crate::dataflow::LayerReport;
use crate::error::{Error, Result};
use crate::topology::{symmetry_score, GridTopology};

/// One (PE count, total cycles) observation of a workload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub pe_count: u64,
    pub total_cycles: u64,
    pub avg_utilization: f64,
}

/// Scaling efficiency `eta = (T_base / T_scaled) / (N_scaled / N_base)`;
/// 1 means ideal linear scaling.
pub fn scaling_efficiency(base: &ScalingPoint, scaled: &ScalingPoint) -> Result<f64> {
    if base.pe_count >= scaled.pe_count {
        return Err(Error::Config(vec![format!(
            "scaling efficiency needs base PE count < scaled PE count, got {} >= {}",
            base.pe_count, scaled.pe_count
        )]));
    }
    if base.total_cycles == 0 || scaled.total_cycles == 0 {
        return Err(Error::DivisionByZero("scaling efficiency cycle counts"));
    }
    let speedup = base.total_cycles as f64 / scaled.total_cycles as f64;
    let hardware = scaled.pe_count as f64 / base.pe_count as f64;
    Ok(speedup / hardware)
}

/// How per-layer utilizations combine into a workload average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weighting {
    /// Total useful MACs over total lane-cycle slots (headline default).
    MacWeighted,
    /// Arithmetic mean of per-layer utilizations.
    LayerMean,
}

pub fn workload_utilization(reports: &[LayerReport], weighting: Weighting) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("workload utilization over no layers"));
    }
    match weighting {
        Weighting::MacWeighted => {
            let mut useful: u128 = 0;
            let mut slots: u128 = 0;
            for r in reports {
                useful += r.useful_macs as u128;
                slots += r.lane_slots() as u128;
            }
            if slots == 0 {
                return Err(Error::DivisionByZero("utilization lane slots"));
            }
            Ok(useful as f64 / slots as f64)
        }
        Weighting::LayerMean => {
            let sum: f64 = reports.iter().map(|r| r.utilization).sum();
            Ok(sum / reports.len() as f64)
        }
    }
}

/// Static published baseline for one accelerator class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchProfile {
    pub name: String,
    pub energy_fj_per_op: f64,
    pub peak_tops_w: f64,
    /// Published per-workload effective TOPS/W, keyed by preset name; absent
    /// for the photonic row, whose effective column is simulated.
    pub baseline_eff: Vec<(String, f64)>,
}

/// Effective TOPS/W at the achieved utilization: `peak * avg_utilization`.
pub fn effective_metrics(profile: &ArchProfile, avg_utilization: f64) -> Result<f64> {
    if !(avg_utilization > 0.0 && avg_utilization <= 1.0) {
        return Err(Error::Config(vec![format!(
            "avg_utilization must be in (0, 1], got {avg_utilization}"
        )]));
    }
    Ok(profile.peak_tops_w * avg_utilization)
}

const ARCH_PROFILE_WORKLOADS: [&str; 4] = ["alphagozero", "mobilenet", "googlenet", "resnet18"];

/// Baselines shipped with the crate (digital, analog, photonic).
pub fn arch_profiles() -> Vec<ArchProfile> {
    parse_arch_profiles(include_str!("../data/arch_profiles.csv"))
        .expect("embedded arch profile table is well-formed")
}

fn parse_arch_profiles(text: &str) -> Result<Vec<ArchProfile>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("arch,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 + ARCH_PROFILE_WORKLOADS.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected {} fields", 3 + ARCH_PROFILE_WORKLOADS.len()),
            });
        }
        let f64_at = |i: usize| -> Result<f64> {
            fields[i].parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("not a number: `{}`", fields[i]),
            })
        };
        let mut baseline_eff = Vec::new();
        for (w, field) in ARCH_PROFILE_WORKLOADS.iter().zip(&fields[3..]) {
            if !field.is_empty() {
                baseline_eff.push((
                    w.to_string(),
                    field.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("not a number: `{field}`"),
                    })?,
                ));
            }
        }
        out.push(ArchProfile {
            name: fields[0].to_string(),
            energy_fj_per_op: f64_at(1)?,
            peak_tops_w: f64_at(2)?,
            baseline_eff,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    MinCycles,
    MaxUtilization,
}

/// Selects the best topology among candidates sharing a PE count. Ties break
/// toward higher symmetry, then fewer PE rows.
pub fn best_topology(
    points: &[(GridTopology, u64, f64)],
    criterion: Criterion,
) -> Result<GridTopology> {
    let mut best: Option<&(GridTopology, u64, f64)> = None;
    for p in points {
        best = Some(match best {
            None => p,
            Some(b) => {
                let ordering = match criterion {
                    Criterion::MinCycles => p.1.cmp(&b.1).reverse(),
                    Criterion::MaxUtilization => {
                        p.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal)
                    }
                };
                let tie_break = ordering
                    .then_with(|| {
                        symmetry_score(&p.0)
                            .partial_cmp(&symmetry_score(&b.0))
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .then_with(|| b.0.pe_rows.cmp(&p.0.pe_rows));
                if tie_break == std::cmp::Ordering::Greater {
                    p
                } else {
                    b
                }
            }
        });
    }
    best.map(|p| p.0)
        .ok_or(Error::EmptyInput("best topology over no candidates"))
}
