//! Design-space sweep orchestration: workloads x PE counts x grid aspect
//! ratios, with utilization-wall and symmetric-grid-rule detection over the
//! assembled results.
//!
//! (workload, pe_count, topology) triples are embarrassingly parallel work
//! units; results are gathered into a canonical order (config order,
//! ascending PE counts, divisor order) before any serialization, so parallel
//! and sequential execution produce identical output.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::SweepConfig;
use crate::dataflow::LayerReport;
use crate::error::{Error, Result};
use crate::memory::{aggregate_traffic, MemoryTraffic};
use crate::metrics::{
    best_topology, scaling_efficiency, workload_utilization, Criterion, ScalingPoint, Weighting,
};
use crate::model::{cycle_model, EvalContext};
use crate::optics::laser_energy_j;
use crate::topology::{enumerate_topologies, GridTopology};
use crate::workload::{presets, Workload};

/// One workload on one topology: per-layer reports plus totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyEval {
    pub topology: GridTopology,
    pub layers: Vec<LayerReport>,
    pub total_cycles: u64,
    pub useful_macs: u64,
    pub traffic: MemoryTraffic,
    pub dram: MemoryTraffic,
    pub util_mac_weighted: f64,
    pub util_layer_mean: f64,
    pub laser_energy_j: f64,
}

/// All topologies of one workload at one PE count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleResult {
    pub pe_count: u64,
    pub evals: Vec<TopologyEval>,
    /// Fewest total cycles, ties toward symmetry.
    pub best: GridTopology,
}

/// Scaling-efficiency observation, anchored at the smallest PE count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaPoint {
    pub pe_count: u64,
    pub total_cycles: u64,
    pub eta: f64,
    pub best_avg_util: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkloadResult {
    pub workload: String,
    pub scales: Vec<ScaleResult>,
    /// One point per PE count; eta of the base point is 1 by definition.
    pub eta: Vec<EtaPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub workloads: Vec<WorkloadResult>,
}

impl SweepResult {
    pub fn workload(&self, name: &str) -> Result<&WorkloadResult> {
        self.workloads
            .iter()
            .find(|w| w.workload == name)
            .ok_or_else(|| Error::NotFound(format!("workload `{name}` in sweep result")))
    }
}

impl TopologyEval {
    /// Builds the per-topology totals from finished layer reports. Also used
    /// when re-deriving summaries from persisted per-layer tables, so both
    /// paths aggregate identically.
    pub(crate) fn assemble(
        topology: GridTopology,
        layers: Vec<LayerReport>,
        laser: &crate::optics::LaserParams,
    ) -> Result<TopologyEval> {
        let total_cycles = layers
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.cycles))
            .ok_or(Error::Overflow("workload cycle total"))?;
        let useful_macs = layers
            .iter()
            .try_fold(0u64, |acc, l| acc.checked_add(l.useful_macs))
            .ok_or(Error::Overflow("workload MAC total"))?;
        let traffic = aggregate_traffic(&layers.iter().map(|l| l.traffic).collect::<Vec<_>>())?;
        let dram = aggregate_traffic(&layers.iter().map(|l| l.dram).collect::<Vec<_>>())?;
        let util_mac_weighted = workload_utilization(&layers, Weighting::MacWeighted)?;
        let util_layer_mean = workload_utilization(&layers, Weighting::LayerMean)?;
        let energy = laser_energy_j(total_cycles, laser);
        Ok(TopologyEval {
            topology,
            layers,
            total_cycles,
            useful_macs,
            traffic,
            dram,
            util_mac_weighted,
            util_layer_mean,
            laser_energy_j: energy,
        })
    }
}

fn eval_topology(
    workload: &Workload,
    topo: GridTopology,
    ctx: &EvalContext,
    model: &dyn crate::model::CycleModel,
    laser: &crate::optics::LaserParams,
) -> Result<TopologyEval> {
    let mut layers = Vec::with_capacity(workload.layers.len());
    for layer in &workload.layers {
        layers.push(model.evaluate(layer, &topo, ctx)?);
    }
    TopologyEval::assemble(topo, layers, laser)
}

/// Runs the full sweep; work units evaluate in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, true)
}

/// Same result as [`run_sweep`] with parallelism disabled; the two paths
/// must be indistinguishable.
pub fn run_sweep_sequential(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, false)
}

fn run_sweep_with(config: &SweepConfig, parallel: bool) -> Result<SweepResult> {
    config.validate()?;
    let model = cycle_model(&config.model)?;
    let ctx = EvalContext {
        interposer_delay: config.interposer_delay,
        buffers: config.buffers,
    };

    let workloads: Vec<Workload> = config
        .workloads
        .iter()
        .map(|spec| presets::load(spec))
        .collect::<Result<_>>()?;

    // Flatten into canonical work-unit order.
    let mut units: Vec<(usize, u64, GridTopology)> = Vec::new();
    for (wi, _) in workloads.iter().enumerate() {
        for &pe in &config.pe_counts {
            for topo in enumerate_topologies(pe, config.tile_dim) {
                units.push((wi, pe, topo));
            }
        }
    }

    let evaluate = |&(wi, _pe, topo): &(usize, u64, GridTopology)| -> Result<TopologyEval> {
        eval_topology(&workloads[wi], topo, &ctx, model.as_ref(), &config.laser)
    };
    let evaluated: Vec<TopologyEval> = if parallel {
        units.par_iter().map(evaluate).collect::<Result<_>>()?
    } else {
        units.iter().map(evaluate).collect::<Result<_>>()?
    };

    // Regroup in canonical order.
    let mut result_workloads = Vec::with_capacity(workloads.len());
    let mut cursor = 0usize;
    for workload in &workloads {
        let mut scales = Vec::with_capacity(config.pe_counts.len());
        for &pe in &config.pe_counts {
            let count = enumerate_topologies(pe, config.tile_dim).len();
            let evals = evaluated[cursor..cursor + count].to_vec();
            cursor += count;
            let points: Vec<(GridTopology, u64, f64)> = evals
                .iter()
                .map(|e| (e.topology, e.total_cycles, e.util_mac_weighted))
                .collect();
            let best = best_topology(&points, Criterion::MinCycles)?;
            scales.push(ScaleResult {
                pe_count: pe,
                evals,
                best,
            });
        }
        let eta = eta_table(&scales)?;
        result_workloads.push(WorkloadResult {
            workload: workload.name.clone(),
            scales,
            eta,
        });
    }

    Ok(SweepResult {
        config: config.clone(),
        workloads: result_workloads,
    })
}

pub(crate) fn best_eval(scale: &ScaleResult) -> &TopologyEval {
    scale
        .evals
        .iter()
        .find(|e| e.topology == scale.best)
        .expect("best topology always comes from the evaluated set")
}

/// Eta per PE count anchored at the smallest, using each scale's
/// best-topology cycle count.
pub(crate) fn eta_table(scales: &[ScaleResult]) -> Result<Vec<EtaPoint>> {
    let base_scale = scales
        .first()
        .ok_or(Error::EmptyInput("eta over no scales"))?;
    let base = ScalingPoint {
        pe_count: base_scale.pe_count,
        total_cycles: best_eval(base_scale).total_cycles,
        avg_utilization: best_eval(base_scale).util_mac_weighted,
    };
    let mut table = Vec::with_capacity(scales.len());
    for scale in scales {
        let best = best_eval(scale);
        let eta = if scale.pe_count == base.pe_count {
            1.0
        } else {
            scaling_efficiency(
                &base,
                &ScalingPoint {
                    pe_count: scale.pe_count,
                    total_cycles: best.total_cycles,
                    avg_utilization: best.util_mac_weighted,
                },
            )?
        };
        table.push(EtaPoint {
            pe_count: scale.pe_count,
            total_cycles: best.total_cycles,
            eta,
            best_avg_util: best.util_mac_weighted,
        });
    }
    Ok(table)
}

/// Scaling-efficiency decline annotated with the first PE count whose eta
/// drops below the configured threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilizationWall {
    pub points: Vec<EtaPoint>,
    /// First PE count with `eta < threshold`, if any.
    pub flagged_at: Option<u64>,
}

pub fn detect_utilization_wall(
    result: &SweepResult,
    workload: &str,
    threshold: f64,
) -> Result<UtilizationWall> {
    let wl = result.workload(workload)?;
    if wl.eta.len() < 2 {
        return Err(Error::EmptyInput(
            "utilization wall needs at least two PE counts",
        ));
    }
    let flagged_at = wl
        .eta
        .iter()
        .find(|p| p.eta < threshold)
        .map(|p| p.pe_count);
    Ok(UtilizationWall {
        points: wl.eta.clone(),
        flagged_at,
    })
}

/// Best topology against the worse linear extreme at one PE count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricRule {
    pub pe_count: u64,
    pub best: GridTopology,
    /// Best avg utilization over the worse linear topology's.
    pub util_ratio: f64,
    /// Worse linear topology's total demand traffic over the best's.
    pub traffic_ratio: f64,
}

pub fn detect_symmetric_rule(
    result: &SweepResult,
    workload: &str,
    pe_count: u64,
) -> Result<SymmetricRule> {
    let wl = result.workload(workload)?;
    let scale = wl
        .scales
        .iter()
        .find(|s| s.pe_count == pe_count)
        .ok_or_else(|| Error::NotFound(format!("PE count {pe_count} in sweep result")))?;
    let best = best_eval(scale);
    let linears: Vec<&TopologyEval> = scale
        .evals
        .iter()
        .filter(|e| e.topology.pe_rows == 1 || e.topology.pe_cols == 1)
        .collect();
    let worst_util = linears
        .iter()
        .map(|e| e.util_mac_weighted)
        .fold(f64::INFINITY, f64::min);
    let worst_traffic = linears.iter().map(|e| e.traffic.total()).max().unwrap_or(0);
    if worst_util == 0.0 || best.traffic.total() == 0 {
        return Err(Error::DivisionByZero("symmetric rule ratios"));
    }
    Ok(SymmetricRule {
        pe_count,
        best: scale.best,
        util_ratio: best.util_mac_weighted / worst_util,
        traffic_ratio: worst_traffic as f64 / best.traffic.total() as f64,
    })
}
