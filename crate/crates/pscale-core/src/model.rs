//! Cycle-model strategies behind a common trait.
//!
//! Two interchangeable models produce per-layer reports: the closed-form
//! analytical mapping (`analytical`, the default) and the cycle-stepping
//! reference simulator (`reference`, exposed for debugging and only valid on
//! small instances). Models are registered by name and selected via config
//! or the CLI.

use crate::dataflow::{plan_folds, ws_cycles, ws_utilization, LayerReport};
use crate::error::Result;
use crate::memory::{demand_traffic, dram_traffic, BufferConfig, MemoryTraffic};
use crate::refsim::simulate_ws_reference;
use crate::topology::{effective_dims, GridTopology};
use crate::workload::LayerShape;

/// Everything a model needs besides the (layer, topology) pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalContext {
    pub interposer_delay: u64,
    pub buffers: BufferConfig,
}

/// A strategy that maps one layer onto one grid and reports cycles,
/// utilization, and traffic.
pub trait CycleModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(
        &self,
        layer: &LayerShape,
        topo: &GridTopology,
        ctx: &EvalContext,
    ) -> Result<LayerReport>;
}

/// Closed-form weight-stationary mapping model.
pub struct AnalyticalWs;

impl CycleModel for AnalyticalWs {
    fn name(&self) -> &'static str {
        "analytical"
    }

    fn evaluate(
        &self,
        layer: &LayerShape,
        topo: &GridTopology,
        ctx: &EvalContext,
    ) -> Result<LayerReport> {
        let (ar, ac) = effective_dims(topo);
        let plan = plan_folds(layer, ar, ac, ctx.interposer_delay);
        let cycles = ws_cycles(&plan)?;
        let utilization = ws_utilization(&plan, cycles, ar, ac)?;
        let traffic = demand_traffic(&plan)?;
        let dram = dram_traffic(&plan, layer, &traffic, &ctx.buffers)?;
        Ok(LayerReport {
            layer: layer.name.clone(),
            sr: plan.sr,
            sc: plan.sc,
            t: plan.t,
            row_folds: plan.row_folds,
            col_folds: plan.col_folds,
            ar,
            ac,
            cycles,
            useful_macs: plan.sr * plan.sc * plan.t,
            utilization,
            traffic,
            dram,
        })
    }
}

/// Cycle-stepping oracle wrapped as a model; refuses large instances.
pub struct ReferenceSim;

impl CycleModel for ReferenceSim {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn evaluate(
        &self,
        layer: &LayerShape,
        topo: &GridTopology,
        ctx: &EvalContext,
    ) -> Result<LayerReport> {
        let (ar, ac) = effective_dims(topo);
        let sim = simulate_ws_reference(layer, ar, ac, ctx.interposer_delay)?;
        let plan = plan_folds(layer, ar, ac, ctx.interposer_delay);
        let traffic = MemoryTraffic {
            ifmap_reads: sim.ifmap_reads,
            filter_reads: sim.filter_reads,
            psum_reads: sim.psum_reads,
            ofmap_writes: sim.ofmap_writes,
        };
        let dram = dram_traffic(&plan, layer, &traffic, &ctx.buffers)?;
        let slots = sim.cycles * ar * ac;
        Ok(LayerReport {
            layer: layer.name.clone(),
            sr: plan.sr,
            sc: plan.sc,
            t: plan.t,
            row_folds: plan.row_folds,
            col_folds: plan.col_folds,
            ar,
            ac,
            cycles: sim.cycles,
            useful_macs: sim.useful_mac_events,
            utilization: sim.useful_mac_events as f64 / slots as f64,
            traffic,
            dram,
        })
    }
}

pub const MODEL_NAMES: [&str; 2] = ["analytical", "reference"];

/// Looks up a registered cycle model by name.
pub fn cycle_model(name: &str) -> Result<Box<dyn CycleModel>> {
    match name {
        "analytical" => Ok(Box::new(AnalyticalWs)),
        "reference" | "oracle" => Ok(Box::new(ReferenceSim)),
        _ => Err(crate::error::Error::NotFound(format!(
            "cycle model `{name}` (available: {})",
            MODEL_NAMES.join(", ")
        ))),
    }
}
