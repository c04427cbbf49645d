//! Demand access counting (SRAM level) and a threshold buffer model
//! projecting DRAM traffic.
//!
//! The SRAM demand counts follow directly from the fold schedule. The DRAM
//! projection is deliberately a two-branch threshold policy rather than a
//! trace-driven cache: per operand class, either the full working set fits
//! in its SRAM (each element crosses the chip boundary once) or it does not
//! (every demand access streams from DRAM). The two branches bracket any
//! real buffer behavior and keep every reported number auditable.

use serde::Serialize;

use crate::dataflow::FoldPlan;
use crate::error::{Error, Result};
use crate::workload::{ofmap_dims, LayerShape};

/// Access counts split by operand class. Partial-sum read-backs traverse the
/// ofmap SRAM and are tracked separately from first-pass writes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MemoryTraffic {
    pub ifmap_reads: u64,
    pub filter_reads: u64,
    pub psum_reads: u64,
    pub ofmap_writes: u64,
}

impl MemoryTraffic {
    pub fn total(&self) -> u64 {
        self.ifmap_reads + self.filter_reads + self.psum_reads + self.ofmap_writes
    }

    pub fn checked_add(&self, other: &MemoryTraffic) -> Result<MemoryTraffic> {
        let add = |a: u64, b: u64| a.checked_add(b).ok_or(Error::Overflow("traffic sum"));
        Ok(MemoryTraffic {
            ifmap_reads: add(self.ifmap_reads, other.ifmap_reads)?,
            filter_reads: add(self.filter_reads, other.filter_reads)?,
            psum_reads: add(self.psum_reads, other.psum_reads)?,
            ofmap_writes: add(self.ofmap_writes, other.ofmap_writes)?,
        })
    }
}

/// Per-operand-class SRAM capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct BufferConfig {
    pub ifmap_sram_bytes: u64,
    pub filter_sram_bytes: u64,
    pub ofmap_sram_bytes: u64,
    pub word_bytes: u64,
}

impl Default for BufferConfig {
    fn default() -> Self {
        // Traffic counts stay element counts at word_bytes = 1.
        BufferConfig {
            ifmap_sram_bytes: 1 << 20,
            filter_sram_bytes: 1 << 20,
            ofmap_sram_bytes: 1 << 20,
            word_bytes: 1,
        }
    }
}

impl BufferConfig {
    pub fn validate(&self) -> Result<()> {
        if self.word_bytes == 0 {
            return Err(Error::Config(vec!["word_bytes must be >= 1".into()]));
        }
        for (label, v) in [
            ("ifmap_sram_bytes", self.ifmap_sram_bytes),
            ("filter_sram_bytes", self.filter_sram_bytes),
            ("ofmap_sram_bytes", self.ofmap_sram_bytes),
        ] {
            if v < self.word_bytes {
                return Err(Error::Config(vec![format!(
                    "{label} must hold at least one word ({} bytes)",
                    self.word_bytes
                )]));
            }
        }
        Ok(())
    }
}

/// SRAM-level demand accesses implied by a fold plan.
///
/// One ifmap read feeds every active column of a fold (passive fanout), each
/// weight loads once per fold it participates in, partials are written at
/// every row-fold drain and read back on every row fold after the first.
pub fn demand_traffic(plan: &FoldPlan) -> Result<MemoryTraffic> {
    let mul3 = |a: u64, b: u64, c: u64, what: &'static str| {
        a.checked_mul(b)
            .and_then(|v| v.checked_mul(c))
            .ok_or(Error::Overflow(what))
    };
    Ok(MemoryTraffic {
        ifmap_reads: mul3(plan.col_folds, plan.t, plan.sr, "ifmap demand reads")?,
        filter_reads: plan
            .sr
            .checked_mul(plan.sc)
            .ok_or(Error::Overflow("filter demand reads"))?,
        psum_reads: mul3(plan.row_folds - 1, plan.t, plan.sc, "psum demand reads")?,
        ofmap_writes: mul3(plan.row_folds, plan.t, plan.sc, "ofmap demand writes")?,
    })
}

/// Unique element counts per operand class (padded ifmap, filters, ofmap).
pub fn working_sets(layer: &LayerShape) -> (u64, u64, u64) {
    let (e, f) = ofmap_dims(layer);
    let padded_h = layer.ifmap_h + 2 * layer.padding;
    let padded_w = layer.ifmap_w + 2 * layer.padding;
    let ifmap = padded_h * padded_w * layer.channels;
    let filter = layer.filt_h * layer.filt_w * layer.channels * layer.num_filters;
    let ofmap = e * f * layer.num_filters;
    (ifmap, filter, ofmap)
}

/// Projects DRAM traffic from SRAM demand under the threshold policy.
///
/// Per operand class: if the working set fits its SRAM, DRAM traffic is the
/// working-set size; otherwise every demand access streams from DRAM.
/// Partial sums belong to the ofmap class and hit DRAM only in the no-fit
/// case.
pub fn dram_traffic(
    plan: &FoldPlan,
    layer: &LayerShape,
    demand: &MemoryTraffic,
    buf: &BufferConfig,
) -> Result<MemoryTraffic> {
    buf.validate()?;
    debug_assert_eq!(*demand, demand_traffic(plan)?);
    let (ifmap_ws, filter_ws, ofmap_ws) = working_sets(layer);
    let fits = |ws: u64, sram: u64| (ws as u128) * (buf.word_bytes as u128) <= sram as u128;
    let ifmap_fits = fits(ifmap_ws, buf.ifmap_sram_bytes);
    let filter_fits = fits(filter_ws, buf.filter_sram_bytes);
    let ofmap_fits = fits(ofmap_ws, buf.ofmap_sram_bytes);
    Ok(MemoryTraffic {
        ifmap_reads: if ifmap_fits {
            ifmap_ws
        } else {
            demand.ifmap_reads
        },
        filter_reads: if filter_fits {
            filter_ws
        } else {
            demand.filter_reads
        },
        psum_reads: if ofmap_fits { 0 } else { demand.psum_reads },
        ofmap_writes: if ofmap_fits {
            ofmap_ws
        } else {
            demand.ofmap_writes
        },
    })
}

/// Component-wise sum over per-layer traffic.
pub fn aggregate_traffic(reports: &[MemoryTraffic]) -> Result<MemoryTraffic> {
    reports
        .iter()
        .try_fold(MemoryTraffic::default(), |acc, t| acc.checked_add(t))
}
