//! Analytical weight-stationary mapping model.
//!
//! A layer maps onto the effective array with the flattened convolution
//! window `SR = R*S*C` along the rows (one weight column per output filter)
//! and the filter count `M` along the columns; the `T = E*F` output pixels
//! stream through. When `SR` or `M` exceeds the array dimension the layer is
//! decomposed into folds that execute strictly sequentially.
//!
//! Per-fold timing is the standard weight-stationary systolic pipeline:
//! `r` preload cycles (one array row per cycle), `t` streamed input vectors,
//! `r - 1` skew-fill cycles and `c - 1` drain cycles, i.e.
//! `2r + c + t - 2` cycles for an `r x c` fold. The cycle-accurate reference
//! simulator in [`crate::refsim`] reproduces this timing event by event and
//! is the arbiter of self-consistency.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::memory::MemoryTraffic;
use crate::workload::{layer_macs, ofmap_dims, LayerShape};

/// Row/column fold decomposition of one layer on an `ar x ac` array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    /// Flattened window size `R*S*C`, mapped along array rows.
    pub sr: u64,
    /// Filter count `M`, mapped along array columns.
    pub sc: u64,
    /// OFMAP pixels `E*F` streamed per fold.
    pub t: u64,
    pub row_folds: u64,
    pub col_folds: u64,
    /// Row occupancy per fold; all `ar` except a possibly partial last entry.
    pub row_sizes: Vec<u64>,
    pub col_sizes: Vec<u64>,
    /// Idle cycles inserted at each fold boundary.
    pub interposer_delay: u64,
}

/// Splits `total` lanes into chunks of at most `cap`.
fn fold_sizes(total: u64, cap: u64) -> Vec<u64> {
    let mut sizes = Vec::with_capacity(total.div_ceil(cap) as usize);
    let mut rem = total;
    while rem > 0 {
        let take = rem.min(cap);
        sizes.push(take);
        rem -= take;
    }
    sizes
}

pub fn plan_folds(layer: &LayerShape, ar: u64, ac: u64, interposer_delay: u64) -> FoldPlan {
    debug_assert!(ar >= 1 && ac >= 1);
    let sr = layer.filt_h * layer.filt_w * layer.channels;
    let sc = layer.num_filters;
    let (e, f) = ofmap_dims(layer);
    let row_sizes = fold_sizes(sr, ar);
    let col_sizes = fold_sizes(sc, ac);
    FoldPlan {
        sr,
        sc,
        t: e * f,
        row_folds: row_sizes.len() as u64,
        col_folds: col_sizes.len() as u64,
        row_sizes,
        col_sizes,
        interposer_delay,
    }
}

/// Total cycles: `sum over folds (i,j) of [2*r_i + c_j + t - 2]` plus the
/// interposer delay at each of the `row_folds*col_folds - 1` fold boundaries.
pub fn ws_cycles(plan: &FoldPlan) -> Result<u64> {
    let rf = plan.row_folds as i128;
    let cf = plan.col_folds as i128;
    let folds = rf * cf;
    // Closed form of the double sum; equals the explicit per-fold iteration.
    let total: i128 = 2 * cf * plan.sr as i128
        + rf * plan.sc as i128
        + folds * (plan.t as i128 - 2)
        + (folds - 1) * plan.interposer_delay as i128;
    u64::try_from(total).map_err(|_| Error::Overflow("weight-stationary cycle count"))
}

/// Fraction of lane-cycle slots doing productive MACs:
/// `(sr*sc*t) / (cycles * ar * ac)`.
pub fn ws_utilization(plan: &FoldPlan, cycles: u64, ar: u64, ac: u64) -> Result<f64> {
    let useful = plan
        .sr
        .checked_mul(plan.sc)
        .and_then(|v| v.checked_mul(plan.t))
        .ok_or(Error::Overflow("useful MAC count"))?;
    let slots = cycles
        .checked_mul(ar)
        .and_then(|v| v.checked_mul(ac))
        .ok_or(Error::Overflow("lane-cycle slots"))?;
    if slots == 0 {
        return Err(Error::DivisionByZero("utilization denominator"));
    }
    Ok(useful as f64 / slots as f64)
}

/// Cycle, utilization, and traffic summary for one (layer, topology) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub layer: String,
    pub sr: u64,
    pub sc: u64,
    pub t: u64,
    pub row_folds: u64,
    pub col_folds: u64,
    /// Effective array dimensions the layer was mapped onto.
    pub ar: u64,
    pub ac: u64,
    pub cycles: u64,
    pub useful_macs: u64,
    pub utilization: f64,
    /// SRAM-level demand accesses.
    pub traffic: MemoryTraffic,
    /// Projected DRAM accesses under the configured buffers.
    pub dram: MemoryTraffic,
}

impl LayerReport {
    /// Lane-cycle slots, the utilization denominator.
    pub fn lane_slots(&self) -> u64 {
        self.cycles * self.ar * self.ac
    }
}

/// Cycles/utilization for a layer on an effective array, via the fold plan.
pub fn evaluate_layer(
    layer: &LayerShape,
    ar: u64,
    ac: u64,
    interposer_delay: u64,
) -> Result<(FoldPlan, u64, f64)> {
    let plan = plan_folds(layer, ar, ac, interposer_delay);
    let cycles = ws_cycles(&plan)?;
    let utilization = ws_utilization(&plan, cycles, ar, ac)?;
    debug_assert_eq!(plan.sr * plan.sc * plan.t, layer_macs(layer)?);
    Ok((plan, cycles, utilization))
}
