//! Brute-force cycle-by-cycle weight-stationary array simulator.
//!
//! This is the correctness oracle for the analytical model on small
//! instances: it advances a discrete clock and counts every semantic event
//! (weight load, ifmap read, MAC firing, partial-sum read-back, ofmap write)
//! explicitly, with no reference to the closed-form cycle or traffic
//! expressions.
//!
//! Per fold the array behaves as a classic weight-stationary pipeline:
//! weights load one row per cycle, input elements enter the left edge with a
//! one-cycle-per-row skew and travel rightward one column per cycle, and the
//! column-accumulated result exits when the bottom active row fires. One
//! ifmap read feeds all active columns of a fold (passive optical fanout),
//! so reads are counted once per streamed element, not per column.

use crate::error::{Error, Result};
use crate::workload::{layer_macs, ofmap_dims, LayerShape};

/// Event counts from one simulated (layer, array) instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RefSimResult {
    pub cycles: u64,
    pub useful_mac_events: u64,
    pub ifmap_reads: u64,
    pub filter_reads: u64,
    pub psum_reads: u64,
    pub ofmap_writes: u64,
}

/// Runtime guards; instances beyond these are pointless to simulate.
const MAX_ARRAY_LANES: u64 = 4096;
const MAX_MACS: u64 = 10_000_000;

pub fn simulate_ws_reference(
    layer: &LayerShape,
    ar: u64,
    ac: u64,
    interposer_delay: u64,
) -> Result<RefSimResult> {
    layer.validate()?;
    if ar == 0 || ac == 0 || ar * ac > MAX_ARRAY_LANES {
        return Err(Error::InstanceTooLarge(format!(
            "array {ar}x{ac} exceeds {MAX_ARRAY_LANES} lanes"
        )));
    }
    let macs = layer_macs(layer)?;
    if macs > MAX_MACS {
        return Err(Error::InstanceTooLarge(format!(
            "{macs} MACs exceeds {MAX_MACS}"
        )));
    }

    let sr = layer.filt_h * layer.filt_w * layer.channels;
    let sc = layer.num_filters;
    let (e, f) = ofmap_dims(layer);
    let t = e * f;

    let mut res = RefSimResult::default();
    let mut clock: u64 = 0;
    let mut first_fold = true;

    // Row folds outer, column folds inner; strictly sequential.
    let mut rows_left = sr;
    let mut row_fold_idx = 0u64;
    while rows_left > 0 {
        let r = rows_left.min(ar);
        let mut cols_left = sc;
        while cols_left > 0 {
            let c = cols_left.min(ac);
            if !first_fold {
                clock += interposer_delay;
            }
            first_fold = false;
            run_fold(&mut clock, r, c, t, row_fold_idx > 0, &mut res);
            cols_left -= c;
        }
        rows_left -= r;
        row_fold_idx += 1;
    }

    res.cycles = clock;
    debug_assert_eq!(res.useful_mac_events, macs);
    Ok(res)
}

/// Steps one `r x c` fold streaming `t` input vectors, cycle by cycle.
fn run_fold(clock: &mut u64, r: u64, c: u64, t: u64, psum_readback: bool, res: &mut RefSimResult) {
    // Preload: one weight row per cycle, one weight per active column lane.
    for _ in 0..r {
        *clock += 1;
        res.filter_reads += c;
    }

    // In-flight input elements: (input vector v, array row k, current column).
    // Element (v, k) is injected at column 0 on the stream cycle with offset
    // v + k (the systolic skew) and advances one column per cycle.
    let stream_start = *clock;
    let last_diagonal = (t - 1) + (r - 1);
    let mut live: Vec<(u64, u64, u64)> = Vec::new();

    loop {
        let offset = *clock - stream_start; // 0-based offset of the next cycle
        if offset > last_diagonal && live.is_empty() {
            break;
        }
        *clock += 1;

        if offset <= last_diagonal {
            let k_lo = offset.saturating_sub(t - 1);
            let k_hi = (r - 1).min(offset);
            for k in k_lo..=k_hi {
                live.push((offset - k, k, 0));
                res.ifmap_reads += 1;
            }
        }

        let mut idx = 0;
        while idx < live.len() {
            let (_, k, col) = live[idx];
            // The operand pair meets here: the stationary weight at (k, col)
            // and the input element, accumulating into the column's partial sum.
            res.useful_mac_events += 1;
            if k == 0 && psum_readback {
                // Later row folds resume from the previously written partials.
                res.psum_reads += 1;
            }
            if k == r - 1 {
                res.ofmap_writes += 1;
            }
            if col + 1 == c {
                live.swap_remove(idx);
            } else {
                live[idx].2 = col + 1;
                idx += 1;
            }
        }
    }
}
