//! Design-space exploration for chiplet-based photonic DNN accelerators.
//!
//! Convolutional workloads map onto grids of small photonic tensor-core
//! chiplets under a weight-stationary dataflow. The crate models, per
//! (layer, grid) pair: total compute cycles, PE utilization, SRAM demand and
//! projected DRAM traffic, optical link-budget feasibility of the monolithic
//! tile, and laser energy. Sweeping grid aspect ratios and PE counts locates
//! the utilization wall and the symmetric-grid optimum.
//!
//! Module map:
//!
//! - [`workload`]: layer CSV parsing, benchmark presets, derived dimensions
//! - [`topology`]: chiplet grids, aspect-ratio enumeration, effective dims
//! - [`dataflow`]: analytical weight-stationary fold/cycle/utilization model
//! - [`refsim`]: cycle-stepping reference simulator (the small-instance oracle)
//! - [`memory`]: SRAM demand counting and threshold DRAM projection
//! - [`optics`]: insertion/fanout loss arithmetic, link budget, laser energy
//! - [`metrics`]: scaling efficiency, workload utilization, effective TOPS/W
//! - [`model`]: cycle-model strategy trait and registry
//! - [`sweep`]: full design-space sweep and rule detection
//! - [`report`]: canonical report bundle writing and re-derivation
//! - [`config`]: run-config file format

pub mod config;
pub mod dataflow;
pub mod error;
pub mod memory;
pub mod metrics;
pub mod model;
pub mod optics;
pub mod refsim;
pub mod report;
pub mod sweep;
pub mod topology;
pub mod workload;

pub use config::SweepConfig;
pub use dataflow::{FoldPlan, LayerReport};
pub use error::{Error, Result};
pub use memory::{BufferConfig, MemoryTraffic};
pub use optics::{LaserParams, OpticalParams};
pub use sweep::{run_sweep, SweepResult};
pub use topology::GridTopology;
pub use workload::{LayerShape, Workload};
