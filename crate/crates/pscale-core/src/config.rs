//! Run configuration: a flat key/value text format with TOML-style sections
//! `[sweep]`, `[buffers]`, `[optical]`, `[laser]`. Every key is optional and
//! falls back to the stated default. Lists are comma-separated; surrounding
//! brackets and quotes are tolerated.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::memory::BufferConfig;
use crate::optics::{LaserParams, OpticalParams};

pub const DEFAULT_PE_COUNTS: [u64; 5] = [64, 128, 256, 512, 1024];
pub const DEFAULT_WALL_THRESHOLD: f64 = 0.7;

/// Full sweep specification.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepConfig {
    /// Workload references: `preset:<name>` or layer CSV paths.
    pub workloads: Vec<String>,
    pub pe_counts: Vec<u64>,
    pub tile_dim: u64,
    pub interposer_delay: u64,
    pub buffers: BufferConfig,
    pub optical: OpticalParams,
    pub laser: LaserParams,
    pub output_dir: PathBuf,
    /// Scaling-efficiency level below which the utilization wall is flagged.
    pub wall_threshold: f64,
    /// Registered cycle-model name.
    pub model: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            workloads: vec![
                "preset:alphagozero".into(),
                "preset:googlenet".into(),
                "preset:mobilenet".into(),
                "preset:resnet18".into(),
            ],
            pe_counts: DEFAULT_PE_COUNTS.to_vec(),
            tile_dim: crate::topology::DEFAULT_TILE_DIM,
            interposer_delay: 0,
            buffers: BufferConfig::default(),
            optical: OpticalParams::default(),
            laser: LaserParams::default(),
            output_dir: PathBuf::from("out"),
            wall_threshold: DEFAULT_WALL_THRESHOLD,
            model: "analytical".into(),
        }
    }
}

impl SweepConfig {
    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.workloads.is_empty() {
            violations.push("workloads must be non-empty".to_string());
        }
        if self.pe_counts.is_empty() {
            violations.push("pe_counts must be non-empty".to_string());
        } else {
            if self.pe_counts.windows(2).any(|w| w[0] >= w[1]) {
                violations.push(format!(
                    "pe_counts must be strictly increasing, got {:?}",
                    self.pe_counts
                ));
            }
            if self.pe_counts.contains(&0) {
                violations.push("pe_counts entries must be >= 1".to_string());
            }
        }
        if self.tile_dim == 0 {
            violations.push("tile_dim must be >= 1".to_string());
        }
        if !(self.wall_threshold > 0.0 && self.wall_threshold <= 1.0) {
            violations.push(format!(
                "wall_threshold must be in (0, 1], got {}",
                self.wall_threshold
            ));
        }
        if crate::model::cycle_model(&self.model).is_err() {
            violations.push(format!("unknown cycle model `{}`", self.model));
        }
        for err in [
            self.buffers.validate().err(),
            self.optical.validate().err(),
            self.laser.validate().err(),
        ]
        .into_iter()
        .flatten()
        {
            if let Error::Config(inner) = err {
                violations.extend(inner);
            } else {
                violations.push(err.to_string());
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(violations))
        }
    }

    pub fn from_file(path: &std::path::Path) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_config(&text)
    }
}

fn strip_wrapping(value: &str) -> &str {
    let v = value.trim();
    let v = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(v);
    v.trim()
}

fn unquote(value: &str) -> &str {
    let v = value.trim();
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .or_else(|| v.strip_prefix('\'').and_then(|s| s.strip_suffix('\'')))
        .unwrap_or(v)
}

fn split_list(value: &str) -> Vec<String> {
    strip_wrapping(value)
        .split(',')
        .map(|s| unquote(s).to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses config text into a [`SweepConfig`], validating the result.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut violations = Vec::new();
    let mut section = String::from("sweep");

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_lowercase();
            if !["sweep", "buffers", "optical", "laser"].contains(&section.as_str()) {
                violations.push(format!("line {line_no}: unknown section [{section}]"));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            ));
            continue;
        };
        let key = key.trim().to_lowercase();
        let value = value.trim();

        macro_rules! parse_u64 {
            ($target:expr) => {
                match unquote(value).parse::<u64>() {
                    Ok(v) => $target = v,
                    Err(_) => violations.push(format!(
                        "line {line_no}: `{key}` must be a non-negative integer, got `{value}`"
                    )),
                }
            };
        }
        macro_rules! parse_f64 {
            ($target:expr) => {
                match unquote(value).parse::<f64>() {
                    Ok(v) => $target = v,
                    Err(_) => violations.push(format!(
                        "line {line_no}: `{key}` must be a number, got `{value}`"
                    )),
                }
            };
        }

        match (section.as_str(), key.as_str()) {
            ("sweep", "workloads") => cfg.workloads = split_list(value),
            ("sweep", "pe_counts") => {
                let mut counts = Vec::new();
                let mut ok = true;
                for item in split_list(value) {
                    match item.parse::<u64>() {
                        Ok(v) => counts.push(v),
                        Err(_) => {
                            violations.push(format!(
                                "line {line_no}: pe_counts entry `{item}` is not an integer"
                            ));
                            ok = false;
                        }
                    }
                }
                if ok {
                    cfg.pe_counts = counts;
                }
            }
            ("sweep", "tile_dim") => parse_u64!(cfg.tile_dim),
            ("sweep", "interposer_delay") => parse_u64!(cfg.interposer_delay),
            ("sweep", "output_dir") => cfg.output_dir = PathBuf::from(unquote(value)),
            ("sweep", "wall_threshold") => parse_f64!(cfg.wall_threshold),
            ("sweep", "model") => cfg.model = unquote(value).to_string(),
            ("buffers", "ifmap_sram_bytes") => parse_u64!(cfg.buffers.ifmap_sram_bytes),
            ("buffers", "filter_sram_bytes") => parse_u64!(cfg.buffers.filter_sram_bytes),
            ("buffers", "ofmap_sram_bytes") => parse_u64!(cfg.buffers.ofmap_sram_bytes),
            ("buffers", "word_bytes") => parse_u64!(cfg.buffers.word_bytes),
            ("optical", "mzi_loss_db") => parse_f64!(cfg.optical.mzi_loss_db),
            ("optical", "crossing_loss_db") => parse_f64!(cfg.optical.crossing_loss_db),
            ("optical", "crossings_per_link") => parse_u64!(cfg.optical.crossings_per_link),
            ("optical", "link_budget_db") => parse_f64!(cfg.optical.link_budget_db),
            ("optical", "margin_db") => parse_f64!(cfg.optical.margin_db),
            ("laser", "laser_power_w") => parse_f64!(cfg.laser.laser_power_w),
            ("laser", "cycle_time_s") => parse_f64!(cfg.laser.cycle_time_s),
            (sec, k) => violations.push(format!("line {line_no}: unknown key `{k}` in [{sec}]")),
        }
    }

    if !violations.is_empty() {
        return Err(Error::Config(violations));
    }
    cfg.validate()?;
    Ok(cfg)
}
