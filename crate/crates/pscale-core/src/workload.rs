//! Layer descriptions for convolutional workloads.
//!
//! A workload is an ordered stack of convolution / fully-connected layers
//! read from a small CSV format:
//!
//! ```text
//! name,ifmap_h,ifmap_w,filt_h,filt_w,channels,num_filters,stride,padding
//! conv1,224,224,7,7,3,64,2,3
//! ```
//!
//! Comment lines start with `#`; CRLF and LF endings are both accepted.
//! Fully-connected layers are encoded as 1x1-spatial convolutions
//! (`ifmap = filt = 1x1`, channels = inputs, filters = outputs).

use serde::Serialize;

use crate::error::{Error, Result};

/// One convolutional (or FC-as-1x1-conv) layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerShape {
    pub name: String,
    /// Input feature-map height in pixels.
    pub ifmap_h: u64,
    /// Input feature-map width in pixels.
    pub ifmap_w: u64,
    /// Filter height (R).
    pub filt_h: u64,
    /// Filter width (S).
    pub filt_w: u64,
    /// Input channels (C).
    pub channels: u64,
    /// Output filters (M).
    pub num_filters: u64,
    pub stride: u64,
    /// Zero padding per side.
    pub padding: u64,
}

impl LayerShape {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Error::InvalidLayer {
            name: self.name.clone(),
            msg,
        };
        if self.name.is_empty() {
            return Err(err("layer name must be non-empty".into()));
        }
        for (label, v) in [
            ("ifmap_h", self.ifmap_h),
            ("ifmap_w", self.ifmap_w),
            ("filt_h", self.filt_h),
            ("filt_w", self.filt_w),
            ("channels", self.channels),
            ("num_filters", self.num_filters),
            ("stride", self.stride),
        ] {
            if v == 0 {
                return Err(err(format!("{label} must be >= 1")));
            }
        }
        if self.ifmap_h + 2 * self.padding < self.filt_h {
            return Err(err(format!(
                "filter height {} exceeds padded ifmap height {}",
                self.filt_h,
                self.ifmap_h + 2 * self.padding
            )));
        }
        if self.ifmap_w + 2 * self.padding < self.filt_w {
            return Err(err(format!(
                "filter width {} exceeds padded ifmap width {}",
                self.filt_w,
                self.ifmap_w + 2 * self.padding
            )));
        }
        Ok(())
    }
}

/// Ordered, uniquely named stack of layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Workload {
    pub name: String,
    pub layers: Vec<LayerShape>,
}

pub const LAYER_CSV_HEADER: &str =
    "name,ifmap_h,ifmap_w,filt_h,filt_w,channels,num_filters,stride,padding";

/// Parses a layer CSV into a workload named `name`.
///
/// The first non-comment line must be the header. Errors name the 1-based
/// line number of the offending row.
pub fn parse_layer_csv(name: &str, text: &str) -> Result<Workload> {
    let mut layers: Vec<LayerShape> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            let normalized: String = line.split(',').map(str::trim).collect::<Vec<_>>().join(",");
            if !normalized.eq_ignore_ascii_case(LAYER_CSV_HEADER) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected header `{LAYER_CSV_HEADER}`, found `{line}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize, label: &str| -> Result<u64> {
            fields[i].parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!(
                    "field `{label}` is not a non-negative integer: `{}`",
                    fields[i]
                ),
            })
        };
        let layer = LayerShape {
            name: fields[0].to_string(),
            ifmap_h: num(1, "ifmap_h")?,
            ifmap_w: num(2, "ifmap_w")?,
            filt_h: num(3, "filt_h")?,
            filt_w: num(4, "filt_w")?,
            channels: num(5, "channels")?,
            num_filters: num(6, "num_filters")?,
            stride: num(7, "stride")?,
            padding: num(8, "padding")?,
        };
        layer.validate().map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if layers.iter().any(|l| l.name == layer.name) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate layer name `{}`", layer.name),
            });
        }
        layers.push(layer);
    }
    if layers.is_empty() {
        return Err(Error::EmptyWorkload(name.to_string()));
    }
    Ok(Workload {
        name: name.to_string(),
        layers,
    })
}

/// Canonical CSV form; `parse_layer_csv(to_csv(w))` round-trips exactly.
pub fn to_csv(workload: &Workload) -> String {
    let mut out = String::from(LAYER_CSV_HEADER);
    out.push('\n');
    for l in &workload.layers {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            l.name,
            l.ifmap_h,
            l.ifmap_w,
            l.filt_h,
            l.filt_w,
            l.channels,
            l.num_filters,
            l.stride,
            l.padding
        ));
    }
    out
}

/// Output feature-map dimensions `(E, F)` under standard convolution
/// arithmetic: `E = (H + 2P - R) / stride + 1` (floor division).
pub fn ofmap_dims(layer: &LayerShape) -> (u64, u64) {
    let e = (layer.ifmap_h + 2 * layer.padding - layer.filt_h) / layer.stride + 1;
    let f = (layer.ifmap_w + 2 * layer.padding - layer.filt_w) / layer.stride + 1;
    (e, f)
}

/// Total useful MAC count `E*F*R*S*C*M`.
pub fn layer_macs(layer: &LayerShape) -> Result<u64> {
    let (e, f) = ofmap_dims(layer);
    [
        f,
        layer.filt_h,
        layer.filt_w,
        layer.channels,
        layer.num_filters,
    ]
    .iter()
    .try_fold(e, |acc, &v| acc.checked_mul(v))
    .ok_or(Error::Overflow("layer MAC count"))
}

pub mod presets {
    //! Layer stacks for the four benchmark networks, embedded as data assets.

    use super::{parse_layer_csv, Workload};
    use crate::error::{Error, Result};

    pub const PRESET_NAMES: [&str; 4] = ["alphagozero", "googlenet", "mobilenet", "resnet18"];

    /// Loads a preset by bare name (e.g. `"resnet18"`).
    pub fn preset(name: &str) -> Result<Workload> {
        let text = match name {
            "alphagozero" => include_str!("../presets/alphagozero.csv"),
            "googlenet" => include_str!("../presets/googlenet.csv"),
            "mobilenet" => include_str!("../presets/mobilenet.csv"),
            "resnet18" => include_str!("../presets/resnet18.csv"),
            _ => {
                return Err(Error::NotFound(format!(
                    "preset `{name}` (available: {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        parse_layer_csv(name, text)
    }

    /// Resolves a workload reference: `preset:<name>` or a file path.
    pub fn load(spec: &str) -> Result<Workload> {
        if let Some(name) = spec.strip_prefix("preset:") {
            return preset(name);
        }
        let text = std::fs::read_to_string(spec).map_err(|e| Error::io(spec, e))?;
        let stem = std::path::Path::new(spec)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(spec)
            .to_string();
        parse_layer_csv(&stem, &text)
    }
}
