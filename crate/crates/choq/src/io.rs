//! Textual field dump plus JSON metadata.
//!
//! Format (version 1, stable):
//!
//! ```text
//! choq-field 1
//! n <1|2|3>
//! bbox <min0> <max0> [<min1> <max1> [<min2> <max2>]]
//! cells <per-axis count>
//! gradient <none|analytic|finite-difference>
//! values
//! <one row-major f64 per line>
//! [gradient-values
//! <one row-major f64 per line>]
//! ```
//!
//! Floats are written with enough digits to round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GradientSource, Grid, ScalarField};

pub const FIELD_FORMAT_VERSION: u32 = 1;

/// JSON sidecar describing a field dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub format_version: u32,
    pub n: usize,
    pub bbox: Vec<[f64; 2]>,
    pub cells: usize,
    pub h: f64,
    pub gradient: String,
    pub value_count: usize,
}

impl FieldMetadata {
    pub fn of(field: &ScalarField) -> Self {
        let g = field.grid();
        FieldMetadata {
            format_version: FIELD_FORMAT_VERSION,
            n: g.n(),
            bbox: (0..g.n()).map(|k| [g.axis_min(k), g.axis_max(k)]).collect(),
            cells: g.cells_per_axis(),
            h: g.h(),
            gradient: gradient_tag(field).to_string(),
            value_count: g.total_cells(),
        }
    }
}

fn gradient_tag(field: &ScalarField) -> &'static str {
    match field.gradient_source() {
        None => "none",
        Some(GradientSource::Analytic) => "analytic",
        Some(GradientSource::FiniteDifference) => "finite-difference",
    }
}

pub fn field_to_string(field: &ScalarField) -> String {
    let g = field.grid();
    let mut out = String::new();
    let _ = writeln!(out, "choq-field {FIELD_FORMAT_VERSION}");
    let _ = writeln!(out, "n {}", g.n());
    let mut bbox = String::new();
    for k in 0..g.n() {
        let _ = write!(bbox, " {:?} {:?}", g.axis_min(k), g.axis_max(k));
    }
    let _ = writeln!(out, "bbox{bbox}");
    let _ = writeln!(out, "cells {}", g.cells_per_axis());
    let _ = writeln!(out, "gradient {}", gradient_tag(field));
    let _ = writeln!(out, "values");
    for v in field.values() {
        let _ = writeln!(out, "{v:?}");
    }
    if let Some(grad) = field.gradient_values() {
        let _ = writeln!(out, "gradient-values");
        for v in grad {
            let _ = writeln!(out, "{v:?}");
        }
    }
    out
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    fs::write(path, field_to_string(field))?;
    Ok(())
}

/// Write the JSON metadata sidecar next to a dump.
pub fn write_field_metadata(path: &Path, field: &ScalarField) -> Result<()> {
    let meta = FieldMetadata::of(field);
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::MalformedField(e.to_string()))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn field_from_string(text: &str) -> Result<ScalarField> {
    let mut lines = text.lines();
    let bad = |msg: &str| Error::MalformedField(msg.to_string());

    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let mut hp = header.split_whitespace();
    if hp.next() != Some("choq-field") {
        return Err(bad("missing 'choq-field' header"));
    }
    let version: u32 = hp
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("missing format version"))?;
    if version != FIELD_FORMAT_VERSION {
        return Err(bad(&format!("unsupported format version {version}")));
    }

    let n: usize = parse_kv(lines.next(), "n")?;
    let bbox_line = lines.next().ok_or_else(|| bad("missing bbox"))?;
    let mut bp = bbox_line.split_whitespace();
    if bp.next() != Some("bbox") {
        return Err(bad("missing bbox"));
    }
    let nums: Vec<f64> = bp
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bbox holds a non-numeric entry"))?;
    if nums.len() != 2 * n {
        return Err(bad("bbox entry count does not match dimension"));
    }
    let bbox: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
    let cells: usize = parse_kv(lines.next(), "cells")?;

    let grad_line = lines.next().ok_or_else(|| bad("missing gradient line"))?;
    let grad_tag = grad_line
        .strip_prefix("gradient ")
        .ok_or_else(|| bad("missing gradient line"))?
        .trim();
    let source = match grad_tag {
        "none" => None,
        "analytic" => Some(GradientSource::Analytic),
        "finite-difference" => Some(GradientSource::FiniteDifference),
        other => return Err(bad(&format!("unknown gradient tag '{other}'"))),
    };

    if lines.next().map(str::trim) != Some("values") {
        return Err(bad("missing 'values' section"));
    }
    let grid = Grid::new(n, &bbox, cells)?;
    let total = grid.total_cells();
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let line = lines.next().ok_or_else(|| bad("values section truncated"))?;
        values.push(
            line.trim()
                .parse::<f64>()
                .map_err(|_| bad("non-numeric value entry"))?,
        );
    }
    match source {
        None => ScalarField::new(grid, values),
        Some(src) => {
            if lines.next().map(str::trim) != Some("gradient-values") {
                return Err(bad("missing 'gradient-values' section"));
            }
            let mut grad = Vec::with_capacity(total);
            for _ in 0..total {
                let line = lines
                    .next()
                    .ok_or_else(|| bad("gradient section truncated"))?;
                grad.push(
                    line.trim()
                        .parse::<f64>()
                        .map_err(|_| bad("non-numeric gradient entry"))?,
                );
            }
            ScalarField::with_gradient(grid, values, grad, src)
        }
    }
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let text = fs::read_to_string(path)?;
    field_from_string(&text)
}

fn parse_kv<T: std::str::FromStr>(line: Option<&str>, key: &str) -> Result<T> {
    let line = line.ok_or_else(|| Error::MalformedField(format!("missing '{key}'")))?;
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| Error::MalformedField(format!("expected '{key}', got '{line}'")))?;
    rest.trim()
        .parse::<T>()
        .map_err(|_| Error::MalformedField(format!("bad value for '{key}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trips_exactly() {
        let grid = Grid::new(2, &[(-1.0, 1.0), (-1.0, 1.0)], 16).unwrap();
        let f = ScalarField::from_fn(
            grid,
            |x| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (0.7 - r).max(0.0) / 3.0
            },
            Some(|x: [f64; 3]| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                if r < 0.7 {
                    1.0 / 3.0
                } else {
                    0.0
                }
            }),
        )
        .unwrap();
        let text = field_to_string(&f);
        let back = field_from_string(&text).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.gradient_values(), f.gradient_values());
        assert_eq!(back.gradient_source(), f.gradient_source());
        assert_eq!(back.grid(), f.grid());
    }

    #[test]
    fn metadata_reflects_the_grid() {
        let grid = Grid::new(1, &[(0.0, 2.0)], 8).unwrap();
        let f = ScalarField::new(grid, vec![0.0; 8]).unwrap();
        let meta = FieldMetadata::of(&f);
        assert_eq!(meta.n, 1);
        assert_eq!(meta.cells, 8);
        assert_eq!(meta.h, 0.25);
        assert_eq!(meta.gradient, "none");
    }

    #[test]
    fn malformed_header_is_rejected() {
        assert!(field_from_string("nonsense").is_err());
        assert!(field_from_string("choq-field 99\nn 2\n").is_err());
    }
}
