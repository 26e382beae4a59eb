//! Machine-readable output: JSON reports and the frozen sweep CSV schema.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::SweepReport;

/// Version tag carried by every serialized report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Column order of sweep CSV output; frozen, see the repository docs.
pub const SWEEP_CSV_COLUMNS: [&str; 7] = [
    "abscissa",
    "lhs_lower",
    "lhs_upper",
    "rhs_lower",
    "rhs_upper",
    "ratio_lower",
    "ratio_upper",
];

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    payload: &'a T,
}

/// Pretty JSON with a schema version and a trailing newline; byte-identical
/// for identical inputs.
pub fn to_json<T: Serialize>(payload: &T) -> Result<String> {
    let wrapped = Versioned {
        schema_version: REPORT_SCHEMA_VERSION,
        payload,
    };
    let body = serde_json::to_string_pretty(&wrapped)
        .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    Ok(body + "\n")
}

/// One row per sweep point, `#`-prefixed schema comment first.
pub fn sweep_to_csv(report: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# choq-sweep-csv v{REPORT_SCHEMA_VERSION} kind={}\n",
        report.kind
    ));
    out.push_str(&SWEEP_CSV_COLUMNS.join(","));
    out.push('\n');
    for p in &report.points {
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            p.abscissa,
            p.lhs.lower,
            p.lhs.upper,
            p.rhs.lower,
            p.rhs.upper,
            p.ratio.lower,
            p.ratio.upper
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{SweepPoint, ValueBracket};

    fn tiny_sweep() -> SweepReport {
        SweepReport {
            kind: "tent".to_string(),
            points: vec![SweepPoint {
                abscissa: 0.25,
                lhs: ValueBracket {
                    lower: 1.0,
                    upper: 2.0,
                },
                rhs: ValueBracket::point(3.0),
                ratio: ValueBracket {
                    lower: 1.0 / 3.0,
                    upper: 2.0 / 3.0,
                },
            }],
            slope: -0.5,
            slope_half_width: 0.1,
            expected_slope: Some(-0.5),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn csv_schema_is_stable() {
        let csv = sweep_to_csv(&tiny_sweep());
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# choq-sweep-csv v1"));
        assert_eq!(
            lines.next().unwrap(),
            "abscissa,lhs_lower,lhs_upper,rhs_lower,rhs_upper,ratio_lower,ratio_upper"
        );
        assert_eq!(lines.next().unwrap(), "0.25,1.0,2.0,3.0,3.0,0.3333333333333333,0.6666666666666666");
    }

    #[test]
    fn json_is_versioned_and_deterministic() {
        let a = to_json(&tiny_sweep()).unwrap();
        let b = to_json(&tiny_sweep()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
        assert!(a.ends_with('\n'));
    }
}
