//! Trace file emission and parsing: CSV with the exact header
//! `t,x,x_d,x_e,xe_tilde,u`, one row per grid point, 12 significant digits,
//! LF line endings, UTF-8.

use crate::error::{Error, Result};
use crate::simkit::SimTrace;

pub const TRACE_HEADER: &str = "t,x,x_d,x_e,xe_tilde,u";

/// The six trace columns without run metadata (what a trace file holds).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceColumns {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub x_d: Vec<f64>,
    pub x_e: Vec<f64>,
    pub xe_tilde: Vec<f64>,
    pub u: Vec<f64>,
}

impl From<&SimTrace> for TraceColumns {
    fn from(trace: &SimTrace) -> Self {
        Self {
            t: trace.t.clone(),
            x: trace.x.clone(),
            x_d: trace.x_d.clone(),
            x_e: trace.x_e.clone(),
            xe_tilde: trace.xe_tilde.clone(),
            u: trace.u.clone(),
        }
    }
}

fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Renders the columns as a trace file.
pub fn columns_to_csv(columns: &TraceColumns) -> String {
    let n = columns.t.len();
    let mut out = String::with_capacity(16 + n * 100);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for k in 0..n {
        out.push_str(&format_value(columns.t[k]));
        for column in [
            &columns.x,
            &columns.x_d,
            &columns.x_e,
            &columns.xe_tilde,
            &columns.u,
        ] {
            out.push(',');
            out.push_str(&format_value(column[k]));
        }
        out.push('\n');
    }
    out
}

/// Renders a simulation trace as a trace file.
pub fn trace_to_csv(trace: &SimTrace) -> String {
    columns_to_csv(&TraceColumns::from(trace))
}

/// Parses a trace file produced by [`columns_to_csv`].
pub fn parse_trace_csv(text: &str) -> Result<TraceColumns> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRACE_HEADER => {}
        Some((_, header)) => {
            return Err(Error::ConfigParse {
                line: 1,
                msg: format!("expected header `{TRACE_HEADER}`, got `{header}`"),
            })
        }
        None => {
            return Err(Error::ConfigParse {
                line: 1,
                msg: "empty trace file".into(),
            })
        }
    }
    let mut columns = TraceColumns {
        t: Vec::new(),
        x: Vec::new(),
        x_d: Vec::new(),
        x_e: Vec::new(),
        xe_tilde: Vec::new(),
        u: Vec::new(),
    };
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::ConfigParse {
                line: idx + 1,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let mut parsed = [0.0_f64; 6];
        for (slot, field) in parsed.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| Error::ConfigParse {
                line: idx + 1,
                msg: format!("bad numeric field `{field}`"),
            })?;
        }
        columns.t.push(parsed[0]);
        columns.x.push(parsed[1]);
        columns.x_d.push(parsed[2]);
        columns.x_e.push(parsed[3]);
        columns.xe_tilde.push(parsed[4]);
        columns.u.push(parsed[5]);
    }
    Ok(columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_columns() -> TraceColumns {
        TraceColumns {
            t: vec![0.0, 0.01, 0.02],
            x: vec![-1.5, -1.2345678901234, 0.4],
            x_d: vec![0.5, 0.499, 1e-13],
            x_e: vec![2.0, 1.7335678901234, -0.4],
            xe_tilde: vec![2.0, 1.73, -0.39999],
            u: vec![240.0, -37.85, 0.0],
        }
    }

    #[test]
    fn round_trip_is_bit_exact_at_twelve_digits() {
        let csv = columns_to_csv(&sample_columns());
        let parsed = parse_trace_csv(&csv).unwrap();
        assert_eq!(columns_to_csv(&parsed), csv);
    }

    #[test]
    fn file_shape_contract() {
        let csv = columns_to_csv(&sample_columns());
        assert!(csv.starts_with("t,x,x_d,x_e,xe_tilde,u\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), 4); // header + 3 rows
        let first_row = csv.lines().nth(1).unwrap();
        // 12 significant digits: d.ddddddddddd e exponent
        assert!(first_row.starts_with("0.00000000000e0,"), "{first_row}");
    }

    #[test]
    fn parse_rejects_malformed_files() {
        assert!(parse_trace_csv("").is_err());
        assert!(parse_trace_csv("wrong,header\n").is_err());
        let csv = columns_to_csv(&sample_columns());
        let broken = csv.replace("2.40000000000e2", "not-a-number");
        assert!(broken != csv, "substitution must hit a field");
        assert!(parse_trace_csv(&broken).is_err());
        let short = format!("{TRACE_HEADER}\n1.0,2.0\n");
        assert!(parse_trace_csv(&short).is_err());
    }
}
