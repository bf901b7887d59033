//! Trace files.
//!
//! CSV columns, in order:
//!
//! ```text
//! t, x_0 .. x_{n-1}, [lambda_0 .. lambda_{dw-1}], dist_to_xs, constraint_residual, objective
//! ```
//!
//! `lambda_*` columns appear for RDA only; `dist_to_xs` is empty when no
//! reference point was computed. Numbers use the shortest representation
//! that parses back to the same `f64`, in exponent form outside `[1e-5, 1e16)`.
//!
//! JSON mirrors the CSV as one array per column:
//!
//! ```text
//! {"algorithm": "rda", "status": "converged", "columns": {"t": [...], "x_0": [...], ...}}
//! ```
//!
//! with `null` for missing or non-finite entries.

use serde_json::{Map, Value};

use crate::algorithms::{Algorithm, Trace, TraceStatus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const TAIL: [&str; 3] = ["dist_to_xs", "constraint_residual", "objective"];

/// Column-oriented view of a trace, independent of the scalar type.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub algorithm: Option<Algorithm>,
    pub status: Option<TraceStatus>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn column_names(n: usize, dw: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..n).map(|i| format!("x_{i}")));
    cols.extend((0..dw).map(|i| format!("lambda_{i}")));
    cols.extend(TAIL.iter().map(|s| s.to_string()));
    cols
}

fn check_columns(cols: &[String]) -> Result<()> {
    let n = cols.iter().filter(|c| c.starts_with("x_")).count();
    let dw = cols.iter().filter(|c| c.starts_with("lambda_")).count();
    if n == 0 || cols != column_names(n, dw).as_slice() {
        return Err(Error::Schema(format!("unexpected trace columns {cols:?}")));
    }
    Ok(())
}

fn fmt_cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(v) if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&v.abs()) => format!("{v}"),
        Some(v) => format!("{v:e}"),
    }
}

impl TraceTable {
    pub fn from_trace<T: Scalar>(trace: &Trace<T>) -> Self {
        let n = trace.decision_dim();
        let dw = trace.constraint_dim();
        let rows = trace
            .records
            .iter()
            .map(|r| {
                let mut row = vec![Some(r.t as f64)];
                row.extend(r.x.iter().map(|v| Some(v.as_f64())));
                if let Some(l) = &r.lambda {
                    row.extend(l.iter().map(|v| Some(v.as_f64())));
                }
                row.push(r.dist_to_reference.map(|d| d.as_f64()));
                row.push(Some(r.constraint_residual.as_f64()));
                row.push(Some(r.objective_value.as_f64()));
                row
            })
            .collect();
        Self {
            algorithm: Some(trace.algorithm),
            status: Some(trace.status),
            columns: column_names(n, dw),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_cell(v)))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        check_columns(&columns)?;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|_| Error::Schema(format!("bad number {cell:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let has_lambda = columns.iter().any(|c| c.starts_with("lambda_"));
        Ok(Self {
            algorithm: has_lambda.then_some(Algorithm::Rda),
            status: None,
            columns,
            rows,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut cols = Map::new();
        for (j, name) in self.columns.iter().enumerate() {
            let values = self
                .rows
                .iter()
                .map(|row| match row[j] {
                    Some(v) if name == "t" => Value::from(v as u64),
                    Some(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
                    None => Value::Null,
                })
                .collect();
            cols.insert(name.clone(), Value::Array(values));
        }
        let mut root = Map::new();
        root.insert(
            "algorithm".into(),
            self.algorithm
                .map_or(Value::Null, |a| Value::from(a.name())),
        );
        root.insert(
            "status".into(),
            self.status.map_or(Value::Null, |s| Value::from(s.name())),
        );
        root.insert("columns".into(), Value::Object(cols));
        let mut s = serde_json::to_string_pretty(&Value::Object(root))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text)?;
        let algorithm = match root.get("algorithm") {
            Some(Value::String(s)) if s == "rcm" => Some(Algorithm::Rcm),
            Some(Value::String(s)) if s == "rda" => Some(Algorithm::Rda),
            Some(Value::Null) | None => None,
            Some(other) => return Err(Error::Schema(format!("bad algorithm {other}"))),
        };
        let status = match root.get("status") {
            Some(Value::String(s)) => Some(TraceStatus::parse(s)?),
            Some(Value::Null) | None => None,
            Some(other) => return Err(Error::Schema(format!("bad status {other}"))),
        };
        let Some(Value::Object(cols)) = root.get("columns") else {
            return Err(Error::Schema("missing \"columns\" object".into()));
        };
        let columns: Vec<String> = cols.keys().cloned().collect();
        check_columns(&columns)?;
        let arrays = cols
            .values()
            .map(|v| {
                v.as_array()
                    .ok_or_else(|| Error::Schema("column is not an array".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let len = arrays[0].len();
        if arrays.iter().any(|a| a.len() != len) {
            return Err(Error::Schema("columns differ in length".into()));
        }
        let mut rows = Vec::with_capacity(len);
        for i in 0..len {
            let row = arrays
                .iter()
                .map(|a| match &a[i] {
                    Value::Null => Ok(None),
                    Value::Number(n) => Ok(n.as_f64()),
                    other => Err(Error::Schema(format!("bad cell {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            algorithm,
            status,
            columns,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{rcm, rda, RcmConfig, RdaConfig};
    use crate::experiments::one_dim_example;

    #[test]
    fn csv_round_trip() {
        let p = one_dim_example::<f64>(0.5).unwrap();
        let mut tr = rcm(&p, &[1.0], &RcmConfig::default()).unwrap();
        tr.attach_reference(&[0.0]);
        let table = TraceTable::from_trace(&tr);
        let csv = table.to_csv().unwrap();
        assert!(
            csv.starts_with("t,x_0,dist_to_xs,constraint_residual,objective\n0,1,1,0,1\n1,0.5,")
        );
        let back = TraceTable::from_csv(&csv).unwrap();
        assert_eq!(back.rows, table.rows);
        assert_eq!(back.to_csv().unwrap(), csv);
    }

    #[test]
    fn json_round_trip_with_missing_reference() {
        let p = one_dim_example::<f64>(0.5).unwrap();
        let tr = rda(&p, &[1.0], &RdaConfig::new(0.5)).unwrap();
        let table = TraceTable::from_trace(&tr);
        assert_eq!(table.columns[2], "lambda_0");
        let json = table.to_json().unwrap();
        let back = TraceTable::from_json(&json).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.to_json().unwrap(), json);
        assert!(back
            .column("dist_to_xs")
            .unwrap()
            .iter()
            .all(Option::is_none));
    }

    #[test]
    fn bad_header_is_schema_error() {
        assert!(matches!(
            TraceTable::from_csv("t,y,objective\n"),
            Err(Error::Schema(_))
        ));
    }
}
