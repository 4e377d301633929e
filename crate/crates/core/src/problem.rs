//! Problem ingestion: a grid plus sampled values, from CSV or JSON.
//!
//! CSV (header required) comes in two shapes:
//!   `x_left,x_right,f` — explicit cells that must tile the interval;
//!   `x,f`              — midpoint samples on a uniform grid whose endpoints
//!                        the caller supplies separately.
//! JSON: `{"a":…, "b":…, "breakpoints":[…]?, "values":[…]}`; without
//! breakpoints the grid is uniform with one cell per value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellGrid, StepFunction};

/// A ready-to-solve instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub grid: CellGrid,
    pub f: StepFunction,
}

impl Problem {
    pub fn new(grid: CellGrid, f: StepFunction) -> Result<Self> {
        grid.check_compatible(&f)?;
        Ok(Problem { grid, f })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: ProblemJson = serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("invalid problem JSON: {e}")))?;
        parsed.into_problem()
    }

    pub fn to_json_string(&self) -> String {
        let json = ProblemJson {
            a: self.grid.a(),
            b: self.grid.b(),
            breakpoints: Some(self.grid.breakpoints().to_vec()),
            values: self.f.values().to_vec(),
        };
        serde_json::to_string_pretty(&json).expect("problem serialization cannot fail")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemJson {
    a: f64,
    b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoints: Option<Vec<f64>>,
    values: Vec<f64>,
}

impl ProblemJson {
    fn into_problem(self) -> Result<Problem> {
        let grid = match self.breakpoints {
            Some(bps) => {
                let grid = CellGrid::new(bps)?;
                let scale = (self.b - self.a).abs().max(1.0);
                if (grid.a() - self.a).abs() > 1e-9 * scale
                    || (grid.b() - self.b).abs() > 1e-9 * scale
                {
                    return Err(Error::domain(format!(
                        "breakpoints span [{}, {}] but a/b declare [{}, {}]",
                        grid.a(),
                        grid.b(),
                        self.a,
                        self.b
                    )));
                }
                grid
            }
            None => CellGrid::uniform(self.a, self.b, self.values.len())?,
        };
        Problem::new(grid, StepFunction::new(self.values))
    }
}

/// Parsed CSV content; midpoint samples still need interval endpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum CsvData {
    Cells { breakpoints: Vec<f64>, values: Vec<f64> },
    Midpoints { x: Vec<f64>, values: Vec<f64> },
}

impl CsvData {
    /// Resolve into a problem; `endpoints` (a, b) are required for the
    /// midpoint-sample shape and ignored for explicit cells.
    pub fn into_problem(self, endpoints: Option<(f64, f64)>) -> Result<Problem> {
        match self {
            CsvData::Cells { breakpoints, values } => {
                Problem::new(CellGrid::new(breakpoints)?, StepFunction::new(values))
            }
            CsvData::Midpoints { x, values } => {
                let (a, b) = endpoints.ok_or_else(|| {
                    Error::domain(
                        "the x,f CSV format holds midpoint samples: declare the interval \
                         endpoints (--a and --b)"
                            .to_string(),
                    )
                })?;
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::domain("sample abscissae must be strictly increasing".to_string()));
                }
                if x.first().map(|&v| v < a).unwrap_or(false)
                    || x.last().map(|&v| v > b).unwrap_or(false)
                {
                    return Err(Error::domain(format!(
                        "samples lie outside the declared interval [{a}, {b}]"
                    )));
                }
                Problem::new(CellGrid::uniform(a, b, values.len())?, StepFunction::new(values))
            }
        }
    }
}

pub fn parse_csv(text: &str) -> Result<CsvData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::domain(format!("invalid CSV: {e}")))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();

    let field = |record: &csv::StringRecord, idx: usize, row: usize| -> Result<f64> {
        record
            .get(idx)
            .ok_or_else(|| Error::domain(format!("CSV row {row}: missing column {idx}")))?
            .parse::<f64>()
            .map_err(|e| Error::domain(format!("CSV row {row}: {e}")))
    };

    match headers.as_slice() {
        [a, b, c] if a == "x_left" && b == "x_right" && c == "f" => {
            let mut breakpoints: Vec<f64> = Vec::new();
            let mut values = Vec::new();
            for (row, record) in reader.records().enumerate() {
                let record = record.map_err(|e| Error::domain(format!("invalid CSV: {e}")))?;
                let left = field(&record, 0, row + 2)?;
                let right = field(&record, 1, row + 2)?;
                let f = field(&record, 2, row + 2)?;
                match breakpoints.last() {
                    None => breakpoints.push(left),
                    Some(&prev_right) => {
                        let scale = prev_right.abs().max(right.abs()).max(1.0);
                        if (left - prev_right).abs() > 1e-12 * scale {
                            return Err(Error::domain(format!(
                                "CSV row {}: cells must tile the interval, but x_left = {left} \
                                 does not match the previous x_right = {prev_right}",
                                row + 2
                            )));
                        }
                    }
                }
                breakpoints.push(right);
                values.push(f);
            }
            if values.is_empty() {
                return Err(Error::domain("CSV contains no data rows".to_string()));
            }
            Ok(CsvData::Cells { breakpoints, values })
        }
        [a, b] if a == "x" && b == "f" => {
            let mut x = Vec::new();
            let mut values = Vec::new();
            for (row, record) in reader.records().enumerate() {
                let record = record.map_err(|e| Error::domain(format!("invalid CSV: {e}")))?;
                x.push(field(&record, 0, row + 2)?);
                values.push(field(&record, 1, row + 2)?);
            }
            if values.is_empty() {
                return Err(Error::domain("CSV contains no data rows".to_string()));
            }
            Ok(CsvData::Midpoints { x, values })
        }
        other => Err(Error::domain(format!(
            "unrecognized CSV header {other:?}; expected x_left,x_right,f or x,f"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_with_breakpoints() {
        let p = Problem::from_json_str(
            r#"{"a": 0.0, "b": 1.0, "breakpoints": [0.0, 0.25, 1.0], "values": [2.0, 1.0]}"#,
        )
        .unwrap();
        assert_eq!(p.grid.breakpoints(), &[0.0, 0.25, 1.0]);
        assert_eq!(p.f.values(), &[2.0, 1.0]);
    }

    #[test]
    fn json_uniform_when_no_breakpoints() {
        let p = Problem::from_json_str(r#"{"a": 0.0, "b": 2.0, "values": [3.0, 1.0]}"#).unwrap();
        assert_eq!(p.grid.breakpoints(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn json_rejects_inconsistent_endpoints() {
        assert!(Problem::from_json_str(
            r#"{"a": 0.0, "b": 5.0, "breakpoints": [0.0, 1.0], "values": [1.0]}"#
        )
        .is_err());
        assert!(Problem::from_json_str(r#"{"a": 0.0, "b": 1.0, "values": []}"#).is_err());
        assert!(Problem::from_json_str("not json").is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Problem::from_json_str(r#"{"a": 0.0, "b": 2.0, "values": [3.0, 1.0]}"#).unwrap();
        let back = Problem::from_json_str(&p.to_json_string()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn csv_cells_format() {
        let data = parse_csv("x_left,x_right,f\n0.0,0.5,2.0\n0.5,1.0,1.0\n").unwrap();
        let p = data.into_problem(None).unwrap();
        assert_eq!(p.grid.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.f.values(), &[2.0, 1.0]);
    }

    #[test]
    fn csv_cells_must_tile() {
        let data = parse_csv("x_left,x_right,f\n0.0,0.5,2.0\n0.6,1.0,1.0\n");
        assert!(data.is_err());
    }

    #[test]
    fn csv_cells_must_increase() {
        let data = parse_csv("x_left,x_right,f\n0.0,0.5,2.0\n0.5,0.4,1.0\n").unwrap();
        assert!(data.into_problem(None).is_err());
    }

    #[test]
    fn csv_midpoint_format_needs_endpoints() {
        let data = parse_csv("x,f\n0.25,2.0\n0.75,1.0\n").unwrap();
        assert!(data.clone().into_problem(None).is_err());
        let p = data.into_problem(Some((0.0, 1.0))).unwrap();
        assert_eq!(p.grid.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.f.values(), &[2.0, 1.0]);
    }

    #[test]
    fn csv_rejects_unknown_header_and_bad_numbers() {
        assert!(parse_csv("time,value\n1,2\n").is_err());
        assert!(parse_csv("x,f\nabc,2.0\n").is_err());
        assert!(parse_csv("x,f\n").is_err());
    }
}
