//! CSV and JSON encodings of matrices, vectors and reports.
//!
//! CSV matrices carry node labels in the first row and first column (the
//! corner cell is empty). Unreachable distances are written as `inf`; reals
//! use 12 significant digits.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Distance;
use crate::ideal::{IdealFlowMatrix, ScaleMode, StationaryDistribution};
use crate::matrix::{Matrix, SetMatrix};
use crate::sim::ConvergenceSeries;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 ..= 1e12`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub trait CsvCell: Sized {
    fn to_cell(&self) -> String;
    fn from_cell(cell: &str) -> Option<Self>;
}

impl CsvCell for u8 {
    fn to_cell(&self) -> String {
        self.to_string()
    }
    fn from_cell(cell: &str) -> Option<Self> {
        cell.parse().ok()
    }
}

impl CsvCell for u64 {
    fn to_cell(&self) -> String {
        self.to_string()
    }
    fn from_cell(cell: &str) -> Option<Self> {
        cell.parse().ok()
    }
}

impl CsvCell for f64 {
    fn to_cell(&self) -> String {
        format_real(*self)
    }
    fn from_cell(cell: &str) -> Option<Self> {
        cell.parse().ok()
    }
}

impl CsvCell for Distance {
    fn to_cell(&self) -> String {
        self.to_string()
    }
    fn from_cell(cell: &str) -> Option<Self> {
        if cell == "inf" {
            Some(Distance::Unreachable)
        } else {
            cell.parse().ok().map(Distance::Hops)
        }
    }
}

pub fn matrix_to_csv<T: CsvCell>(labels: &[String], m: &Matrix<T>) -> Result<String> {
    if labels.len() != m.rows() || labels.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: (labels.len(), labels.len()),
            found: m.shape(),
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("").chain(labels.iter().map(String::as_str)))?;
    for (i, label) in labels.iter().enumerate() {
        let mut record = vec![label.clone()];
        record.extend(m.row(i).iter().map(CsvCell::to_cell));
        w.write_record(&record)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

/// Parses a labelled CSV matrix, returning the column labels and entries.
pub fn matrix_from_csv<T: CsvCell>(text: &str) -> Result<(Vec<String>, Matrix<T>)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                T::from_cell(cell).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("bad matrix cell `{cell}`"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    let m = Matrix::from_rows(rows)?;
    if m.cols() != labels.len() && m.rows() > 0 {
        return Err(Error::DimensionMismatch {
            expected: (m.rows(), labels.len()),
            found: m.shape(),
        });
    }
    Ok((labels, m))
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Hops(h) => s.serialize_u32(*h),
            Distance::Unreachable => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Hops(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Hops(h) => Ok(Distance::Hops(h)),
            Raw::Text(t) if t == "inf" => Ok(Distance::Unreachable),
            Raw::Text(t) => Err(de::Error::custom(format!(
                "expected hop count or `inf`, got `{t}`"
            ))),
        }
    }
}

/// JSON form of a labelled matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument<T> {
    pub nodes: Vec<String>,
    pub entries: Vec<Vec<T>>,
}

impl<T: Clone> MatrixDocument<T> {
    pub fn new(labels: &[String], m: &Matrix<T>) -> Self {
        MatrixDocument {
            nodes: labels.to_vec(),
            entries: m.to_rows(),
        }
    }

    pub fn into_matrix(self) -> Result<(Vec<String>, Matrix<T>)> {
        Ok((self.nodes, Matrix::from_rows(self.entries)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealFlowDocument {
    pub nodes: Vec<String>,
    pub scale_mode: ScaleMode,
    pub entries: Vec<Vec<f64>>,
}

impl IdealFlowDocument {
    pub fn new(labels: &[String], flow: &IdealFlowMatrix) -> Self {
        IdealFlowDocument {
            nodes: labels.to_vec(),
            scale_mode: flow.mode(),
            entries: flow.matrix().to_rows(),
        }
    }

    pub fn into_flow(self) -> Result<(Vec<String>, IdealFlowMatrix)> {
        let m = Matrix::from_rows(self.entries)?;
        Ok((self.nodes, IdealFlowMatrix::new(m, self.scale_mode)))
    }
}

/// JSON form of a set matrix: `rows[i][j]` is the sorted id list of cell (i, j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetMatrixDocument {
    pub nodes: Vec<String>,
    pub rows: Vec<Vec<Vec<u64>>>,
}

impl SetMatrixDocument {
    pub fn new(labels: &[String], m: &SetMatrix) -> Self {
        SetMatrixDocument {
            nodes: labels.to_vec(),
            rows: (0..m.rows())
                .map(|i| {
                    m.row(i)
                        .iter()
                        .map(|s| s.iter().copied().collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_matrix(self) -> Result<(Vec<String>, SetMatrix)> {
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(|ids| ids.into_iter().collect()).collect())
            .collect();
        Ok((self.nodes, Matrix::from_rows(rows)?))
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn stationary_to_csv(labels: &[String], pi: &StationaryDistribution) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["node", "pi"])?;
    for (label, p) in labels.iter().zip(pi.as_slice()) {
        w.write_record([label.as_str(), &format_real(*p)])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

pub fn stationary_from_csv(text: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record?;
        let bad = || Error::Parse {
            line: k + 2,
            message: "expected `node,pi`".into(),
        };
        labels.push(record.get(0).ok_or_else(bad)?.to_string());
        values.push(record.get(1).and_then(|v| v.parse().ok()).ok_or_else(bad)?);
    }
    Ok((labels, values))
}

pub fn convergence_to_csv(series: &ConvergenceSeries) -> String {
    let mut out = String::from("cumulative_nt,linf_distance\n");
    for p in &series.points {
        out.push_str(&format!(
            "{},{}\n",
            p.cumulative_steps,
            format_real(p.linf_distance)
        ));
    }
    out
}

pub fn convergence_from_csv(text: &str) -> Result<Vec<(u64, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .enumerate()
        .map(|(k, record)| {
            let record = record?;
            let bad = || Error::Parse {
                line: k + 2,
                message: "expected `cumulative_nt,linf_distance`".into(),
            };
            let nt = record.get(0).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let d = record.get(1).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            Ok((nt, d))
        })
        .collect()
}
