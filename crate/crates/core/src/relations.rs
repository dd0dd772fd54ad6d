//! Cellwise checks of the structure/utilization identities.
//!
//! All identities are evaluated on count-level (integer) matrices; the
//! premagic check also accepts real matrices with a tolerance.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::DirectedGraph;
use crate::matrix::{BinaryMatrix, CountMatrix, Matrix, RealMatrix};

/// Defect lists stop growing past this many cells; `defect_count` keeps the total.
pub const MAX_DEFECTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub row: usize,
    pub col: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub col_label: Option<String>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub holds: bool,
    pub defect_count: usize,
    pub defects: Vec<Defect>,
}

impl VerificationReport {
    fn new(identity: &str) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            holds: true,
            defect_count: 0,
            defects: Vec::new(),
        }
    }

    fn push(&mut self, row: usize, col: usize, lhs: f64, rhs: f64) {
        self.holds = false;
        self.defect_count += 1;
        if self.defects.len() < MAX_DEFECTS {
            self.defects.push(Defect {
                row,
                col,
                row_label: None,
                col_label: None,
                lhs,
                rhs,
            });
        }
    }

    /// Fills in node labels for every defect cell.
    pub fn label_with(mut self, graph: &DirectedGraph) -> Self {
        for d in &mut self.defects {
            d.row_label = Some(graph.label(d.row).to_string());
            d.col_label = Some(graph.label(d.col).to_string());
        }
        self
    }
}

/// Elementwise product.
pub fn hadamard<T>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>>
where
    T: Copy + Mul<Output = T>,
{
    x.ensure_same_shape(y)?;
    Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
        x[(i, j)] * y[(i, j)]
    }))
}

fn signed(m: &CountMatrix) -> Matrix<i64> {
    m.map(|&v| v as i64)
}

fn signed_bits(m: &BinaryMatrix) -> Matrix<i64> {
    m.map(|&v| i64::from(v))
}

fn compare(identity: &str, lhs: &Matrix<i64>, rhs: &Matrix<i64>) -> VerificationReport {
    let mut report = VerificationReport::new(identity);
    for (i, j, &l) in lhs.iter_cells() {
        let r = rhs[(i, j)];
        if l != r {
            report.push(i, j, l as f64, r as f64);
        }
    }
    report
}

/// `F <= A∘D <= D` cellwise. A cell violating both halves is reported twice.
pub fn verify_inequality(
    flow: &CountMatrix,
    adjacency: &BinaryMatrix,
    od: &CountMatrix,
) -> Result<VerificationReport> {
    flow.ensure_same_shape(od)?;
    let linked_od = hadamard(&adjacency.to_counts(), od)?;
    let mut report = VerificationReport::new("F <= A∘D <= D");
    for (i, j, &f) in flow.iter_cells() {
        let (ad, d) = (linked_od[(i, j)], od[(i, j)]);
        if f > ad {
            report.push(i, j, f as f64, ad as f64);
        }
        if ad > d {
            report.push(i, j, ad as f64, d as f64);
        }
    }
    Ok(report)
}

/// The four structure/utilization identities, each checked independently with
/// exact integer equality:
///
/// 1. `L = T + Ê∘D`
/// 2. `A∘D = D − Ê∘D`
/// 3. `D = P̂∘D`
/// 4. `F = A∘D − T`
#[allow(clippy::too_many_arguments)]
pub fn verify_identities(
    flow: &CountMatrix,
    od: &CountMatrix,
    indirect: &CountMatrix,
    alternative: &CountMatrix,
    adjacency: &BinaryMatrix,
    phat: &BinaryMatrix,
    ehat: &BinaryMatrix,
) -> Result<Vec<VerificationReport>> {
    for m in [od, indirect, alternative] {
        flow.ensure_same_shape(m)?;
    }
    for m in [adjacency, phat, ehat] {
        flow.ensure_same_shape(m)?;
    }
    let (f, d, l, t) = (
        signed(flow),
        signed(od),
        signed(indirect),
        signed(alternative),
    );
    let (a, phat, ehat) = (signed_bits(adjacency), signed_bits(phat), signed_bits(ehat));

    let ehat_d = hadamard(&ehat, &d)?;
    let a_d = hadamard(&a, &d)?;
    let cellwise = |x: &Matrix<i64>, y: &Matrix<i64>, op: fn(i64, i64) -> i64| {
        Matrix::from_fn(x.rows(), x.cols(), |i, j| op(x[(i, j)], y[(i, j)]))
    };

    Ok(vec![
        compare("L = T + Ê∘D", &l, &cellwise(&t, &ehat_d, |x, y| x + y)),
        compare("A∘D = D − Ê∘D", &a_d, &cellwise(&d, &ehat_d, |x, y| x - y)),
        compare("D = P̂∘D", &d, &hadamard(&phat, &d)?),
        compare("F = A∘D − T", &f, &cellwise(&a_d, &t, |x, y| x - y)),
    ])
}

/// Row sums against column sums, node by node. Defects use `row == col == node`.
pub fn verify_premagic(m: &RealMatrix, tolerance: f64) -> Result<VerificationReport> {
    m.ensure_square()?;
    let mut report = VerificationReport::new("premagic");
    let (rows, cols) = (m.row_sums(), m.col_sums());
    for (i, (r, c)) in rows.iter().zip(&cols).enumerate() {
        if (r - c).abs() > tolerance {
            report.push(i, i, *r, *c);
        }
    }
    Ok(report)
}

/// Exact premagic check for integer matrices.
pub fn verify_premagic_counts(m: &CountMatrix) -> Result<VerificationReport> {
    m.ensure_square()?;
    let mut report = VerificationReport::new("premagic");
    for i in 0..m.rows() {
        let r: u64 = m.row(i).iter().sum();
        let c: u64 = (0..m.rows()).map(|k| m[(k, i)]).sum();
        if r != c {
            report.push(i, i, r as f64, c as f64);
        }
    }
    Ok(report)
}
