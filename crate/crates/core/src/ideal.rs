//! Analytic ideal flow of a uniform random walk.
//!
//! With `S` the uniform-choice transition matrix and `π` its stationary
//! distribution, the ideal flow is `diag(π)·S`, optionally rescaled so that the
//! smallest nonzero link flow equals 1. Column sums of `diag(π)·S` are `πS = π`
//! and row sums are `π`, so the result is premagic by construction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{period_lists, strongly_connected_lists, DirectedGraph};
use crate::matrix::{BinaryMatrix, RealMatrix};
use crate::relations::verify_premagic;

/// Largest chain solved by dense LU; bigger chains use power iteration.
pub const DIRECT_SOLVE_LIMIT: usize = 500;
/// Required `‖πS − π‖∞` for an accepted stationary distribution.
pub const STATIONARY_RESIDUAL: f64 = 1e-10;
/// Default tolerance for matrix property checks on real-valued flows.
pub const PROPERTY_TOLERANCE: f64 = 1e-9;

const POWER_MAX_ITERATIONS: usize = 2_000_000;

/// Row-stochastic matrix of a walk that picks an outgoing link uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix(RealMatrix);

impl TransitionMatrix {
    pub fn from_adjacency(adjacency: &BinaryMatrix) -> Result<Self> {
        adjacency.ensure_square()?;
        let n = adjacency.rows();
        let mut s = RealMatrix::zeros(n, n);
        for i in 0..n {
            let degree = adjacency.row(i).iter().filter(|&&a| a == 1).count();
            if degree == 0 {
                return Err(Error::SinkNode(i));
            }
            for j in 0..n {
                if adjacency[(i, j)] == 1 {
                    s[(i, j)] = 1.0 / degree as f64;
                }
            }
        }
        Ok(TransitionMatrix(s))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.rows()
    }

    fn successor_lists(&self) -> Vec<Vec<usize>> {
        (0..self.size())
            .map(|i| {
                self.0
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    /// `x·S` for a row vector `x`.
    pub fn left_multiply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut out = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &s) in out.iter_mut().zip(self.0.row(i)) {
                *o += xi * s;
            }
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        strongly_connected_lists(&self.successor_lists())
    }

    /// Per-row Shannon entropy in bits: log₂ of each node's out-degree.
    pub fn row_entropies(&self) -> Vec<f64> {
        (0..self.size())
            .map(|i| entropy(self.0.row(i)).expect("rows are stochastic"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution(Vec<f64>);

impl StationaryDistribution {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn residual(&self, s: &TransitionMatrix) -> f64 {
        residual(&self.0, s)
    }
}

fn residual(pi: &[f64], s: &TransitionMatrix) -> f64 {
    s.left_multiply(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= total;
    }
}

/// Stationary distribution of an irreducible chain, by direct solve for
/// `n <= DIRECT_SOLVE_LIMIT` and power iteration above that.
pub fn stationary_distribution(s: &TransitionMatrix) -> Result<StationaryDistribution> {
    if s.size() <= DIRECT_SOLVE_LIMIT {
        stationary_direct(s)
    } else {
        stationary_power_iteration(s, STATIONARY_RESIDUAL)
    }
}

/// Solves `(Sᵀ − I)πᵀ = 0` with the last balance equation replaced by `Σπ = 1`.
pub fn stationary_direct(s: &TransitionMatrix) -> Result<StationaryDistribution> {
    if !s.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    let n = s.size();
    let sm = s.matrix();
    let system = DMatrix::from_fn(n, n, |i, j| {
        if i == n - 1 {
            1.0
        } else {
            sm[(j, i)] - if i == j { 1.0 } else { 0.0 }
        }
    });
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::ConvergenceFailure(f64::NAN))?;

    // Irreducible chains have a strictly positive π; clamp round-off only.
    let mut pi: Vec<f64> = solution.iter().map(|&x| x.max(0.0)).collect();
    normalize(&mut pi);
    let r = residual(&pi, s);
    if r > STATIONARY_RESIDUAL {
        return Err(Error::ConvergenceFailure(r));
    }
    Ok(StationaryDistribution(pi))
}

/// Power iteration on the lazy chain `(I + S)/2`, which has the same
/// stationary distribution as `S` but is aperiodic, so it converges on
/// periodic graphs too.
pub fn stationary_power_iteration(
    s: &TransitionMatrix,
    tolerance: f64,
) -> Result<StationaryDistribution> {
    if !s.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    let n = s.size();
    let mut pi = vec![1.0 / n as f64; n];
    let mut r = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERATIONS {
        let next = s.left_multiply(&pi);
        r = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if r <= tolerance {
            return Ok(StationaryDistribution(pi));
        }
        for (p, x) in pi.iter_mut().zip(&next) {
            *p = 0.5 * (*p + x);
        }
        normalize(&mut pi);
    }
    Err(Error::ConvergenceFailure(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Entries sum to one.
    Probability,
    /// Smallest nonzero entry equals one.
    MinNormalized,
}

impl ScaleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleMode::Probability => "probability",
            ScaleMode::MinNormalized => "min-normalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealFlowMatrix {
    flow: RealMatrix,
    mode: ScaleMode,
}

impl IdealFlowMatrix {
    pub fn new(flow: RealMatrix, mode: ScaleMode) -> Self {
        IdealFlowMatrix { flow, mode }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.flow
    }

    pub fn mode(&self) -> ScaleMode {
        self.mode
    }

    pub fn rescaled(&self, mode: ScaleMode) -> IdealFlowMatrix {
        IdealFlowMatrix {
            flow: rescale(&self.flow, mode),
            mode,
        }
    }

    /// Same flow with entries summing to one.
    pub fn probability_scaled(&self) -> RealMatrix {
        rescale(&self.flow, ScaleMode::Probability)
    }
}

/// Divides by the total (probability mode) or by the smallest nonzero entry.
/// A matrix with no nonzero entry is returned unchanged.
pub fn rescale(m: &RealMatrix, mode: ScaleMode) -> RealMatrix {
    let divisor = match mode {
        ScaleMode::Probability => m.as_slice().iter().sum::<f64>(),
        ScaleMode::MinNormalized => m
            .as_slice()
            .iter()
            .copied()
            .filter(|&v| v != 0.0)
            .fold(f64::INFINITY, f64::min),
    };
    if divisor == 0.0 || !divisor.is_finite() {
        return m.clone();
    }
    m.map(|&v| v / divisor)
}

/// `diag(π)·S`, scaled per `mode`.
pub fn ideal_flow(
    pi: &StationaryDistribution,
    s: &TransitionMatrix,
    mode: ScaleMode,
) -> IdealFlowMatrix {
    let sm = s.matrix();
    let raw = RealMatrix::from_fn(sm.rows(), sm.cols(), |i, j| pi.0[i] * sm[(i, j)]);
    IdealFlowMatrix {
        flow: rescale(&raw, mode),
        mode,
    }
}

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if let Some(i) = p.iter().position(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidProbability(i));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    Ok(h + 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealProperty {
    Nonnegative,
    ZeroDiagonal,
    Premagic,
    EqualOutflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealClass {
    NotIdeal,
    GeneralizedIdeal,
    StandardIdeal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: IdealClass,
    /// First property that failed, if any.
    pub violated: Option<IdealProperty>,
    /// All-zero matrix: properties hold only vacuously.
    pub degenerate: bool,
}

/// Checks nonnegativity, zero diagonal and premagic (generalized ideal flow),
/// then equal nonzero entries within every row (standard ideal flow).
pub fn classify_ideal_flow(m: &RealMatrix, tolerance: f64) -> Result<Classification> {
    m.ensure_square()?;
    let not_ideal = |p| Classification {
        class: IdealClass::NotIdeal,
        violated: Some(p),
        degenerate: false,
    };
    if m.as_slice().iter().any(|&v| v < -tolerance || v.is_nan()) {
        return Ok(not_ideal(IdealProperty::Nonnegative));
    }
    if (0..m.rows()).any(|i| m[(i, i)].abs() > tolerance) {
        return Ok(not_ideal(IdealProperty::ZeroDiagonal));
    }
    if !verify_premagic(m, tolerance)?.holds {
        return Ok(not_ideal(IdealProperty::Premagic));
    }
    if m.as_slice().iter().all(|&v| v == 0.0) {
        return Ok(Classification {
            class: IdealClass::GeneralizedIdeal,
            violated: None,
            degenerate: true,
        });
    }
    let equal_outflow = (0..m.rows()).all(|i| {
        let mut nonzero = m.row(i).iter().filter(|&&v| v != 0.0);
        match nonzero.next() {
            None => true,
            Some(&first) => nonzero.all(|&v| (v - first).abs() <= tolerance),
        }
    });
    Ok(if equal_outflow {
        Classification {
            class: IdealClass::StandardIdeal,
            violated: None,
            degenerate: false,
        }
    } else {
        Classification {
            class: IdealClass::GeneralizedIdeal,
            violated: Some(IdealProperty::EqualOutflow),
            degenerate: false,
        }
    })
}

/// Everything derived from one graph's uniform random walk.
#[derive(Debug, Clone)]
pub struct IdealFlowAnalysis {
    pub transition: TransitionMatrix,
    pub stationary: StationaryDistribution,
    pub flow: IdealFlowMatrix,
    pub classification: Classification,
    /// Greater than 1 means the walk is periodic: the time-averaged flow is
    /// still this matrix, but the walk's distribution does not settle pointwise.
    pub period: u32,
}

impl IdealFlowAnalysis {
    pub fn compute(graph: &DirectedGraph, mode: ScaleMode, tolerance: f64) -> Result<Self> {
        if !graph.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let transition = TransitionMatrix::from_adjacency(&graph.adjacency_matrix())?;
        let stationary = stationary_distribution(&transition)?;
        let flow = ideal_flow(&stationary, &transition, mode);
        let classification = classify_ideal_flow(flow.matrix(), tolerance)?;
        let period = period_lists(&transition.successor_lists());
        Ok(IdealFlowAnalysis {
            transition,
            stationary,
            flow,
            classification,
            period,
        })
    }

    pub fn is_periodic(&self) -> bool {
        self.period > 1
    }
}
