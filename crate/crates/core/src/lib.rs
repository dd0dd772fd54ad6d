//! Structure and utilization matrices of directed transportation networks.
//!
//! * [`graph`]: the network itself and the matrices derived from it alone
//!   (adjacency `A`, hop-count path matrix `P`, external matrix `E = P − A`,
//!   binarizations), strong connectivity and period.
//! * [`trajectory`]: agent trajectories and the flow, OD, indirect,
//!   alternative-route and substitute-route matrices at set, count and
//!   structure level.
//! * [`relations`]: cellwise verification of the identities linking the two.
//! * [`ideal`]: the analytic ideal flow `diag(π)·S` of the uniform random walk,
//!   entropy, and ideal-flow classification.
//! * [`sim`]: seeded multi-agent random walks converging to the ideal flow.
//! * [`io`]: CSV/JSON encodings.

pub mod error;
pub mod graph;
pub mod ideal;
pub mod io;
pub mod matrix;
pub mod relations;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result, TrajectoryError};
pub use graph::{
    binarize, external_matrix, DirectedGraph, Distance, DistanceMatrix, StructureMatrices,
};
pub use ideal::{
    classify_ideal_flow, entropy, ideal_flow, stationary_distribution, Classification, IdealClass,
    IdealFlowAnalysis, IdealFlowMatrix, IdealProperty, ScaleMode, StationaryDistribution,
    TransitionMatrix,
};
pub use matrix::{BinaryMatrix, CountMatrix, Matrix, RealMatrix, SetMatrix};
pub use relations::{
    hadamard, verify_identities, verify_inequality, verify_premagic, verify_premagic_counts,
    VerificationReport,
};
pub use sim::{
    convergence_study, relative_flow, simulate, CheckpointSpacing, ConvergenceSeries,
    CountAggregate, SimConfig, Simulation,
};
pub use trajectory::{count, partition_indirect, Trajectory, TrajectorySet, Utilization};
