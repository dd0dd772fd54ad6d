//! Trajectory ingestion and the utilization matrices at set, count and
//! structure level.
//!
//! Every cell holds the set of trajectory ids satisfying the cell's defining
//! condition; a trajectory that meets the condition several times is still
//! recorded once. Diagonal cells are always empty.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result, TrajectoryError};
use crate::graph::{binarize, DirectedGraph};
use crate::matrix::{BinaryMatrix, CountMatrix, SetMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub id: u64,
    /// Node indices into the owning graph.
    pub path: Vec<usize>,
}

/// Validated trajectories over one graph.
#[derive(Debug, Clone)]
pub struct TrajectorySet {
    node_count: usize,
    trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    /// Validates index-based trajectories against `graph`, reporting every problem.
    pub fn new(graph: &DirectedGraph, trajectories: Vec<Trajectory>) -> Result<Self> {
        let mut errors = Vec::new();
        let mut seen = HashSet::new();
        for tr in &trajectories {
            check_trajectory(graph, tr, &mut seen, &mut errors);
        }
        if !errors.is_empty() {
            return Err(Error::InvalidTrajectories(errors));
        }
        Ok(TrajectorySet {
            node_count: graph.node_count(),
            trajectories,
        })
    }

    pub fn empty(graph: &DirectedGraph) -> Self {
        TrajectorySet {
            node_count: graph.node_count(),
            trajectories: Vec::new(),
        }
    }

    /// Parses lines of the form `<id>: <node> <node> ...`.
    pub fn parse(text: &str, graph: &DirectedGraph) -> Result<Self> {
        let mut errors = Vec::new();
        let mut trajectories = Vec::new();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: &str| TrajectoryError::Malformed {
                line: lineno + 1,
                message: message.to_string(),
            };
            let Some((id_text, rest)) = line.split_once(':') else {
                errors.push(malformed("expected `<id>: <node> <node> ...`"));
                continue;
            };
            let id = match id_text.trim().parse::<u64>() {
                Ok(id) if id > 0 => id,
                _ => {
                    errors.push(malformed("trajectory id must be a positive integer"));
                    continue;
                }
            };
            let mut path = Vec::new();
            let mut unknown = false;
            for label in rest.split_whitespace() {
                match graph.index_of(label) {
                    Some(i) => path.push(i),
                    None => {
                        errors.push(TrajectoryError::UnknownNode {
                            id,
                            label: label.to_string(),
                        });
                        unknown = true;
                    }
                }
            }
            if unknown {
                continue;
            }
            let tr = Trajectory { id, path };
            check_trajectory(graph, &tr, &mut seen, &mut errors);
            trajectories.push(tr);
        }
        if !errors.is_empty() {
            return Err(Error::InvalidTrajectories(errors));
        }
        Ok(TrajectorySet {
            node_count: graph.node_count(),
            trajectories,
        })
    }

    pub fn read(path: impl AsRef<Path>, graph: &DirectedGraph) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, graph)
    }

    /// Renders the set back to the trajectory file format.
    pub fn to_text(&self, graph: &DirectedGraph) -> String {
        let mut out = String::new();
        for tr in &self.trajectories {
            write!(out, "{}:", tr.id).unwrap();
            for &v in &tr.path {
                write!(out, " {}", graph.label(v)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// F̃: ids whose path traverses link (i, j).
    pub fn flow_set(&self) -> SetMatrix {
        self.collect(|path, emit| {
            for w in path.windows(2) {
                emit(w[0], w[1]);
            }
        })
    }

    /// D̃: ids that visit s and later t, directly or through other nodes.
    pub fn od_set(&self) -> SetMatrix {
        self.collect(|path, emit| {
            for p in 0..path.len() {
                for q in p + 1..path.len() {
                    emit(path[p], path[q]);
                }
            }
        })
    }

    /// L̃: ids that visit s and later t with at least one position in between.
    pub fn indirect_set(&self) -> SetMatrix {
        self.collect(|path, emit| {
            for p in 0..path.len() {
                for q in p + 2..path.len() {
                    emit(path[p], path[q]);
                }
            }
        })
    }

    fn collect(&self, scan: impl Fn(&[usize], &mut dyn FnMut(usize, usize))) -> SetMatrix {
        let n = self.node_count;
        let mut sets = SetMatrix::zeros(n, n);
        for tr in &self.trajectories {
            scan(&tr.path, &mut |s, t| {
                if s != t {
                    sets[(s, t)].insert(tr.id);
                }
            });
        }
        sets
    }

    /// All five set matrices with their count and binary levels.
    pub fn utilization(&self, adjacency: &BinaryMatrix) -> Result<Utilization> {
        let indirect = self.indirect_set();
        let (alternative, substitute) = partition_indirect(&indirect, adjacency)?;
        Ok(Utilization {
            flow: UtilizationLevels::from_sets(self.flow_set()),
            od: UtilizationLevels::from_sets(self.od_set()),
            indirect: UtilizationLevels::from_sets(indirect),
            alternative: UtilizationLevels::from_sets(alternative),
            substitute: UtilizationLevels::from_sets(substitute),
        })
    }
}

fn check_trajectory(
    graph: &DirectedGraph,
    tr: &Trajectory,
    seen: &mut HashSet<u64>,
    errors: &mut Vec<TrajectoryError>,
) {
    if !seen.insert(tr.id) {
        errors.push(TrajectoryError::DuplicateId(tr.id));
    }
    if tr.path.len() < 2 {
        errors.push(TrajectoryError::TooShort(tr.id));
    }
    if let Some(&bad) = tr.path.iter().find(|&&v| v >= graph.node_count()) {
        errors.push(TrajectoryError::UnknownNode {
            id: tr.id,
            label: format!("#{bad}"),
        });
        return;
    }
    for w in tr.path.windows(2) {
        if !graph.has_edge(w[0], w[1]) {
            errors.push(TrajectoryError::NonEdgeStep {
                id: tr.id,
                from: graph.label(w[0]).to_string(),
                to: graph.label(w[1]).to_string(),
            });
        }
    }
}

/// Splits L̃ by whether a direct link exists: (T̃, T̃ᶜ).
pub fn partition_indirect(
    indirect: &SetMatrix,
    adjacency: &BinaryMatrix,
) -> Result<(SetMatrix, SetMatrix)> {
    indirect.ensure_same_shape(adjacency)?;
    let pick = |linked: bool| {
        SetMatrix::from_fn(indirect.rows(), indirect.cols(), |i, j| {
            if (adjacency[(i, j)] == 1) == linked {
                indirect[(i, j)].clone()
            } else {
                BTreeSet::new()
            }
        })
    };
    Ok((pick(true), pick(false)))
}

pub fn count(sets: &SetMatrix) -> CountMatrix {
    sets.map(|s| s.len() as u64)
}

#[derive(Debug, Clone)]
pub struct UtilizationLevels {
    pub sets: SetMatrix,
    pub counts: CountMatrix,
    pub structure: BinaryMatrix,
}

impl UtilizationLevels {
    pub fn from_sets(sets: SetMatrix) -> Self {
        let counts = count(&sets);
        let structure = binarize(&counts);
        UtilizationLevels {
            sets,
            counts,
            structure,
        }
    }
}

/// F, D, L, T and Tᶜ at every level.
#[derive(Debug, Clone)]
pub struct Utilization {
    pub flow: UtilizationLevels,
    pub od: UtilizationLevels,
    pub indirect: UtilizationLevels,
    pub alternative: UtilizationLevels,
    pub substitute: UtilizationLevels,
}

impl Utilization {
    /// `(file stem, levels)` pairs in a fixed order.
    pub fn named(&self) -> [(&'static str, &UtilizationLevels); 5] {
        [
            ("F", &self.flow),
            ("D", &self.od),
            ("L", &self.indirect),
            ("T", &self.alternative),
            ("TC", &self.substitute),
        ]
    }
}
