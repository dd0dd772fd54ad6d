//! Seeded multi-agent uniform random walks and their convergence toward the
//! analytic ideal flow.
//!
//! Agent `a` draws from its own ChaCha stream `(seed, a)`, so the aggregate
//! counts do not depend on how agents are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::ideal::{rescale, IdealFlowMatrix, ScaleMode};
use crate::matrix::{CountMatrix, RealMatrix};
use crate::trajectory::{Trajectory, TrajectorySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckpointSpacing {
    #[default]
    Even,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub agents: u64,
    /// Counted steps per agent.
    pub steps: u64,
    pub seed: u64,
    pub checkpoints: u64,
    pub record_trajectories: bool,
    /// Uncounted steps each agent takes before counting starts.
    pub warmup: u64,
    pub spacing: CheckpointSpacing,
}

impl SimConfig {
    pub fn new(agents: u64, steps: u64, seed: u64) -> Self {
        SimConfig {
            agents,
            steps,
            seed,
            checkpoints: 1,
            record_trajectories: false,
            warmup: 0,
            spacing: CheckpointSpacing::Even,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::ZeroAgents);
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be positive".into()));
        }
        if self.checkpoints == 0 || self.checkpoints > self.steps {
            return Err(Error::InvalidConfig(format!(
                "checkpoints must be in 1..={}, got {}",
                self.steps, self.checkpoints
            )));
        }
        Ok(())
    }

    /// Per-agent step counts at which snapshots are taken; strictly
    /// increasing and ending at `steps`. Logarithmic spacing can yield fewer
    /// than `checkpoints` points when rounding collides.
    pub fn checkpoint_times(&self) -> Vec<u64> {
        let (t, c) = (self.steps, self.checkpoints);
        let mut times: Vec<u64> = match self.spacing {
            CheckpointSpacing::Even => (1..=c).map(|k| (k * t).div_ceil(c)).collect(),
            CheckpointSpacing::Logarithmic => (1..=c)
                .map(|k| ((t as f64).powf(k as f64 / c as f64).round() as u64).clamp(1, t))
                .collect(),
        };
        times.dedup();
        *times.last_mut().expect("at least one checkpoint") = t;
        times
    }
}

/// Link traversal counts R, with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountAggregate {
    pub counts: CountMatrix,
    pub total_steps: u64,
}

impl CountAggregate {
    pub fn probability_scaled(&self) -> RealMatrix {
        rescale(&self.counts.to_real(), ScaleMode::Probability)
    }
}

/// Counts snapshot after every agent has taken `agent_steps` counted steps.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub agent_steps: u64,
    pub cumulative_steps: u64,
    pub aggregate: CountAggregate,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub snapshots: Vec<Snapshot>,
    pub trajectories: Option<TrajectorySet>,
}

impl Simulation {
    pub fn run(graph: &DirectedGraph, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        if let Some(&sink) = graph.sinks().first() {
            return Err(Error::SinkNode(sink));
        }
        let n = graph.node_count();
        let times = cfg.checkpoint_times();
        let walker = Walker {
            graph,
            cfg,
            times: &times,
        };

        let (segments, trajectories) = if cfg.record_trajectories {
            let paths: Vec<Vec<usize>> = (0..cfg.agents)
                .into_par_iter()
                .map(|a| {
                    let mut path = Vec::with_capacity(cfg.steps as usize + 1);
                    walker.walk(a, |_, from, to| {
                        if path.is_empty() {
                            path.push(from);
                        }
                        path.push(to);
                    });
                    path
                })
                .collect();
            let mut segments = vec![vec![0u64; n * n]; times.len()];
            for path in &paths {
                let mut seg = 0;
                for (s, w) in path.windows(2).enumerate() {
                    if s as u64 >= times[seg] {
                        seg += 1;
                    }
                    segments[seg][w[0] * n + w[1]] += 1;
                }
            }
            let trajectories = paths
                .into_iter()
                .enumerate()
                .map(|(a, path)| Trajectory {
                    id: a as u64 + 1,
                    path,
                })
                .collect();
            (segments, Some(TrajectorySet::new(graph, trajectories)?))
        } else {
            let empty = || vec![vec![0u64; n * n]; times.len()];
            let segments = (0..cfg.agents)
                .into_par_iter()
                .fold(empty, |mut acc, a| {
                    walker.walk(a, |seg, from, to| acc[seg][from * n + to] += 1);
                    acc
                })
                .reduce(empty, |mut x, y| {
                    for (xs, ys) in x.iter_mut().zip(y) {
                        for (a, b) in xs.iter_mut().zip(ys) {
                            *a += b;
                        }
                    }
                    x
                });
            (segments, None)
        };

        let mut running = vec![0u64; n * n];
        let snapshots = times
            .iter()
            .zip(segments)
            .map(|(&t, seg)| {
                for (r, s) in running.iter_mut().zip(seg) {
                    *r += s;
                }
                let counts = CountMatrix::from_fn(n, n, |i, j| running[i * n + j]);
                Snapshot {
                    agent_steps: t,
                    cumulative_steps: cfg.agents * t,
                    aggregate: CountAggregate {
                        counts,
                        total_steps: cfg.agents * t,
                    },
                }
            })
            .collect();
        Ok(Simulation {
            snapshots,
            trajectories,
        })
    }

    pub fn final_aggregate(&self) -> &CountAggregate {
        &self
            .snapshots
            .last()
            .expect("at least one snapshot")
            .aggregate
    }

    /// L∞ distance of every snapshot's probability-scaled flow to `target`.
    pub fn convergence(&self, target: &IdealFlowMatrix) -> Result<ConvergenceSeries> {
        let target = target.probability_scaled();
        let points = self
            .snapshots
            .iter()
            .map(|s| {
                Ok(ConvergencePoint {
                    cumulative_steps: s.cumulative_steps,
                    linf_distance: s.aggregate.probability_scaled().max_abs_diff(&target)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConvergenceSeries { points })
    }
}

struct Walker<'a> {
    graph: &'a DirectedGraph,
    cfg: &'a SimConfig,
    times: &'a [u64],
}

impl Walker<'_> {
    /// Walks agent `a`, calling `visit(segment, from, to)` for each counted step.
    fn walk(&self, agent: u64, mut visit: impl FnMut(usize, usize, usize)) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(agent);
        let mut at = rng.gen_range(0..self.graph.node_count());
        let step = |rng: &mut ChaCha8Rng, at: usize| {
            let next = self.graph.successors(at);
            next[rng.gen_range(0..next.len())]
        };
        for _ in 0..self.cfg.warmup {
            at = step(&mut rng, at);
        }
        let mut seg = 0;
        for s in 0..self.cfg.steps {
            if s >= self.times[seg] {
                seg += 1;
            }
            let to = step(&mut rng, at);
            visit(seg, at, to);
            at = to;
        }
    }
}

pub fn simulate(
    graph: &DirectedGraph,
    cfg: &SimConfig,
) -> Result<(CountAggregate, Option<TrajectorySet>)> {
    let mut sim = Simulation::run(graph, cfg)?;
    let aggregate = sim
        .snapshots
        .pop()
        .expect("at least one snapshot")
        .aggregate;
    Ok((aggregate, sim.trajectories))
}

/// `R / min R` over the nonzero entries.
pub fn relative_flow(aggregate: &CountAggregate) -> Result<RealMatrix> {
    if aggregate.counts.total() == 0 {
        return Err(Error::AllZero);
    }
    Ok(rescale(
        &aggregate.counts.to_real(),
        ScaleMode::MinNormalized,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub cumulative_steps: u64,
    pub linf_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub points: Vec<ConvergencePoint>,
}

impl ConvergenceSeries {
    pub fn final_distance(&self) -> Option<f64> {
        self.points.last().map(|p| p.linf_distance)
    }

    /// Number of checkpoints whose distance rose relative to the previous one.
    pub fn increases(&self) -> usize {
        self.points
            .windows(2)
            .filter(|w| w[1].linf_distance > w[0].linf_distance)
            .count()
    }
}

pub fn convergence_study(
    graph: &DirectedGraph,
    cfg: &SimConfig,
    target: &IdealFlowMatrix,
) -> Result<ConvergenceSeries> {
    Simulation::run(graph, cfg)?.convergence(target)
}
