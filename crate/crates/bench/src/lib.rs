//! Deterministic inputs for the benchmarks.

use idealflow::{DirectedGraph, SimConfig, TrajectorySet};

/// Ring on `n` nodes plus `chords` forward shortcuts per node; strongly
/// connected and aperiodic whenever some chord closes a cycle of coprime length.
pub fn ring_with_chords(n: usize, chords: usize) -> DirectedGraph {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n));
        for k in 1..=chords {
            let j = (i * 7 + k * 13 + 2) % n;
            if j != i && j != (i + 1) % n && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    DirectedGraph::with_nodes(
        labels.iter(),
        edges
            .iter()
            .map(|&(u, v)| (labels[u].as_str(), labels[v].as_str())),
    )
    .expect("generated edges are simple")
}

/// Recorded random walks: `agents` trajectories of `steps + 1` nodes each.
pub fn walk_corpus(graph: &DirectedGraph, agents: u64, steps: u64) -> TrajectorySet {
    let cfg = SimConfig {
        record_trajectories: true,
        ..SimConfig::new(agents, steps, 1)
    };
    idealflow::simulate(graph, &cfg)
        .expect("graph has no sinks")
        .1
        .expect("recording was requested")
}
