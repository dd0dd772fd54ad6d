#![allow(dead_code)]

use idealflow::{DirectedGraph, Trajectory, TrajectorySet};
use rand::Rng;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Digraph on `n` labelled nodes with the given index edges.
pub fn digraph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
    let l = labels(n);
    DirectedGraph::with_nodes(
        l.iter(),
        edges.iter().map(|&(u, v)| (l[u].as_str(), l[v].as_str())),
    )
    .unwrap()
}

/// Every simple digraph on `n` nodes, by bitmask over the n(n-1) off-diagonal pairs.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = DirectedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        digraph(n, &edges)
    })
}

pub fn random_digraph(rng: &mut impl Rng, n: usize, density: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    digraph(n, &edges)
}

/// Rejection-samples a strongly connected digraph with 2 <= n <= max_n.
pub fn random_strongly_connected(rng: &mut impl Rng, max_n: usize) -> DirectedGraph {
    loop {
        let n = rng.gen_range(2..=max_n);
        let density = rng.gen_range(0.2..=1.0);
        let g = random_digraph(rng, n, density);
        if g.is_strongly_connected() {
            return g;
        }
    }
}

/// Random walks of 2..=max_len nodes; a walk stops early at a sink.
pub fn random_walk_corpus(
    rng: &mut impl Rng,
    g: &DirectedGraph,
    max_trajectories: usize,
    max_len: usize,
) -> TrajectorySet {
    let starts: Vec<usize> = (0..g.node_count())
        .filter(|&i| g.out_degree(i) > 0)
        .collect();
    let mut trajectories = Vec::new();
    if !starts.is_empty() {
        for id in 1..=rng.gen_range(0..=max_trajectories) as u64 {
            let len = rng.gen_range(2..=max_len);
            let mut path = vec![starts[rng.gen_range(0..starts.len())]];
            while path.len() < len {
                let next = g.successors(*path.last().unwrap());
                if next.is_empty() {
                    break;
                }
                path.push(next[rng.gen_range(0..next.len())]);
            }
            trajectories.push(Trajectory { id, path });
        }
    }
    TrajectorySet::new(g, trajectories).unwrap()
}
