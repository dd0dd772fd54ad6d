mod common;

use common::{all_digraphs, random_digraph, random_strongly_connected};
use idealflow::{binarize, DirectedGraph, Distance, DistanceMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shortest hop counts by enumerating every simple path up to n nodes.
fn brute_force_paths(g: &DirectedGraph) -> DistanceMatrix {
    let n = g.node_count();
    let mut best = DistanceMatrix::filled(n, n, Distance::Unreachable);
    fn extend(g: &DirectedGraph, path: &mut Vec<usize>, best: &mut DistanceMatrix) {
        let (s, t) = (path[0], *path.last().unwrap());
        let len = Distance::Hops(path.len() as u32 - 1);
        if len < best[(s, t)] {
            best[(s, t)] = len;
        }
        for v in 0..g.node_count() {
            if g.has_edge(t, v) && !path.contains(&v) {
                path.push(v);
                extend(g, path, best);
                path.pop();
            }
        }
    }
    for s in 0..n {
        extend(g, &mut vec![s], &mut best);
    }
    best
}

/// Lengths of every simple directed cycle.
fn cycle_lengths(g: &DirectedGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut lengths = Vec::new();
    // Each cycle is enumerated once from its smallest node.
    fn dfs(g: &DirectedGraph, root: usize, path: &mut Vec<usize>, out: &mut Vec<usize>) {
        let last = *path.last().unwrap();
        for v in 0..g.node_count() {
            if !g.has_edge(last, v) {
                continue;
            }
            if v == root {
                out.push(path.len());
            } else if v > root && !path.contains(&v) {
                path.push(v);
                dfs(g, root, path, out);
                path.pop();
            }
        }
    }
    for root in 0..n {
        dfs(g, root, &mut vec![root], &mut lengths);
    }
    lengths
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether nodes split into `d` classes with every edge stepping class k -> k+1 (mod d).
fn has_cyclic_partition(g: &DirectedGraph, d: usize) -> bool {
    let n = g.node_count();
    let total = d.pow(n as u32);
    (0..total).any(|code| {
        let class: Vec<usize> = (0..n).map(|i| code / d.pow(i as u32) % d).collect();
        g.edges()
            .iter()
            .all(|&(u, v)| class[v] == (class[u] + 1) % d)
    })
}

fn check_structure_invariants(g: &DirectedGraph) {
    let s = g.structure_matrices();
    let n = g.node_count();
    for i in 0..n {
        assert_eq!(s.phat[(i, i)], 0);
        assert_eq!(s.ehat[(i, i)], 0);
        assert_eq!(s.p[(i, i)], Distance::Hops(0));
        let row_sum: u32 = s.a.row(i).iter().map(|&x| u32::from(x)).sum();
        assert_eq!(row_sum as usize, g.out_degree(i));
        for j in 0..n {
            if s.a[(i, j)] == 1 {
                assert_eq!(s.p[(i, j)], Distance::Hops(1));
                assert_eq!(s.e[(i, j)], Distance::Hops(0));
            }
            if i != j {
                let expected = s.a[(i, j)] == 0 && s.p[(i, j)].is_finite();
                assert_eq!(s.ehat[(i, j)] == 1, expected, "Ê at ({i},{j})");
            }
        }
    }
}

#[test]
fn path_matrix_matches_enumeration_on_every_small_digraph() {
    for n in 1..=4 {
        for g in all_digraphs(n) {
            assert_eq!(g.path_matrix(), brute_force_paths(&g), "{:?}", g.edges());
            check_structure_invariants(&g);
        }
    }
}

#[test]
fn phat_is_transitive_closure_without_diagonal() {
    for g in all_digraphs(3).chain(all_digraphs(4).step_by(7)) {
        let n = g.node_count();
        // Warshall closure over the adjacency relation.
        let mut reach: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| g.has_edge(i, j)).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
                }
            }
        }
        let phat = binarize(&g.path_matrix());
        for i in 0..n {
            for j in 0..n {
                assert_eq!(phat[(i, j)] == 1, reach[i][j] && i != j);
            }
        }
    }
}

#[test]
fn period_matches_cycle_gcd_and_cyclic_partitions() {
    let mut checked = 0;
    for n in 2..=4 {
        for g in all_digraphs(n).filter(DirectedGraph::is_strongly_connected) {
            let period = g.period().unwrap() as usize;
            let cycle_gcd = cycle_lengths(&g).into_iter().fold(0, gcd);
            assert_eq!(period, cycle_gcd, "{:?}", g.edges());
            let largest_partition = (2..=n).rev().find(|&d| has_cyclic_partition(&g, d));
            assert_eq!(period >= 2, largest_partition.is_some());
            if let Some(d) = largest_partition {
                assert_eq!(period, d);
            }
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn strong_connectivity_matches_closure() {
    for g in all_digraphs(3) {
        let brute = brute_force_paths(&g);
        let all_reachable = brute.as_slice().iter().all(|d| d.is_finite());
        assert_eq!(g.is_strongly_connected(), all_reachable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn path_matrix_matches_enumeration_on_five_nodes(seed in any::<u64>(), density in 0.05f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(&mut rng, 5, density);
        prop_assert_eq!(g.path_matrix(), brute_force_paths(&g));
        check_structure_invariants(&g);
    }

    #[test]
    fn period_of_random_strongly_connected_graphs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_strongly_connected(&mut rng, 6);
        let cycle_gcd = cycle_lengths(&g).into_iter().fold(0, gcd);
        prop_assert_eq!(g.period().unwrap() as usize, cycle_gcd);
    }
}
