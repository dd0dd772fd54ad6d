mod common;

use std::collections::{BTreeSet, HashSet};

use common::{digraph, random_digraph, random_walk_corpus};
use idealflow::{
    binarize, count, hadamard, verify_identities, verify_inequality, verify_premagic, CountMatrix,
    RealMatrix, SetMatrix, Trajectory, TrajectorySet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Set matrices straight from the defining conditions, cell by cell.
fn enumerate_sets(tr: &TrajectorySet) -> (SetMatrix, SetMatrix, SetMatrix) {
    let n = tr.node_count();
    let cell = |s: usize, t: usize, pred: &dyn Fn(&[usize]) -> bool| -> BTreeSet<u64> {
        if s == t {
            return BTreeSet::new();
        }
        tr.trajectories()
            .iter()
            .filter(|x| pred(&x.path))
            .map(|x| x.id)
            .collect()
    };
    let flow = SetMatrix::from_fn(n, n, |i, j| {
        cell(i, j, &|v| {
            (0..v.len() - 1).any(|h| v[h] == i && v[h + 1] == j)
        })
    });
    let od = SetMatrix::from_fn(n, n, |s, t| {
        cell(s, t, &|v| {
            (0..v.len()).any(|p| (p + 1..v.len()).any(|q| v[p] == s && v[q] == t))
        })
    });
    let indirect = SetMatrix::from_fn(n, n, |s, t| {
        cell(s, t, &|v| {
            (0..v.len())
                .any(|p| (p + 1..v.len()).any(|r| (r + 1..v.len()).any(|q| v[p] == s && v[q] == t)))
        })
    });
    (flow, od, indirect)
}

/// Random-walk corpus whose walks never revisit a node.
fn simple_path_corpus(
    rng: &mut impl Rng,
    g: &idealflow::DirectedGraph,
    count: usize,
) -> TrajectorySet {
    let mut trajectories = Vec::new();
    for id in 1..=count as u64 {
        let starts: Vec<usize> = (0..g.node_count())
            .filter(|&i| g.out_degree(i) > 0)
            .collect();
        if starts.is_empty() {
            break;
        }
        let mut path = vec![starts[rng.gen_range(0..starts.len())]];
        let target = rng.gen_range(2..=g.node_count().max(2));
        while path.len() < target {
            let fresh: Vec<usize> = g
                .successors(*path.last().unwrap())
                .iter()
                .copied()
                .filter(|v| !path.contains(v))
                .collect();
            if fresh.is_empty() {
                break;
            }
            path.push(fresh[rng.gen_range(0..fresh.len())]);
        }
        if path.len() >= 2 {
            trajectories.push(Trajectory { id, path });
        }
    }
    TrajectorySet::new(g, trajectories).unwrap()
}

fn identities(
    g: &idealflow::DirectedGraph,
    tr: &TrajectorySet,
) -> Vec<idealflow::VerificationReport> {
    let s = g.structure_matrices();
    let u = tr.utilization(&s.a).unwrap();
    verify_identities(
        &u.flow.counts,
        &u.od.counts,
        &u.indirect.counts,
        &u.alternative.counts,
        &s.a,
        &s.phat,
        &s.ehat,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn set_matrices_match_defining_conditions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let density = rng.gen_range(0.3..1.0);
        let g = random_digraph(&mut rng, n, density);
        let tr = random_walk_corpus(&mut rng, &g, 3, 5);
        let (flow, od, indirect) = enumerate_sets(&tr);
        prop_assert_eq!(tr.flow_set(), flow);
        prop_assert_eq!(tr.od_set(), od);
        prop_assert_eq!(tr.indirect_set(), indirect);
    }

    #[test]
    fn cellwise_containment_and_partition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let density = rng.gen_range(0.2..0.9);
        let g = random_digraph(&mut rng, n, density);
        let tr = random_walk_corpus(&mut rng, &g, 10, 12);
        let a = g.adjacency_matrix();
        let u = tr.utilization(&a).unwrap();
        for (i, j, f) in u.flow.sets.iter_cells() {
            let d = &u.od.sets[(i, j)];
            let l = &u.indirect.sets[(i, j)];
            if a[(i, j)] == 1 {
                prop_assert!(f.is_subset(d));
            }
            prop_assert!(l.is_subset(d));
            let (t, tc) = (&u.alternative.sets[(i, j)], &u.substitute.sets[(i, j)]);
            prop_assert!(t.is_disjoint(tc));
            prop_assert_eq!(&t.union(tc).copied().collect::<BTreeSet<_>>(), l);
        }
        for levels in [&u.flow, &u.od, &u.indirect, &u.alternative, &u.substitute] {
            for (i, j, s) in levels.sets.iter_cells() {
                prop_assert_eq!(levels.structure[(i, j)] == 1, !s.is_empty());
            }
            prop_assert_eq!(&binarize(&count(&levels.sets)), &levels.structure);
        }
    }

    #[test]
    fn per_trajectory_cell_contributions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(&mut rng, 5, 0.5);
        let corpus = random_walk_corpus(&mut rng, &g, 5, 15);
        for t in corpus.trajectories() {
            let single = TrajectorySet::new(&g, vec![t.clone()]).unwrap();
            let k = t.path.len() as u64;
            let links: HashSet<_> = t.path.windows(2).map(|w| (w[0], w[1])).collect();
            let flow_cells = count(&single.flow_set()).total();
            prop_assert_eq!(flow_cells, links.len() as u64);
            prop_assert!(flow_cells <= k - 1);
            prop_assert!(count(&single.od_set()).total() <= k * (k - 1) / 2);
        }
    }

    #[test]
    fn identities_hold_on_random_walk_corpora(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=8);
        let density = rng.gen_range(0.15..0.9);
        let g = random_digraph(&mut rng, n, density);
        let tr = random_walk_corpus(&mut rng, &g, 50, 20);
        let s = g.structure_matrices();
        let u = tr.utilization(&s.a).unwrap();

        prop_assert!(verify_inequality(&u.flow.counts, &s.a, &u.od.counts).unwrap().holds);
        let reports = identities(&g, &tr);
        for r in &reports[..3] {
            prop_assert!(r.holds, "{:?}", r);
        }
        // D > 0 only where a path exists.
        for (i, j, &d) in u.od.counts.iter_cells() {
            if d > 0 {
                prop_assert!(s.p[(i, j)].is_finite() && i != j);
            }
        }
        // F̃ and T̃ overlap exactly on trajectories that reach j from i both
        // directly and through other nodes: F = A∘D − T + |F̃ ∩ T̃|.
        let a_d = hadamard(&s.a.to_counts(), &u.od.counts).unwrap();
        for (i, j, &f) in u.flow.counts.iter_cells() {
            let overlap = u.flow.sets[(i, j)].intersection(&u.alternative.sets[(i, j)]).count() as u64;
            prop_assert_eq!(f + u.alternative.counts[(i, j)], a_d[(i, j)] + overlap);
        }
    }

    #[test]
    fn all_identities_hold_without_revisits(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=8);
        let density = rng.gen_range(0.15..0.9);
        let g = random_digraph(&mut rng, n, density);
        let tr = simple_path_corpus(&mut rng, &g, 30);
        for r in identities(&g, &tr) {
            prop_assert!(r.holds, "{:?}", r);
        }
    }

    #[test]
    fn premagic_closed_under_sum_and_scaling(seed in any::<u64>(), scale in 0.0f64..10.0) {
        // Sums of weighted cycles are premagic; build two and combine.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=7);
        let mut cycles = || {
            let mut m = RealMatrix::zeros(n, n);
            for _ in 0..rng.gen_range(1..4) {
                let mut nodes: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    nodes.swap(i, rng.gen_range(0..=i));
                }
                let len = rng.gen_range(2..=n);
                let w = rng.gen_range(0.1..5.0);
                for k in 0..len {
                    m[(nodes[k], nodes[(k + 1) % len])] += w;
                }
            }
            m
        };
        let (x, y) = (cycles(), cycles());
        prop_assert!(verify_premagic(&x, 1e-9).unwrap().holds);
        let sum = RealMatrix::from_fn(n, n, |i, j| x[(i, j)] + y[(i, j)]);
        prop_assert!(verify_premagic(&sum, 1e-9).unwrap().holds);
        let scaled = x.map(|v| v * scale);
        prop_assert!(verify_premagic(&scaled, 1e-9).unwrap().holds);
    }
}

#[test]
fn g2_fixture_levels() {
    let g = digraph(3, &[(0, 1), (1, 2), (0, 2)]);
    let tr = TrajectorySet::new(
        &g,
        vec![
            Trajectory {
                id: 1,
                path: vec![0, 1, 2],
            },
            Trajectory {
                id: 2,
                path: vec![0, 2],
            },
            Trajectory {
                id: 3,
                path: vec![0, 1],
            },
        ],
    )
    .unwrap();
    let u = tr.utilization(&g.adjacency_matrix()).unwrap();
    assert_eq!(
        u.od.counts,
        CountMatrix::from_rows(vec![vec![0, 2, 2], vec![0, 0, 1], vec![0, 0, 0]]).unwrap()
    );
    assert_eq!(count(&u.substitute.sets).total(), 0);
    assert!(identities(&g, &tr).iter().all(|r| r.holds));
}
