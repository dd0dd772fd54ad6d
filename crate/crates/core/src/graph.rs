//! Directed network structure: the graph itself and the matrices derived
//! purely from it (adjacency, hop-count path matrix, external matrix and their
//! binarizations), plus the irreducibility/periodicity predicates.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Matrix};

/// Shortest hop count between two nodes, or no path at all.
///
/// `Unreachable` orders after every finite distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

impl Distance {
    pub fn hops(self) -> Option<u32> {
        match self {
            Distance::Hops(h) => Some(h),
            Distance::Unreachable => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Hops(_))
    }

    /// `self - a` where `a` is an adjacency bit. The sentinel absorbs.
    pub fn minus_link(self, a: u8) -> Distance {
        match self {
            Distance::Hops(h) => Distance::Hops(h.saturating_sub(u32::from(a))),
            Distance::Unreachable => Distance::Unreachable,
        }
    }
}

impl Default for Distance {
    fn default() -> Self {
        Distance::Hops(0)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Hops(h) => write!(f, "{h}"),
            Distance::Unreachable => f.write_str("inf"),
        }
    }
}

pub type DistanceMatrix = Matrix<Distance>;

/// Entries that count as "present" when a matrix is binarized: strictly
/// positive and finite.
pub trait Support {
    fn in_support(&self) -> bool;
}

impl Support for u8 {
    fn in_support(&self) -> bool {
        *self > 0
    }
}

impl Support for u64 {
    fn in_support(&self) -> bool {
        *self > 0
    }
}

impl Support for i64 {
    fn in_support(&self) -> bool {
        *self > 0
    }
}

impl Support for f64 {
    fn in_support(&self) -> bool {
        self.is_finite() && *self > 0.0
    }
}

impl Support for Distance {
    fn in_support(&self) -> bool {
        matches!(self, Distance::Hops(h) if *h > 0)
    }
}

pub fn binarize<T: Support>(m: &Matrix<T>) -> BinaryMatrix {
    m.map(|v| u8::from(v.in_support()))
}

/// Simple directed graph over string labels. Immutable once built.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    successors: Vec<Vec<usize>>,
    edge_set: HashSet<(usize, usize)>,
}

impl DirectedGraph {
    /// Builds a graph from an edge list. Nodes are indexed in order of first
    /// appearance.
    pub fn from_edges<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        Self::with_nodes(std::iter::empty::<&str>(), edges)
    }

    /// Declares `nodes` first (so isolated nodes are possible), then adds edges,
    /// registering any new endpoint on first appearance.
    pub fn with_nodes<N, I, S, T>(nodes: N, edges: I) -> Result<Self>
    where
        N: IntoIterator<Item = T>,
        T: AsRef<str>,
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut g = DirectedGraph {
            labels: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            successors: Vec::new(),
            edge_set: HashSet::new(),
        };
        for node in nodes {
            g.intern(node.as_ref());
        }
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(Error::SelfLoop(u.to_string()));
            }
            let (iu, iv) = (g.intern(u), g.intern(v));
            if !g.edge_set.insert((iu, iv)) {
                return Err(Error::DuplicateEdge(u.to_string(), v.to_string()));
            }
            g.edges.push((iu, iv));
            g.successors[iu].push(iv);
        }
        if g.labels.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(g)
    }

    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        self.successors.push(Vec::new());
        i
    }

    /// Parses the edge-list text format: one `<source> <target>` per line,
    /// `#` comments and blank lines ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(u), Some(v), None) => edges.push((u, v)),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("expected `<source> <target>`, got `{line}`"),
                    })
                }
            }
        }
        Self::from_edges(edges)
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Edges as index pairs, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_set.contains(&(i, j))
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.successors[i].len()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| self.successors[i].is_empty())
            .collect()
    }

    pub fn adjacency_matrix(&self) -> BinaryMatrix {
        let n = self.node_count();
        let mut a = BinaryMatrix::zeros(n, n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1;
        }
        a
    }

    /// Minimum hop counts by one breadth-first traversal per source.
    pub fn path_matrix(&self) -> DistanceMatrix {
        let n = self.node_count();
        let mut p = DistanceMatrix::filled(n, n, Distance::Unreachable);
        for s in 0..n {
            for (t, d) in bfs_levels(&self.successors, s).into_iter().enumerate() {
                if let Some(d) = d {
                    p[(s, t)] = Distance::Hops(d as u32);
                }
            }
        }
        p
    }

    pub fn structure_matrices(&self) -> StructureMatrices {
        let a = self.adjacency_matrix();
        let p = self.path_matrix();
        let e = external_matrix(&p, &a).expect("path and adjacency matrices share a graph");
        StructureMatrices {
            phat: binarize(&p),
            ehat: binarize(&e),
            a,
            p,
            e,
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected_lists(&self.successors)
    }

    /// Period of a strongly connected graph: the gcd of its directed cycle
    /// lengths. A lone node with no cycle reports 1.
    pub fn period(&self) -> Result<u32> {
        if !self.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        Ok(period_lists(&self.successors))
    }
}

/// Adjacency, path and external matrices of one graph with their binarized forms.
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    pub a: BinaryMatrix,
    pub p: DistanceMatrix,
    pub e: DistanceMatrix,
    pub phat: BinaryMatrix,
    pub ehat: BinaryMatrix,
}

/// `E = P - A` with the unreachable sentinel absorbing the subtraction.
pub fn external_matrix(p: &DistanceMatrix, a: &BinaryMatrix) -> Result<DistanceMatrix> {
    p.ensure_same_shape(a)?;
    Ok(Matrix::from_fn(p.rows(), p.cols(), |i, j| {
        p[(i, j)].minus_link(a[(i, j)])
    }))
}

pub(crate) fn bfs_levels(successors: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; successors.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let next = level[u].map(|d| d + 1);
        for &v in &successors[u] {
            if level[v].is_none() {
                level[v] = next;
                queue.push_back(v);
            }
        }
    }
    level
}

/// Forward and backward reachability from node 0 both cover every node.
pub(crate) fn strongly_connected_lists(successors: &[Vec<usize>]) -> bool {
    let n = successors.len();
    if n == 0 {
        return false;
    }
    let mut predecessors = vec![Vec::new(); n];
    for (u, outs) in successors.iter().enumerate() {
        for &v in outs {
            predecessors[v].push(u);
        }
    }
    bfs_levels(successors, 0).iter().all(Option::is_some)
        && bfs_levels(&predecessors, 0).iter().all(Option::is_some)
}

/// gcd over edges of |level(u) + 1 - level(v)|, nonzero terms only.
/// Caller guarantees strong connectivity.
pub(crate) fn period_lists(successors: &[Vec<usize>]) -> u32 {
    let level = bfs_levels(successors, 0);
    let mut g = 0u64;
    for (u, outs) in successors.iter().enumerate() {
        let lu = level[u].expect("strongly connected") as i64;
        for &v in outs {
            let lv = level[v].expect("strongly connected") as i64;
            g = gcd(g, (lu + 1 - lv).unsigned_abs());
        }
    }
    if g == 0 {
        1
    } else {
        g as u32
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
