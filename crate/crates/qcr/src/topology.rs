//! Optical network topologies: undirected graphs of nodes and fiber links.
//!
//! Nodes are labeled `1..=n` to match the usual convention in network data
//! sets. Topologies are immutable after construction and safe to share
//! across worker threads.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// 1-based node label.
pub type Node = usize;

/// Unordered fiber link between two nodes, stored with the smaller label first.
pub type Edge = (Node, Node);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: malformed input: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: Node, v: Node },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: Node },
    #[error("graph is disconnected: node {unreachable} is not reachable from node 1 (reached {reached} of {n} nodes)")]
    Disconnected {
        unreachable: Node,
        reached: usize,
        n: usize,
    },
    #[error("labeling covers {labeling} nodes but topology has {topology}")]
    SizeMismatch { labeling: usize, topology: usize },
}

/// An undirected, connected graph of optical nodes and fiber links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<Edge>,
    name: String,
    adjacency: Vec<Vec<Node>>,
}

impl Topology {
    /// Builds a topology from a node count and undirected edge list,
    /// enforcing the same invariants as [`Topology::parse`].
    pub fn new(n: usize, edge_list: &[(Node, Node)]) -> Result<Self, TopologyError> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for (idx, &(u, v)) in edge_list.iter().enumerate() {
            let line = idx + 2; // mirror the file layout for error reporting
            check_edge(n, u, v, line)?;
            let e = ordered(u, v);
            if edges.contains(&e) {
                return Err(TopologyError::DuplicateEdge {
                    line,
                    u: e.0,
                    v: e.1,
                });
            }
            edges.push(e);
        }
        edges.sort_unstable();
        let topo = Self::assemble(n, edges, String::new());
        topo.check_connected()?;
        Ok(topo)
    }

    /// Parses the edge-list format: a header line `N M`, then `M` lines
    /// `u v` with 1-based labels. Lines starting with `#` and blank lines
    /// are ignored. The graph must be connected.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut data_lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_no, header) = data_lines.next().ok_or(TopologyError::MalformedLine {
            line: 1,
            reason: "missing header line \"N M\"".into(),
        })?;
        let (n, m) = parse_pair(header, header_no, "expected header \"N M\"")?;
        if n == 0 {
            return Err(TopologyError::MalformedLine {
                line: header_no,
                reason: "node count must be at least 1".into(),
            });
        }

        let mut edges: Vec<Edge> = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = data_lines.next().ok_or(TopologyError::MalformedLine {
                line: 0,
                reason: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let (u, v) = parse_pair(text, line, "expected edge \"u v\"")?;
            check_edge(n, u, v, line)?;
            let e = ordered(u, v);
            if edges.contains(&e) {
                return Err(TopologyError::DuplicateEdge {
                    line,
                    u: e.0,
                    v: e.1,
                });
            }
            edges.push(e);
        }
        if let Some((line, _)) = data_lines.next() {
            return Err(TopologyError::MalformedLine {
                line,
                reason: format!("unexpected content after {m} edges"),
            });
        }

        edges.sort_unstable();
        let topo = Self::assemble(n, edges, String::new());
        topo.check_connected()?;
        Ok(topo)
    }

    fn assemble(n: usize, edges: Vec<Edge>, name: String) -> Self {
        let mut adjacency = vec![Vec::new(); n + 1];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }
        Topology {
            n,
            edges,
            name,
            adjacency,
        }
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached < self.n {
            let unreachable = (1..=self.n).find(|&v| !seen[v]).unwrap();
            return Err(TopologyError::Disconnected {
                unreachable,
                reached,
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Edges sorted ascending, each as `(min, max)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `u` in ascending label order.
    pub fn neighbors(&self, u: Node) -> &[Node] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Position of the undirected link {u,v} within [`edges`](Self::edges).
    pub fn edge_index(&self, u: Node, v: Node) -> Option<usize> {
        self.edges.binary_search(&ordered(u, v)).ok()
    }

    pub fn degree(&self, u: Node) -> usize {
        self.adjacency[u].len()
    }

    /// Sorted degree sequence, an isomorphism invariant.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degs: Vec<usize> = (1..=self.n).map(|u| self.degree(u)).collect();
        degs.sort_unstable();
        degs
    }

    /// Total ordered node pairs `n(n-1)`, the denominator of all
    /// missing-pair percentages.
    pub fn ordered_pairs(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Serializes back to the edge-list format. Parsing the result yields
    /// an equal topology (up to the name, which the format does not carry).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("# {}\n", self.name));
        }
        out.push_str(&format!("{} {}\n", self.n, self.edges.len()));
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Applies a node relabeling, producing the isomorphic graph in which
    /// node `v` becomes `labeling.map(v)`.
    pub fn relabel(&self, labeling: &Labeling) -> Result<Topology, TopologyError> {
        if labeling.len() != self.n {
            return Err(TopologyError::SizeMismatch {
                labeling: labeling.len(),
                topology: self.n,
            });
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|&(u, v)| ordered(labeling.map(u), labeling.map(v)))
            .collect();
        edges.sort_unstable();
        Ok(Self::assemble(self.n, edges, self.name.clone()))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} nodes, {} links)",
            self.name,
            self.n,
            self.edges.len()
        )
    }
}

fn ordered(u: Node, v: Node) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn check_edge(n: usize, u: Node, v: Node, line: usize) -> Result<(), TopologyError> {
    if u == v {
        return Err(TopologyError::SelfLoop { line, node: u });
    }
    for x in [u, v] {
        if x < 1 || x > n {
            return Err(TopologyError::MalformedLine {
                line,
                reason: format!("node label {x} out of range 1..={n}"),
            });
        }
    }
    Ok(())
}

fn parse_pair(text: &str, line: usize, what: &str) -> Result<(usize, usize), TopologyError> {
    let mut parts = text.split_whitespace();
    let err = |reason: String| TopologyError::MalformedLine { line, reason };
    let a = parts
        .next()
        .ok_or_else(|| err(format!("{what}, got {text:?}")))?;
    let b = parts
        .next()
        .ok_or_else(|| err(format!("{what}, got {text:?}")))?;
    if parts.next().is_some() {
        return Err(err(format!("{what}, got extra fields in {text:?}")));
    }
    let a = a
        .parse()
        .map_err(|_| err(format!("{what}, {a:?} is not a number")))?;
    let b = b
        .parse()
        .map_err(|_| err(format!("{what}, {b:?} is not a number")))?;
    Ok((a, b))
}

/// A bijection on `{1..n}` used to relabel quorum-index space onto
/// physical node labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    // perm[i-1] is the physical label of index node i
    perm: Vec<Node>,
}

impl Labeling {
    /// Builds a labeling from an explicit permutation; `perm[i-1]` is the
    /// image of node `i`. Returns `None` if `perm` is not a permutation
    /// of `1..=perm.len()`.
    pub fn from_perm(perm: Vec<Node>) -> Option<Self> {
        let n = perm.len();
        let mut seen = vec![false; n + 1];
        for &p in &perm {
            if p < 1 || p > n || seen[p] {
                return None;
            }
            seen[p] = true;
        }
        Some(Labeling { perm })
    }

    pub fn identity(n: usize) -> Self {
        Labeling {
            perm: (1..=n).collect(),
        }
    }

    /// Uniformly random permutation, reproducible for a fixed seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<Node> = (1..=n).collect();
        perm.shuffle(&mut rng);
        Labeling { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Image of node `v` (1-based).
    pub fn map(&self, v: Node) -> Node {
        self.perm[v - 1]
    }

    pub fn as_slice(&self) -> &[Node] {
        &self.perm
    }
}
