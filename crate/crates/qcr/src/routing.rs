//! Light-trail cycle routing.
//!
//! Each quorum is realized as a closed directed walk on the physical
//! topology. A light-trail cycle is physically a loop of fiber with one
//! optical shutter held open at the hub, which turns the loop into a
//! unidirectional bus: a node can transmit to every node that appears
//! later in the walk. Walks may revisit nodes and may traverse an
//! undirected link once per direction, but a directed arc carries only
//! one pass of the wavelength and therefore never repeats.

use rayon::prelude::*;
use thiserror::Error;

use crate::quorum::QuorumSet;
use crate::topology::{Labeling, Node, Topology};

/// Bit set over ordered node pairs (u, v) with u != v, for a universe
/// of n nodes. The diagonal is never set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    n: usize,
    bits: Vec<u64>,
}

impl PairSet {
    pub fn new(n: usize) -> Self {
        PairSet {
            n,
            bits: vec![0; (n * n).div_ceil(64)],
        }
    }

    fn slot(&self, u: Node, v: Node) -> (usize, u64) {
        debug_assert!(u != v && u >= 1 && v >= 1 && u <= self.n && v <= self.n);
        let i = (u - 1) * self.n + (v - 1);
        (i / 64, 1u64 << (i % 64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, u: Node, v: Node) {
        let (word, mask) = self.slot(u, v);
        self.bits[word] |= mask;
    }

    pub fn contains(&self, u: Node, v: Node) -> bool {
        let (word, mask) = self.slot(u, v);
        self.bits[word] & mask != 0
    }

    pub fn union_with(&mut self, other: &PairSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &PairSet) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= *b;
        }
    }

    /// Number of pairs present.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &PairSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Pairs present here but absent from `other`.
    pub fn count_not_in(&self, other: &PairSet) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        let n = self.n;
        self.bits.iter().enumerate().flat_map(move |(word, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let i = word * 64 + bit;
                Some((i / n + 1, i % n + 1))
            })
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("closed walk needs at least two hops, got {hops}")]
    TooShort { hops: usize },
    #[error("walk is not closed: starts at {start}, ends at {end}")]
    NotClosed { start: Node, end: Node },
    #[error("walk visits {u} then {v} at position {p}, but they are not adjacent")]
    NotAdjacent { p: usize, u: Node, v: Node },
    #[error("directed arc {u}->{v} appears more than once")]
    RepeatedArc { u: Node, v: Node },
    #[error("terminal {terminal} never visited")]
    TerminalMissing { terminal: Node },
}

/// A closed directed walk realizing one quorum's light-trail cycle.
/// The hub (where the shutter breaks the loop) sits at position 0; the
/// final position repeats it. Nodes may repeat, directed arcs may not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedWalk {
    n: usize,
    nodes: Vec<Node>,
    terminals: Vec<Node>,
}

impl ClosedWalk {
    /// Validates closure, length, adjacency, arc uniqueness, and
    /// terminal coverage against the topology.
    pub fn new(t: &Topology, nodes: Vec<Node>, terminals: Vec<Node>) -> Result<Self, WalkError> {
        if nodes.len() < 3 {
            return Err(WalkError::TooShort {
                hops: nodes.len().saturating_sub(1),
            });
        }
        let (start, end) = (nodes[0], *nodes.last().unwrap());
        if start != end {
            return Err(WalkError::NotClosed { start, end });
        }
        let mut seen = std::collections::HashSet::new();
        for (p, pair) in nodes.windows(2).enumerate() {
            let (u, v) = (pair[0], pair[1]);
            if !t.has_edge(u, v) {
                return Err(WalkError::NotAdjacent { p, u, v });
            }
            if !seen.insert((u, v)) {
                return Err(WalkError::RepeatedArc { u, v });
            }
        }
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        for &terminal in &terminals {
            if !nodes.contains(&terminal) {
                return Err(WalkError::TerminalMissing { terminal });
            }
        }
        Ok(ClosedWalk {
            n: t.n(),
            nodes,
            terminals,
        })
    }

    /// Node sequence n_0 ..= n_L with n_L = n_0.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Node count of the topology the walk was routed on.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn hub(&self) -> Node {
        self.nodes[0]
    }

    /// Hop count L, the number of directed arcs (and fiber links used).
    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Quorum node set this walk serves, ascending.
    pub fn terminals(&self) -> &[Node] {
        &self.terminals
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    /// Position p of the directed arc (from, to), if the walk uses it.
    pub fn arc_position(&self, from: Node, to: Node) -> Option<usize> {
        self.arcs().position(|arc| arc == (from, to))
    }

    /// The same loop traversed in the opposite direction. The hub node
    /// is unchanged; arc uniqueness and adjacency carry over.
    pub fn reversed(&self) -> ClosedWalk {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        ClosedWalk {
            n: self.n,
            nodes,
            terminals: self.terminals.clone(),
        }
    }

    /// The same loop with the shutter moved so position `p` becomes the
    /// hub. Arcs are preserved as a set, so validity carries over.
    pub fn rotated(&self, p: usize) -> ClosedWalk {
        let last = self.nodes.len() - 1;
        assert!(
            p < last,
            "rotation point must be a walk position before the closure"
        );
        let mut nodes = Vec::with_capacity(self.nodes.len());
        nodes.extend_from_slice(&self.nodes[p..last]);
        nodes.extend_from_slice(&self.nodes[..=p]);
        ClosedWalk {
            n: self.n,
            nodes,
            terminals: self.terminals.clone(),
        }
    }
}

/// Ordered pairs a unidirectional trail over `nodes` can carry: (u, v)
/// is served when some occurrence of u precedes some occurrence of v.
pub(crate) fn served_by_positions(n: usize, nodes: &[Node]) -> PairSet {
    let mut first = vec![usize::MAX; n + 1];
    let mut last = vec![0; n + 1];
    let mut present: Vec<Node> = Vec::new();
    for (p, &x) in nodes.iter().enumerate() {
        if first[x] == usize::MAX {
            first[x] = p;
            present.push(x);
        }
        last[x] = p;
    }
    let mut served = PairSet::new(n);
    for &u in &present {
        for &v in &present {
            if u != v && first[u] < last[v] {
                served.insert(u, v);
            }
        }
    }
    served
}

/// Ordered pairs served by a closed walk, with the hub occupying both
/// position 0 and position L.
pub fn served_pairs(w: &ClosedWalk) -> PairSet {
    served_by_positions(w.n, &w.nodes)
}

/// How the routed solution uses each quorum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteMode {
    /// One directed cycle per quorum of a plain (m=1) quorum set.
    Single,
    /// Each cycle plus its reversed twin; doubles the links used.
    Paired,
    /// One directed cycle per quorum of a redundant (m=2) quorum set.
    Redundant,
}

impl RouteMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RouteMode::Single => "single",
            RouteMode::Paired => "paired",
            RouteMode::Redundant => "redundant",
        }
    }

    /// Pair multiplicity of the quorum sets this mode routes.
    pub fn multiplicity(&self) -> usize {
        match self {
            RouteMode::Single | RouteMode::Paired => 1,
            RouteMode::Redundant => 2,
        }
    }
}

impl std::fmt::Display for RouteMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RouteMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(RouteMode::Single),
            "paired" => Ok(RouteMode::Paired),
            "redundant" => Ok(RouteMode::Redundant),
            other => Err(format!(
                "unknown mode {other:?} (expected single|paired|redundant)"
            )),
        }
    }
}

/// How each routed walk picks its hub position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HubRule {
    /// The node owning the quorum anchors its own cycle.
    Owner,
    /// Each walk re-rotates to the hub serving the most new pairs.
    Best,
}

impl HubRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            HubRule::Owner => "owner",
            HubRule::Best => "best",
        }
    }
}

impl std::fmt::Display for HubRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HubRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "owner" => Ok(HubRule::Owner),
            "best" => Ok(HubRule::Best),
            other => Err(format!("unknown hub rule {other:?} (expected owner|best)")),
        }
    }
}

/// One walk together with the quorum it realizes. Paired mode stores
/// two entries per quorum index, forward first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedWalk {
    pub quorum_index: usize,
    pub walk: ClosedWalk,
}

/// All walks routed for one quorum set under one labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedSolution {
    mode: RouteMode,
    walks: Vec<RoutedWalk>,
    links_used: usize,
}

impl RoutedSolution {
    pub fn mode(&self) -> RouteMode {
        self.mode
    }

    /// Walks in ascending quorum order (forward before reversed twin).
    pub fn walks(&self) -> &[RoutedWalk] {
        &self.walks
    }

    /// Total hop count over all walks.
    pub fn links_used(&self) -> usize {
        self.links_used
    }

    /// One line per walk: `i hub : n0 n1 ... nL`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for rw in &self.walks {
            out.push_str(&format!("{} {} :", rw.quorum_index, rw.walk.hub()));
            for &x in rw.walk.nodes() {
                out.push_str(&format!(" {x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Tracks which directed arcs a walk under construction has consumed.
struct ArcUse<'a> {
    t: &'a Topology,
    used: Vec<bool>,
}

impl<'a> ArcUse<'a> {
    fn new(t: &'a Topology) -> Self {
        ArcUse {
            t,
            used: vec![false; 2 * t.edge_count()],
        }
    }

    fn id(&self, from: Node, to: Node) -> usize {
        let e = self.t.edge_index(from, to).expect("arc over a real link");
        2 * e + usize::from(from > to)
    }

    fn is_used(&self, from: Node, to: Node) -> bool {
        self.used[self.id(from, to)]
    }

    fn mark(&mut self, from: Node, to: Node) {
        let id = self.id(from, to);
        debug_assert!(!self.used[id], "arc {from}->{to} consumed twice");
        self.used[id] = true;
    }
}

/// Shortest path from `from` to `to` that avoids consumed directed
/// arcs. Ties are broken toward smaller node labels during backward
/// reconstruction, keeping results deterministic.
fn shortest_leg(t: &Topology, used: &ArcUse, from: Node, to: Node) -> Option<Vec<Node>> {
    let mut dist = vec![usize::MAX; t.n() + 1];
    dist[from] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &v in t.neighbors(u) {
            if dist[v] == usize::MAX && !used.is_used(u, v) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        let prev = t
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&h| dist[h] != usize::MAX && dist[h] + 1 == dist[cur] && !used.is_used(h, cur))
            .expect("BFS predecessor exists");
        path.push(prev);
        cur = prev;
    }
    path.reverse();
    Some(path)
}

/// Builds the closed node sequence visiting `order` (first entry is
/// the hub) by chaining per-leg shortest paths, each leg barred from
/// arcs earlier legs consumed. Fails when some leg is fully blocked.
fn build_walk(t: &Topology, order: &[Node]) -> Option<Vec<Node>> {
    let hub = order[0];
    if order.len() == 1 {
        // a lone terminal still needs a loop; bounce off the smallest
        // neighbor using both directions of one link
        let v = *t.neighbors(hub).first()?;
        return Some(vec![hub, v, hub]);
    }
    let mut used = ArcUse::new(t);
    let mut nodes = vec![hub];
    for leg in 0..order.len() {
        let target = order[(leg + 1) % order.len()];
        let cur = *nodes.last().unwrap();
        let path = shortest_leg(t, &used, cur, target)?;
        for pair in path.windows(2) {
            used.mark(pair[0], pair[1]);
        }
        nodes.extend_from_slice(&path[1..]);
    }
    Some(nodes)
}

/// Fallback loop that always exists on a connected graph: take the
/// BFS tree from the hub, prune branches holding no terminal, and
/// traverse the remaining tree depth-first, emitting each edge once
/// per direction.
fn euler_fallback(t: &Topology, order: &[Node]) -> Vec<Node> {
    let hub = order[0];
    let n = t.n();
    let mut parent = vec![0usize; n + 1];
    let mut visited = vec![false; n + 1];
    visited[hub] = true;
    let mut queue = std::collections::VecDeque::from([hub]);
    while let Some(u) = queue.pop_front() {
        for &v in t.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }

    let mut keep = vec![false; n + 1];
    keep[hub] = true;
    for &terminal in order {
        let mut cur = terminal;
        while !keep[cur] {
            keep[cur] = true;
            cur = parent[cur];
        }
    }

    let mut children: Vec<Vec<Node>> = vec![Vec::new(); n + 1];
    for v in 1..=n {
        if keep[v] && v != hub {
            children[parent[v]].push(v);
        }
    }

    fn tour(v: Node, children: &[Vec<Node>], nodes: &mut Vec<Node>) {
        for &c in &children[v] {
            nodes.push(c);
            tour(c, children, nodes);
            nodes.push(v);
        }
    }
    let mut nodes = vec![hub];
    tour(hub, &children, &mut nodes);
    nodes
}

/// Caps the rounds of visiting-order improvement; each accepted move
/// strictly shortens the walk, so this only guards the final no-change
/// scans.
const MAX_IMPROVEMENT_PASSES: usize = 64;

/// Routes a cycle visiting `order` (hub first), then applies segment
/// reversals on the visiting order, accepting strict hop reductions.
fn route_ordered(t: &Topology, order: &[Node]) -> ClosedWalk {
    let mut order = order.to_vec();
    let mut best = match build_walk(t, &order) {
        Some(nodes) => nodes,
        None => euler_fallback(t, &order),
    };

    let k = order.len();
    if k >= 3 {
        let mut passes = 0;
        let mut improved = true;
        while improved && passes < MAX_IMPROVEMENT_PASSES {
            improved = false;
            passes += 1;
            'scan: for i in 1..k - 1 {
                for j in i + 1..k {
                    let mut cand = order.clone();
                    cand[i..=j].reverse();
                    if let Some(nodes) = build_walk(t, &cand) {
                        if nodes.len() < best.len() {
                            order = cand;
                            best = nodes;
                            improved = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
    }

    let mut terminals = order;
    terminals.sort_unstable();
    ClosedWalk::new(t, best, terminals).expect("constructed walks satisfy the invariants")
}

/// Routes one closed walk through `terminals` anchored at `hub`.
/// Terminals are visited in ascending label order starting from the
/// hub before local improvement; results are deterministic.
pub fn route_cycle(t: &Topology, terminals: &[Node], hub: Node) -> ClosedWalk {
    assert!(t.n() >= 2, "routing needs at least one link");
    let mut terminals: Vec<Node> = terminals.to_vec();
    terminals.sort_unstable();
    terminals.dedup();
    assert!(
        terminals.binary_search(&hub).is_ok(),
        "hub {hub} must be one of the terminals"
    );
    for &x in &terminals {
        assert!(
            (1..=t.n()).contains(&x),
            "terminal {x} outside 1..={}",
            t.n()
        );
    }
    let mut order = vec![hub];
    order.extend(terminals.iter().copied().filter(|&x| x != hub));
    route_ordered(t, &order)
}

/// Routes every quorum of `q` onto `t` under the node labeling `l`.
/// Quorum S_i gets hub `l(i)` and visits its members in base-set
/// cyclic order (the order the shift construction yields, anchor
/// first), mapped through the labeling.
pub fn route_quorum_set(
    t: &Topology,
    q: &QuorumSet,
    l: &Labeling,
    mode: RouteMode,
) -> RoutedSolution {
    let n = q.n();
    assert_eq!(n, t.n(), "quorum universe and topology disagree on n");
    assert_eq!(l.len(), n, "labeling covers a different node count");

    let routed: Vec<ClosedWalk> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let order: Vec<Node> = q
                .base()
                .members()
                .iter()
                .map(|&b| l.map(((b - 1 + (i - 1)) % n) + 1))
                .collect();
            route_ordered(t, &order)
        })
        .collect();

    let mut walks = Vec::new();
    let mut links_used = 0;
    for (idx, walk) in routed.into_iter().enumerate() {
        let quorum_index = idx + 1;
        links_used += walk.hops();
        if mode == RouteMode::Paired {
            let twin = walk.reversed();
            links_used += twin.hops();
            walks.push(RoutedWalk { quorum_index, walk });
            walks.push(RoutedWalk {
                quorum_index,
                walk: twin,
            });
        } else {
            walks.push(RoutedWalk { quorum_index, walk });
        }
    }
    RoutedSolution {
        mode,
        walks,
        links_used,
    }
}

/// Moves each walk's shutter to the position that serves the most
/// pairs no earlier walk already serves; ties prefer the smallest hub
/// label, then the earliest position. Hop counts are unchanged.
pub fn rehub_best(sol: &mut RoutedSolution) {
    let Some(first) = sol.walks.first() else {
        return;
    };
    let n = first.walk.n;
    let mut global = PairSet::new(n);
    for rw in &mut sol.walks {
        let hops = rw.walk.hops();
        let mut best: Option<(usize, Node, usize)> = None;
        for p in 0..hops {
            let rotated = rw.walk.rotated(p);
            let gain = served_pairs(&rotated).count_not_in(&global);
            let hub = rotated.hub();
            let better = match best {
                None => true,
                Some((g, h, _)) => gain > g || (gain == g && hub < h),
            };
            if better {
                best = Some((gain, hub, p));
            }
        }
        let (_, _, p) = best.expect("every closed walk has a position");
        rw.walk = rw.walk.rotated(p);
        global.union_with(&served_pairs(&rw.walk));
    }
}

/// Ordered-pair service census: how many routed walks serve each pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl CoverageMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn served_count(&self, u: Node, v: Node) -> u32 {
        self.counts[(u - 1) * self.n + (v - 1)]
    }

    pub fn is_served(&self, u: Node, v: Node) -> bool {
        self.served_count(u, v) > 0
    }

    pub fn total_ordered_pairs(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Ordered pairs no walk serves.
    pub fn missing_count(&self) -> usize {
        self.missing_pairs().count()
    }

    pub fn missing_pairs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        let n = self.n;
        (1..=n)
            .flat_map(move |u| (1..=n).map(move |v| (u, v)))
            .filter(move |&(u, v)| u != v && self.served_count(u, v) == 0)
    }
}

/// Counts, per ordered pair, how many of the solution's walks serve it.
pub fn coverage(sol: &RoutedSolution, n: usize) -> CoverageMatrix {
    let mut counts = vec![0u32; n * n];
    for rw in &sol.walks {
        for (u, v) in served_pairs(&rw.walk).iter() {
            counts[(u - 1) * n + (v - 1)] += 1;
        }
    }
    CoverageMatrix { n, counts }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("no routed cycle serves the ordered pair {u}->{v}")]
    MissingPair { u: Node, v: Node },
}

/// A walk serving a looked-up pair, with the quorum it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteHit<'a> {
    pub quorum_index: usize,
    pub walk: &'a ClosedWalk,
}

/// Finds the serving walk with the smallest quorum index for (u, v).
/// The coverage matrix must have been computed from the same solution.
pub fn find_route<'a>(
    cov: &CoverageMatrix,
    sol: &'a RoutedSolution,
    u: Node,
    v: Node,
) -> Result<RouteHit<'a>, RoutingError> {
    assert!(u != v, "a node always reaches itself");
    if !cov.is_served(u, v) {
        return Err(RoutingError::MissingPair { u, v });
    }
    sol.walks
        .iter()
        .find(|rw| served_pairs(&rw.walk).contains(u, v))
        .map(|rw| RouteHit {
            quorum_index: rw.quorum_index,
            walk: &rw.walk,
        })
        .ok_or(RoutingError::MissingPair { u, v })
}
