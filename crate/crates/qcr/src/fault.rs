//! Single-link failure simulation.
//!
//! Every fiber link is failed in turn and each routed walk is degraded
//! under the selected semantics. A walk that never touches the failed
//! link is unaffected. One that crosses it once survives as a linear
//! trail: the hub shutter closes and the break relocates to the failed
//! link, so the loop minus that arc still carries traffic end to end.
//! A walk that crossed the link in both directions is lost outright
//! unless segment splitting is enabled, which salvages the two pieces
//! as independent trails at the cost of a second break.
//!
//! Scenario service is capped at what the solution serves fault free.
//! A relocated break can physically reach sender-receiver pairs the
//! original shutter position blocked, but no new connections are set
//! up during a failure event, so those pairs do not count as served.

use rayon::prelude::*;

use crate::routing::{served_by_positions, served_pairs, ClosedWalk, PairSet, RoutedSolution};
use crate::topology::{Edge, Node, Topology};

/// What happens to a cycle that used a failed link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureModel {
    /// The whole cycle goes dark.
    CycleLoss,
    /// The shutter break relocates to the failed link.
    Reconfigure,
}

impl FailureModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureModel::CycleLoss => "cycle-loss",
            FailureModel::Reconfigure => "reconfigure",
        }
    }
}

impl std::fmt::Display for FailureModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FailureModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle-loss" => Ok(FailureModel::CycleLoss),
            "reconfigure" => Ok(FailureModel::Reconfigure),
            other => Err(format!(
                "unknown failure model {other:?} (expected reconfigure|cycle-loss)"
            )),
        }
    }
}

/// One failed link under one degradation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailureScenario {
    pub failed_edge: Edge,
    pub model: FailureModel,
}

/// A surviving unidirectional piece of a degraded cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    n: usize,
    nodes: Vec<Node>,
}

impl Trail {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// Ordered pairs the trail can carry: sender before receiver.
    pub fn served_pairs(&self) -> PairSet {
        served_by_positions(self.n, &self.nodes)
    }
}

/// Outcome of degrading one walk against one failed link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degradation {
    /// The walk never used the link; it serves its full pair set.
    Untouched,
    /// Surviving trail(s) after the break relocated.
    Reduced(Vec<Trail>),
    /// The walk serves nothing.
    Lost,
}

/// Applies the failure of edge `e` to one walk. `split_segments`
/// salvages both pieces of a walk that used the link in both
/// directions; it is ignored by the cycle-loss model.
pub fn degrade_walk(
    w: &ClosedWalk,
    e: Edge,
    model: FailureModel,
    split_segments: bool,
) -> Degradation {
    let (a, b) = e;
    let fwd = w.arc_position(a, b);
    let rev = w.arc_position(b, a);
    if fwd.is_none() && rev.is_none() {
        return Degradation::Untouched;
    }
    if model == FailureModel::CycleLoss {
        return Degradation::Lost;
    }
    let nodes = w.nodes();
    let last = nodes.len() - 1;
    match (fwd, rev) {
        (Some(p), None) | (None, Some(p)) => {
            // loop minus one arc: continue from the arc's head, pass
            // straight through the hub, stop at the arc's tail
            let mut trail = Vec::with_capacity(last);
            trail.extend_from_slice(&nodes[p + 1..=last]);
            trail.extend_from_slice(&nodes[1..=p]);
            Degradation::Reduced(vec![Trail {
                n: w.universe(),
                nodes: trail,
            }])
        }
        (Some(x), Some(y)) => {
            if !split_segments {
                return Degradation::Lost;
            }
            let (p, q) = (x.min(y), x.max(y));
            let middle = Trail {
                n: w.universe(),
                nodes: nodes[p + 1..=q].to_vec(),
            };
            let mut through_hub = Vec::with_capacity(last - q + p);
            through_hub.extend_from_slice(&nodes[q + 1..=last]);
            through_hub.extend_from_slice(&nodes[1..=p]);
            let outer = Trail {
                n: w.universe(),
                nodes: through_hub,
            };
            Degradation::Reduced(vec![middle, outer])
        }
        (None, None) => unreachable!("handled above"),
    }
}

/// Missing-pair counts for every single-link failure of one topology.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultReport {
    n: usize,
    per_edge: Vec<(Edge, usize)>,
}

impl FaultReport {
    /// Assembles a report from per-edge missing-pair counts.
    pub fn new(n: usize, per_edge: Vec<(Edge, usize)>) -> Self {
        FaultReport { n, per_edge }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Missing ordered pairs per failed edge, in topology edge order.
    pub fn per_edge(&self) -> &[(Edge, usize)] {
        &self.per_edge
    }

    pub fn total_ordered_pairs(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Mean missing pairs over all failure scenarios.
    pub fn mean_missing(&self) -> f64 {
        if self.per_edge.is_empty() {
            return 0.0;
        }
        let total: usize = self.per_edge.iter().map(|&(_, miss)| miss).sum();
        total as f64 / self.per_edge.len() as f64
    }

    /// CSV rendering, one row per failed link.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_u,edge_v,missing_pairs\n");
        for &((u, v), missing) in &self.per_edge {
            out.push_str(&format!("{u},{v},{missing}\n"));
        }
        out
    }
}

/// Percentage of ordered pairs still served, averaged over scenarios.
pub fn fault_coverage(report: &FaultReport) -> f64 {
    100.0 - 100.0 * report.mean_missing() / report.total_ordered_pairs() as f64
}

/// Fails every topology edge in turn, degrades all walks, and counts
/// the ordered pairs the surviving trails no longer serve. A pair is
/// served in a scenario only if some surviving trail carries it and
/// the fault-free solution served it, so failures never add coverage.
pub fn simulate_all_failures(
    sol: &RoutedSolution,
    t: &Topology,
    model: FailureModel,
    split_segments: bool,
) -> FaultReport {
    let n = t.n();
    let fault_free: Vec<PairSet> = sol
        .walks()
        .iter()
        .map(|rw| served_pairs(&rw.walk))
        .collect();
    let mut provisioned = PairSet::new(n);
    for full in &fault_free {
        provisioned.union_with(full);
    }
    let per_edge: Vec<(Edge, usize)> = t
        .edges()
        .par_iter()
        .map(|&e| {
            let mut union = PairSet::new(n);
            for (rw, full) in sol.walks().iter().zip(&fault_free) {
                match degrade_walk(&rw.walk, e, model, split_segments) {
                    Degradation::Untouched => union.union_with(full),
                    Degradation::Reduced(trails) => {
                        for trail in &trails {
                            union.union_with(&trail.served_pairs());
                        }
                    }
                    Degradation::Lost => {}
                }
            }
            union.intersect_with(&provisioned);
            (e, n * (n - 1) - union.len())
        })
        .collect();
    FaultReport { n, per_edge }
}
