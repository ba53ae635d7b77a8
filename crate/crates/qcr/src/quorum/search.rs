//! Minimum-size base set search.
//!
//! The search runs in two phases. A deterministic constructive phase
//! (greedy build-up, then seeded local search shrinking one member at a
//! time) produces an incumbent that always exists for m <= n. A
//! depth-first phase then proves minimality: for each candidate size K
//! from the counting lower bound upward, it enumerates sorted member
//! vectors starting at {1} with branch-and-bound pruning. The first
//! complete solution the DFS reaches is the lexicographically smallest
//! base of the smallest feasible size.
//!
//! Budgets are charged in explored DFS candidates rather than wall
//! time, so equal inputs give identical results on any machine. The
//! conversion constant approximates one second of desk-scale hardware.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{lower_bound_k, BaseSet};

/// DFS candidates explored per budget second. The budget is charged
/// deterministically against this rate, never against the clock.
const NODES_PER_SECOND: u64 = 8_000_000;

const RESTARTS: u64 = 8;
const SWAPS_PER_NODE: usize = 600;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("no multiplicity-{m} base exists for n={n} within any size (need m <= n)")]
    Unsatisfiable { n: usize, m: usize },
    #[error("budget of {budget:?} exhausted before any multiplicity-{m} base was found for n={n}")]
    Timeout {
        n: usize,
        m: usize,
        budget: Duration,
    },
}

/// Result of [`find_min_base`]: the base plus whether the DFS proved it
/// is the lexicographically smallest base of minimum size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub base: BaseSet,
    pub proven: bool,
}

/// Finds a smallest base set whose difference multiset reaches
/// multiplicity `m` everywhere, trying sizes upward from the counting
/// bound. On budget exhaustion the deterministic incumbent from the
/// constructive phase is returned with `proven = false`.
pub fn find_min_base(n: usize, m: usize, budget: Duration) -> Result<SearchOutcome, SearchError> {
    assert!(n >= 2, "universe needs at least two nodes");
    assert!(m >= 1, "multiplicity must be at least 1");
    if m > n {
        // even the full residue set only reaches count n per residue
        return Err(SearchError::Unsatisfiable { n, m });
    }

    let mut quota = (budget.as_secs_f64() * NODES_PER_SECOND as f64).min(u64::MAX as f64) as u64;
    let incumbent = constructive_incumbent(n, m);
    let lb = lower_bound_k(n, m);

    for k in lb..=incumbent.len() {
        let mut dfs = Dfs::new(n, m, k, quota);
        match dfs.run() {
            DfsResult::Found(members) => {
                let base = BaseSet::new(n, members, m).expect("search emits valid members");
                return Ok(SearchOutcome { base, proven: true });
            }
            DfsResult::LevelEmpty => quota = quota.saturating_sub(dfs.nodes),
            DfsResult::OutOfBudget => {
                if quota == 0 {
                    // a zero budget asks for no search at all
                    return Err(SearchError::Timeout { n, m, budget });
                }
                let base = BaseSet::new(n, incumbent, m).expect("incumbent is valid");
                return Ok(SearchOutcome {
                    base,
                    proven: false,
                });
            }
        }
    }
    // The incumbent's own size level exhausted without reaching it,
    // which the enumeration order makes impossible.
    unreachable!("DFS level {} excludes its own witness", incumbent.len())
}

/// Deterministic complete solution: greedy growth from {1}, then
/// repeated attempts to solve one size smaller with seeded local
/// search. Never fails for m <= n since the full residue set works.
fn constructive_incumbent(n: usize, m: usize) -> Vec<usize> {
    let mut members = vec![1];
    let mut state = DiffState::new(n, m);
    while state.deficiency > 0 {
        // pick the element closing the most shortfall; ties to smallest
        let mut best: Option<(u64, usize)> = None;
        for x in 2..=n {
            if members.contains(&x) {
                continue;
            }
            let gain = state.gain_of(&members, x);
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, x));
            }
        }
        let (_, x) = best.expect("full set reaches multiplicity m <= n");
        state.add_against(&members, x);
        members.push(x);
    }
    members.sort_unstable();

    let lb = lower_bound_k(n, m);
    while members.len() > lb {
        match local_search(n, m, members.len() - 1) {
            Some(smaller) => members = smaller,
            None => break,
        }
    }
    members
}

/// Seeded hill climb over fixed-size member vectors containing 1.
/// Swap moves that do not worsen the deficiency are accepted; the
/// iteration and restart counts are fixed, so outcomes depend only on
/// (n, m, k).
fn local_search(n: usize, m: usize, k: usize) -> Option<Vec<usize>> {
    if k < 1 || k > n {
        return None;
    }
    let iterations = SWAPS_PER_NODE * n;
    for restart in 0..RESTARTS {
        let seed = splitmix(
            (n as u64) ^ (m as u64).rotate_left(16) ^ (k as u64).rotate_left(32) ^ restart,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut members = random_subset_with_anchor(n, k, &mut rng);
        let mut state = DiffState::new(n, m);
        for i in 0..members.len() {
            state.add_against(&members[..i], members[i]);
        }
        if state.deficiency == 0 {
            members.sort_unstable();
            return Some(members);
        }

        let mut in_set = vec![false; n + 1];
        for &x in &members {
            in_set[x] = true;
        }
        for _ in 0..iterations {
            // position 0 holds the anchor and never moves
            let pos = rng.gen_range(1..k);
            let out = members[pos];
            let cand = rng.gen_range(2..=n);
            if in_set[cand] {
                continue;
            }
            let before = state.deficiency;
            members.swap_remove(pos);
            state.remove_against(&members, out);
            state.add_against(&members, cand);
            members.push(cand);
            if state.deficiency > before {
                // the swap made things worse; put the old member back
                members.pop();
                state.remove_against(&members, cand);
                state.add_against(&members, out);
                members.push(out);
            } else {
                in_set[out] = false;
                in_set[cand] = true;
            }
            if state.deficiency == 0 {
                members.sort_unstable();
                return Some(members);
            }
        }
    }
    None
}

fn random_subset_with_anchor(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    // partial Fisher-Yates over 2..=n for the k-1 free slots
    let mut pool: Vec<usize> = (2..=n).collect();
    let mut members = vec![1];
    for i in 0..(k - 1) {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
        members.push(pool[i]);
    }
    members
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Difference counts plus running deficiency for an evolving member set.
struct DiffState {
    n: usize,
    m: usize,
    counts: Vec<u32>,
    deficiency: u64,
}

impl DiffState {
    fn new(n: usize, m: usize) -> Self {
        DiffState {
            n,
            m,
            counts: vec![0; n],
            deficiency: (m as u64) * (n as u64 - 1),
        }
    }

    fn inc(&mut self, d: usize) {
        if (self.counts[d] as usize) < self.m {
            self.deficiency -= 1;
        }
        self.counts[d] += 1;
    }

    fn dec(&mut self, d: usize) {
        self.counts[d] -= 1;
        if (self.counts[d] as usize) < self.m {
            self.deficiency += 1;
        }
    }

    /// Adds member `x`, counting its differences against `others`.
    fn add_against(&mut self, others: &[usize], x: usize) {
        let n = self.n;
        for &y in others {
            if y != x {
                self.inc((x + n - y) % n);
                self.inc((y + n - x) % n);
            }
        }
    }

    fn remove_against(&mut self, others: &[usize], x: usize) {
        let n = self.n;
        for &y in others {
            if y != x {
                self.dec((x + n - y) % n);
                self.dec((y + n - x) % n);
            }
        }
    }

    /// Deficiency reduction if `x` joined `others`, without mutating.
    fn gain_of(&mut self, others: &[usize], x: usize) -> u64 {
        let before = self.deficiency;
        self.add_against(others, x);
        let gain = before - self.deficiency;
        self.remove_against(others, x);
        gain
    }
}

enum DfsResult {
    Found(Vec<usize>),
    LevelEmpty,
    OutOfBudget,
}

/// Exhaustive enumeration of size-k sorted member vectors starting with
/// the anchor 1, pruned by the difference-capacity bound.
struct Dfs {
    n: usize,
    k: usize,
    members: Vec<usize>,
    state: DiffState,
    nodes: u64,
    quota: u64,
    exhausted: bool,
}

impl Dfs {
    fn new(n: usize, m: usize, k: usize, quota: u64) -> Self {
        let state = DiffState::new(n, m);
        Dfs {
            n,
            k,
            members: vec![1],
            state,
            nodes: 0,
            quota,
            exhausted: false,
        }
    }

    fn run(&mut self) -> DfsResult {
        debug_assert!(
            self.k >= 2,
            "sizes below the counting bound are never tried"
        );
        match self.recurse() {
            Some(members) => DfsResult::Found(members),
            None if self.exhausted => DfsResult::OutOfBudget,
            None => DfsResult::LevelEmpty,
        }
    }

    fn recurse(&mut self) -> Option<Vec<usize>> {
        let t = self.members.len();
        let r = self.k - t;
        if r == 0 {
            return (self.state.deficiency == 0).then(|| self.members.clone());
        }
        // r further members create at most 2rt + r(r-1) ordered
        // differences, each fixing at most one unit of shortfall
        let capacity = (2 * r * t + r * (r - 1)) as u64;
        if capacity < self.state.deficiency {
            return None;
        }
        let lo = *self.members.last().unwrap() + 1;
        let hi = self.n - (r - 1);
        for x in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.quota {
                self.exhausted = true;
                return None;
            }
            self.state.add_against(&self.members, x);
            self.members.push(x);
            if let Some(found) = self.recurse() {
                return Some(found);
            }
            let popped = self.members.pop().unwrap();
            self.state.remove_against(&self.members, popped);
            if self.exhausted {
                return None;
            }
        }
        None
    }
}
