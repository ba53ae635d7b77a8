//! Cyclic quorum sets and the difference-multiset machinery behind them.
//!
//! A quorum system over `{1..n}` assigns every node `i` a subset S_i so
//! that the subsets jointly cover the universe and pairwise intersect.
//! The cyclic construction keeps one base subset containing residue 1
//! and shifts it n times; everything about pair co-occurrence then
//! reduces to counting modular differences within the base, which is
//! what makes verification and minimum-size search tractable.

pub mod catalog;
pub mod search;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuorumError {
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("multiplicity target must be at least 1")]
    ZeroMultiplicity,
    #[error("base set must not be empty")]
    EmptyBase,
    #[error("base set for n={n} must contain residue 1")]
    MissingAnchor { n: usize },
    #[error("member {member} outside 1..={n}")]
    MemberOutOfRange { member: usize, n: usize },
    #[error("duplicate member {member}")]
    DuplicateMember { member: usize },
}

/// The generating subset of a cyclic quorum system: K residues of
/// `{1..n}` including 1, plus the pair multiplicity the set is meant
/// to achieve (1 for plain quorums, 2 for redundant ones).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSet {
    n: usize,
    members: Vec<usize>,
    multiplicity_target: usize,
}

impl BaseSet {
    /// Validates and normalizes a base set. Members are sorted; they
    /// must be distinct residues in `1..=n` and include 1.
    pub fn new(
        n: usize,
        mut members: Vec<usize>,
        multiplicity_target: usize,
    ) -> Result<Self, QuorumError> {
        if n == 0 {
            return Err(QuorumError::EmptyUniverse);
        }
        if multiplicity_target == 0 {
            return Err(QuorumError::ZeroMultiplicity);
        }
        if members.is_empty() {
            return Err(QuorumError::EmptyBase);
        }
        members.sort_unstable();
        for &member in &members {
            if member < 1 || member > n {
                return Err(QuorumError::MemberOutOfRange { member, n });
            }
        }
        for pair in members.windows(2) {
            if pair[0] == pair[1] {
                return Err(QuorumError::DuplicateMember { member: pair[0] });
            }
        }
        if members[0] != 1 {
            return Err(QuorumError::MissingAnchor { n });
        }
        Ok(BaseSet {
            n,
            members,
            multiplicity_target,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Member count, written K throughout.
    pub fn k(&self) -> usize {
        self.members.len()
    }

    /// Members in ascending order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn multiplicity_target(&self) -> usize {
        self.multiplicity_target
    }
}

/// The n quorums generated from one base set by cyclic shifting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuorumSet {
    n: usize,
    quorums: Vec<Vec<usize>>,
    base: BaseSet,
}

impl QuorumSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Quorum S_i for `i` in `1..=n`, members sorted ascending.
    pub fn quorum(&self, i: usize) -> &[usize] {
        &self.quorums[i - 1]
    }

    /// All quorums, S_1 first.
    pub fn quorums(&self) -> &[Vec<usize>] {
        &self.quorums
    }

    pub fn base(&self) -> &BaseSet {
        &self.base
    }

    /// Every universe element appears in at least one quorum. True for
    /// every cyclic quorum set, since shifting walks each member
    /// through all residues.
    pub fn covers_universe(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        for q in &self.quorums {
            for &x in q {
                seen[x] = true;
            }
        }
        (1..=self.n).all(|x| seen[x])
    }

    /// Every two quorums share at least one element. Holds exactly when
    /// the base is a difference cover (each nonzero residue appears
    /// among the base's pairwise differences).
    pub fn all_pairwise_intersect(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !intersects(&self.quorums[i], &self.quorums[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// All quorums have the same size; returns it. Cyclic shifts of
    /// distinct residues stay distinct, so this never fails for sets
    /// built by [`gen_cyclic_quorums`].
    pub fn uniform_quorum_size(&self) -> Option<usize> {
        let k = self.quorums[0].len();
        self.quorums.iter().all(|q| q.len() == k).then_some(k)
    }

    /// Number of quorums each element belongs to, indexed by element.
    /// Equal responsibility means every entry equals the quorum size.
    pub fn membership_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n + 1];
        for q in &self.quorums {
            for &x in q {
                counts[x] += 1;
            }
        }
        counts.remove(0);
        counts
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    // both sorted; standard merge scan
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Smallest quorum size K that the difference-counting argument allows
/// for universe size `n` at multiplicity `m`: the K(K-1) ordered member
/// differences must cover each of the n-1 nonzero residues at least m
/// times, so K(K-1) >= m(n-1).
pub fn lower_bound_k(n: usize, m: usize) -> usize {
    assert!(n >= 2, "universe needs at least two nodes");
    assert!(m >= 1, "multiplicity must be at least 1");
    let need = m * (n - 1);
    let mut k = 1;
    while k * (k - 1) < need {
        k += 1;
    }
    k
}

/// Expands a base set into its n cyclic quorums: member b of the base
/// contributes residue ((b-1 + i-1) mod n) + 1 to quorum S_i.
pub fn gen_cyclic_quorums(base: &BaseSet) -> QuorumSet {
    let n = base.n;
    let mut quorums = Vec::with_capacity(n);
    for i in 1..=n {
        let mut q: Vec<usize> = base
            .members
            .iter()
            .map(|&b| ((b - 1 + (i - 1)) % n) + 1)
            .collect();
        q.sort_unstable();
        quorums.push(q);
    }
    QuorumSet {
        n,
        quorums,
        base: base.clone(),
    }
}

/// Occurrence counts of the nonzero residues (b_j - b_i) mod n over
/// ordered member pairs of one base set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMultiset {
    n: usize,
    counts: Vec<usize>,
}

impl DifferenceMultiset {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Count of residue `d`, for `d` in `1..n`.
    pub fn count(&self, d: usize) -> usize {
        self.counts[d]
    }

    /// Sum of all counts, always K(K-1).
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// True when every nonzero residue occurs at least `m` times, the
    /// defining condition for a multiplicity-m cyclic quorum set.
    pub fn meets(&self, m: usize) -> bool {
        (1..self.n).all(|d| self.counts[d] >= m)
    }

    /// Total shortfall against multiplicity `m`: sum over residues of
    /// max(0, m - count). Zero exactly when [`meets`](Self::meets).
    pub fn deficiency(&self, m: usize) -> usize {
        (1..self.n).map(|d| m.saturating_sub(self.counts[d])).sum()
    }
}

/// Counts the ordered pairwise differences of a base set modulo n.
pub fn difference_multiset(base: &BaseSet) -> DifferenceMultiset {
    let n = base.n;
    let mut counts = vec![0; n];
    for &a in &base.members {
        for &b in &base.members {
            if a != b {
                counts[(b + n - a) % n] += 1;
            }
        }
    }
    DifferenceMultiset { n, counts }
}

/// Brute-force co-occurrence census over a quorum set: for every
/// ordered node pair, how many quorums contain both.
#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    n: usize,
    m: usize,
    pair_counts: Vec<usize>,
    failures: Vec<(usize, usize)>,
}

impl MultiplicityReport {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of quorums containing both `u` and `v`.
    pub fn count(&self, u: usize, v: usize) -> usize {
        self.pair_counts[(u - 1) * self.n + (v - 1)]
    }

    /// Ordered pairs whose count fell short of m, ascending.
    pub fn failures(&self) -> &[(usize, usize)] {
        &self.failures
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks pair multiplicity by direct enumeration over quorums. This
/// is the oracle for [`difference_multiset`]: for cyclic quorum sets
/// the count of ordered pair (u,v) equals the difference count of
/// (v-u) mod n.
pub fn verify_multiplicity(q: &QuorumSet, m: usize) -> MultiplicityReport {
    let n = q.n;
    let mut pair_counts = vec![0; n * n];
    for quorum in &q.quorums {
        for &u in quorum {
            for &v in quorum {
                if u != v {
                    pair_counts[(u - 1) * n + (v - 1)] += 1;
                }
            }
        }
    }
    let mut failures = Vec::new();
    for u in 1..=n {
        for v in 1..=n {
            if u != v && pair_counts[(u - 1) * n + (v - 1)] < m {
                failures.push((u, v));
            }
        }
    }
    MultiplicityReport {
        n,
        m,
        pair_counts,
        failures,
    }
}

/// Greedy cover of the universe by quorums, for flooding a message from
/// `source` with few multicasts. The first selected quorum contains the
/// source; each later pick covers the most still-uncovered nodes, ties
/// broken by smallest quorum index.
pub fn broadcast_plan(q: &QuorumSet, source: usize) -> Vec<usize> {
    assert!(
        (1..=q.n).contains(&source),
        "source {source} outside 1..={}",
        q.n
    );
    let n = q.n;
    let mut covered = vec![false; n + 1];
    let mut remaining = n;
    let mut plan = Vec::new();

    // The anchor residue keeps node i inside its own quorum S_i, so a
    // quorum containing the source always exists.
    let first = (1..=n)
        .find(|&i| q.quorums[i - 1].binary_search(&source).is_ok())
        .expect("anchor guarantees source membership");
    let mut pick = first;
    loop {
        plan.push(pick);
        for &x in &q.quorums[pick - 1] {
            if !covered[x] {
                covered[x] = true;
                remaining -= 1;
            }
        }
        if remaining == 0 {
            return plan;
        }
        pick = (1..=n)
            .max_by_key(|&i| {
                let gain = q.quorums[i - 1].iter().filter(|&&x| !covered[x]).count();
                (gain, std::cmp::Reverse(i))
            })
            .unwrap();
    }
}
