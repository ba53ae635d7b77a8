//! Acceptance suite: ten go/no-go checks covering quorum search
//! correctness, routing validity, failure semantics, and the
//! experiment bands on the shipped topologies. Each check prints one
//! `[acceptance] criterion N (<name>): PASS|FAIL` line and then
//! asserts, so a filtered run still reports every verdict it reached.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qcr::experiment::{ci95, run_experiment, ExperimentConfig, ExperimentReport};
use qcr::fault::{degrade_walk, simulate_all_failures, Degradation, FailureModel};
use qcr::quorum::catalog::{Catalog, CatalogEntry};
use qcr::quorum::search::find_min_base;
use qcr::quorum::{difference_multiset, gen_cyclic_quorums, verify_multiplicity, BaseSet};
use qcr::routing::{
    route_cycle, route_quorum_set, served_pairs, ClosedWalk, HubRule, PairSet, RouteMode,
};
use qcr::topology::{Labeling, Topology};

fn verdict(number: u32, name: &str, ok: bool) {
    println!(
        "[acceptance] criterion {number} ({name}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} ({name}) failed");
}

const SEARCH_BUDGET: Duration = Duration::from_secs(120);

// ---- independent oracles -------------------------------------------------

/// True when some size-k member set containing 1 realizes every
/// nonzero difference at least m times; checked by direct enumeration.
fn base_of_size_exists(n: usize, m: usize, k: usize) -> bool {
    if k == 0 {
        return n == 1;
    }
    let mut members = vec![0usize; k];
    members[0] = 1;
    fn recurse(members: &mut Vec<usize>, depth: usize, n: usize, m: usize, k: usize) -> bool {
        if depth == k {
            let mut counts = vec![0usize; n];
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        counts[(members[j] + n - members[i]) % n] += 1;
                    }
                }
            }
            return counts[1..].iter().all(|&c| c >= m);
        }
        for x in (members[depth - 1] + 1)..=(n - (k - depth) + 1) {
            members[depth] = x;
            if recurse(members, depth + 1, n, m, k) {
                return true;
            }
        }
        false
    }
    recurse(&mut members, 1, n, m, k)
}

fn oracle_min_k(n: usize, m: usize) -> usize {
    (1..=n)
        .find(|&k| base_of_size_exists(n, m, k))
        .expect("the full universe always qualifies for m <= n-1")
}

/// Spanning tree plus extra random chords; connected by construction.
fn random_connected_topology(rng: &mut ChaCha8Rng, max_n: usize) -> Topology {
    let n = rng.gen_range(2..=max_n);
    let mut edges: Vec<(usize, usize)> = (2..=n).map(|i| (rng.gen_range(1..i), i)).collect();
    edges.sort_unstable();
    edges.dedup();
    for _ in 0..rng.gen_range(0..=n) {
        let u = rng.gen_range(1..=n);
        let v = rng.gen_range(1..=n);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Topology::new(n, &edges).expect("construction keeps invariants")
}

fn random_base(rng: &mut ChaCha8Rng, max_n: usize) -> BaseSet {
    let n = rng.gen_range(2..=max_n);
    let mut members = BTreeSet::from([1usize]);
    for _ in 0..rng.gen_range(0..n.min(9)) {
        members.insert(rng.gen_range(2..=n));
    }
    BaseSet::new(n, members.into_iter().collect(), 1).unwrap()
}

// ---- shared experiment runs ----------------------------------------------

const NETWORKS: [(&str, &str); 4] = [
    ("nsfnet", "nsfnet.txt"),
    ("arpanet", "arpanet.txt"),
    ("american", "american.txt"),
    ("chinese", "chinese.txt"),
];

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

fn shipped_catalog() -> Catalog {
    let text = std::fs::read_to_string(data_dir().join("catalog.txt")).unwrap();
    Catalog::parse(&text).unwrap()
}

fn shipped_topology(file: &str, name: &str) -> Topology {
    let text = std::fs::read_to_string(data_dir().join(file)).unwrap();
    Topology::parse(&text).unwrap().with_name(name)
}

fn experiment(
    name: &str,
    file: &str,
    modes: Vec<RouteMode>,
    p: usize,
    model: FailureModel,
) -> ExperimentReport {
    let cfg = ExperimentConfig {
        network: name.to_string(),
        topology: shipped_topology(file, name),
        modes,
        permutations: p,
        seed: 42,
        failure_model: model,
        split_segments: false,
        hub_rule: HubRule::Owner,
    };
    run_experiment(&cfg, &shipped_catalog()).unwrap()
}

/// P=100 reconfigure run over all three modes, one report per network.
fn main_reports() -> &'static Vec<ExperimentReport> {
    static REPORTS: OnceLock<Vec<ExperimentReport>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        NETWORKS
            .iter()
            .map(|&(name, file)| {
                experiment(
                    name,
                    file,
                    vec![RouteMode::Single, RouteMode::Paired, RouteMode::Redundant],
                    100,
                    FailureModel::Reconfigure,
                )
            })
            .collect()
    })
}

// ---- criteria -------------------------------------------------------------

#[test]
fn criterion_1_minimum_quorum_sizes() {
    let mut ok = true;
    for n in 4..=21 {
        let got = find_min_base(n, 1, SEARCH_BUDGET).unwrap();
        let q = gen_cyclic_quorums(&got.base);
        ok &= got.proven;
        ok &= q.covers_universe();
        ok &= q.all_pairwise_intersect();
        ok &= verify_multiplicity(&q, 1).passed();
        ok &= q.uniform_quorum_size() == Some(got.base.k());
        ok &= got.base.k() == oracle_min_k(n, 1);
        match n {
            7 => ok &= got.base.k() == 3,
            13 => ok &= got.base.k() == 4,
            21 => ok &= got.base.k() == 5,
            _ => {}
        }
    }
    verdict(1, "minimum quorum sizes", ok);
}

#[test]
fn criterion_2_redundant_quorum_sizes() {
    let mut ok = find_min_base(7, 2, SEARCH_BUDGET).unwrap().base.k() == 4;
    // n=4 is excluded: {1,2,3} is already perfect at m=2, ratio 1.0
    for n in 5..=25 {
        let plain = find_min_base(n, 1, SEARCH_BUDGET).unwrap();
        let redundant = find_min_base(n, 2, SEARCH_BUDGET).unwrap();
        ok &= plain.proven && redundant.proven;
        let q = gen_cyclic_quorums(&redundant.base);
        ok &= verify_multiplicity(&q, 2).passed();
        let mut catalog = Catalog::new();
        catalog.insert(CatalogEntry {
            base: plain.base,
            proven: plain.proven,
        });
        catalog.insert(CatalogEntry {
            base: redundant.base,
            proven: redundant.proven,
        });
        let kappa = catalog.kappa_ratio(n).unwrap();
        ok &= (1.15..=1.75).contains(&kappa);
    }
    verdict(2, "redundant quorum sizes", ok);
}

#[test]
fn criterion_3_difference_count_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = true;
    for _ in 0..200 {
        let base = random_base(&mut rng, 30);
        let n = base.n();
        let diff = difference_multiset(&base);
        let report = verify_multiplicity(&gen_cyclic_quorums(&base), 1);
        for u in 1..=n {
            for v in 1..=n {
                if u != v {
                    ok &= diff.count((v + n - u) % n) == report.count(u, v);
                }
            }
        }
    }
    verdict(3, "difference count oracle", ok);
}

#[test]
fn criterion_4_paired_mode_completeness() {
    let mut ok = true;
    for &(name, file) in &NETWORKS {
        let report = experiment(
            name,
            file,
            vec![RouteMode::Paired],
            20,
            FailureModel::Reconfigure,
        );
        let stats = report.mode(RouteMode::Paired).unwrap();
        ok &= stats.missing_pairs.mean == 0.0;
        ok &= stats.missing_pairs.ci_hi == 0.0;
    }
    verdict(4, "paired mode completeness", ok);
}

#[test]
fn criterion_5_resource_reduction_band() {
    let mut ok = true;
    for report in main_reports() {
        let single = report.mode(RouteMode::Single).unwrap().links_used.mean;
        let paired = report.mode(RouteMode::Paired).unwrap().links_used.mean;
        ok &= paired == 2.0 * single;
        let r = report.reduction_pct.unwrap();
        ok &= (38.0..=52.0).contains(&r);
    }
    verdict(5, "resource reduction band", ok);
}

#[test]
fn criterion_6_redundant_fault_free_misses() {
    let mut ok = true;
    for report in main_reports() {
        let single = report.mode(RouteMode::Single).unwrap().missing_pct.mean;
        let redundant = report.mode(RouteMode::Redundant).unwrap().missing_pct.mean;
        ok &= redundant <= 2.0;
        ok &= redundant < single;
    }
    verdict(6, "redundant fault-free misses", ok);
}

#[test]
fn criterion_7_fault_coverage_bands() {
    let mut ok = true;
    for report in main_reports() {
        let paired = report.mode(RouteMode::Paired).unwrap();
        ok &= paired.failure_missing_pct.mean <= 1.0;
        let redundant = report.mode(RouteMode::Redundant).unwrap();
        match report.network.as_str() {
            "nsfnet" => ok &= redundant.fault_coverage_pct.mean >= 95.0,
            "chinese" => ok &= redundant.fault_coverage_pct.mean >= 98.5,
            _ => {}
        }
        // cycle-loss must cost strictly more than shutter relocation
        let loss = experiment(
            &report.network,
            NETWORKS
                .iter()
                .find(|(n, _)| *n == report.network)
                .unwrap()
                .1,
            vec![RouteMode::Paired],
            100,
            FailureModel::CycleLoss,
        );
        let loss_pct = loss
            .mode(RouteMode::Paired)
            .unwrap()
            .failure_missing_pct
            .mean;
        ok &= loss_pct > paired.failure_missing_pct.mean;
    }
    verdict(7, "fault coverage bands", ok);
}

#[test]
fn criterion_8_walk_validity_suite() {
    let mut seeder = ChaCha8Rng::seed_from_u64(8);
    let seeds: Vec<u64> = (0..10_000).map(|_| seeder.gen()).collect();
    let ok = seeds
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_connected_topology(&mut rng, 20);
            let count = rng.gen_range(1..=t.n().min(6));
            let mut terminals = BTreeSet::new();
            while terminals.len() < count {
                terminals.insert(rng.gen_range(1..=t.n()));
            }
            let terminals: Vec<usize> = terminals.into_iter().collect();
            let hub = terminals[rng.gen_range(0..terminals.len())];
            let w = route_cycle(&t, &terminals, hub);

            // adjacency, arc uniqueness, and terminal coverage are all
            // re-established by rebuilding the walk from raw pieces
            let rebuilt = ClosedWalk::new(&t, w.nodes().to_vec(), terminals.clone());
            let mut good = rebuilt.as_ref() == Ok(&w) && w.hub() == hub;

            let served = served_pairs(&w);
            let nodes = w.nodes();
            for u in 1..=t.n() {
                for v in 1..=t.n() {
                    if u == v {
                        continue;
                    }
                    let first_u = nodes.iter().position(|&x| x == u);
                    let last_v = nodes.iter().rposition(|&x| x == v);
                    let expect = matches!((first_u, last_v), (Some(a), Some(b)) if a < b);
                    good &= served.contains(u, v) == expect;
                }
            }
            good
        })
        .reduce(|| true, |a, b| a && b);
    verdict(8, "walk validity suite", ok);
}

#[test]
fn criterion_9_failure_monotonicity_suite() {
    let mut seeder = ChaCha8Rng::seed_from_u64(9);
    let seeds: Vec<u64> = (0..1_000).map(|_| seeder.gen()).collect();
    let ok = seeds
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_connected_topology(&mut rng, 12);
            let n = t.n();
            let mut members = BTreeSet::from([1usize]);
            for _ in 0..rng.gen_range(1..=3) {
                members.insert(rng.gen_range(2..=n.max(2)));
            }
            let members: Vec<usize> = members.into_iter().filter(|&x| x <= n).collect();
            let base = BaseSet::new(n, members, 1).unwrap();
            let q = gen_cyclic_quorums(&base);
            let labeling = Labeling::random(n, rng.gen());
            let mode = match rng.gen_range(0..3) {
                0 => RouteMode::Single,
                1 => RouteMode::Paired,
                _ => RouteMode::Redundant,
            };
            let sol = route_quorum_set(&t, &q, &labeling, mode);
            let e = t.edges()[rng.gen_range(0..t.edge_count())];
            let split = rng.gen::<bool>();

            let frees: Vec<PairSet> = sol
                .walks()
                .iter()
                .map(|rw| served_pairs(&rw.walk))
                .collect();
            let mut fault_free = PairSet::new(n);
            for f in &frees {
                fault_free.union_with(f);
            }
            let scenario = |model: FailureModel| {
                let mut union = PairSet::new(n);
                for (rw, free) in sol.walks().iter().zip(&frees) {
                    match degrade_walk(&rw.walk, e, model, split) {
                        Degradation::Untouched => union.union_with(free),
                        Degradation::Reduced(trails) => {
                            for trail in &trails {
                                union.union_with(&trail.served_pairs());
                            }
                        }
                        Degradation::Lost => {}
                    }
                }
                union.intersect_with(&fault_free);
                union
            };
            let reconf = scenario(FailureModel::Reconfigure);
            let loss = scenario(FailureModel::CycleLoss);
            let mut good = reconf.is_subset_of(&fault_free);
            good &= loss.is_subset_of(&reconf);

            // the shipped simulator must agree with this reconstruction
            let report = simulate_all_failures(&sol, &t, FailureModel::Reconfigure, split);
            let (_, missing) = report.per_edge().iter().find(|(ee, _)| *ee == e).unwrap();
            good &= *missing == n * (n - 1) - reconf.len();
            good
        })
        .reduce(|| true, |a, b| a && b);
    verdict(9, "failure monotonicity suite", ok);
}

#[test]
fn criterion_10_statistics() {
    let (lo, hi) = ci95(&[1.0, 2.0, 3.0]).unwrap();
    let mut ok = (lo - 0.868).abs() <= 0.001 && (hi - 3.132).abs() <= 0.001;

    let a = experiment(
        "nsfnet",
        "nsfnet.txt",
        vec![RouteMode::Paired, RouteMode::Redundant],
        10,
        FailureModel::Reconfigure,
    );
    let b = experiment(
        "nsfnet",
        "nsfnet.txt",
        vec![RouteMode::Paired, RouteMode::Redundant],
        10,
        FailureModel::Reconfigure,
    );
    ok &= a.to_json() == b.to_json();
    ok &= a.table1_csv() == b.table1_csv();
    ok &= a.table2_csv() == b.table2_csv();
    ok &= a.table3_csv() == b.table3_csv();
    verdict(10, "statistics", ok);
}
