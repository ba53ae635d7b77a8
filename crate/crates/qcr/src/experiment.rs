//! Multi-labeling experiment harness.
//!
//! One experiment routes a quorum set over P random relabelings of a
//! topology, measures links used and missing pairs with and without
//! single-link failures, and aggregates each metric into a mean with
//! a 95% confidence interval. Labeling seeds are drawn up front from
//! the master seed and samples are folded in labeling-index order, so
//! a fixed configuration always produces byte-identical reports no
//! matter how the evaluations are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fault::{simulate_all_failures, FailureModel};
use crate::quorum::catalog::Catalog;
use crate::quorum::gen_cyclic_quorums;
use crate::routing::{coverage, rehub_best, route_quorum_set, HubRule, RouteMode};
use crate::topology::{Labeling, Topology};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("catalog has no base set for n={n}, m={m}")]
    CatalogMissing { n: usize, m: usize },
    #[error("cannot aggregate an empty sample list")]
    EmptySamples,
}

/// Everything one experiment run depends on.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Label used in the network column of every report row.
    pub network: String,
    pub topology: Topology,
    /// Modes evaluated, one stats block each, in this order.
    pub modes: Vec<RouteMode>,
    /// Number of random labelings P; at least 1.
    pub permutations: usize,
    pub seed: u64,
    pub failure_model: FailureModel,
    pub split_segments: bool,
    pub hub_rule: HubRule,
}

/// Mean and 95% confidence bounds of one metric over P labelings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Aggregated metrics for one routing mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub mode: String,
    pub links_used: MetricStats,
    pub missing_pairs: MetricStats,
    pub missing_pct: MetricStats,
    pub failure_missing_pairs: MetricStats,
    pub failure_missing_pct: MetricStats,
    pub fault_coverage_pct: MetricStats,
}

/// Full outcome of one experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub network: String,
    pub n: usize,
    pub permutations: usize,
    pub seed: u64,
    pub failure_model: String,
    pub split_segments: bool,
    pub hub_rule: String,
    pub modes: Vec<ModeStats>,
    /// Link saving of redundant over paired routing, when both ran.
    pub reduction_pct: Option<f64>,
}

/// 95% confidence interval around the sample mean, using the normal
/// approximation with the sample standard deviation. A single sample
/// degenerates to a zero-width interval at its own value.
pub fn ci95(samples: &[f64]) -> Result<(f64, f64), ExperimentError> {
    if samples.is_empty() {
        return Err(ExperimentError::EmptySamples);
    }
    let p = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / p;
    if samples.len() == 1 {
        return Ok((mean, mean));
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (p - 1.0);
    let half = 1.96 * (var / p).sqrt();
    Ok((mean - half, mean + half))
}

/// Percentage of links saved by the redundant mode over the paired
/// baseline, computed from the two mean link counts.
pub fn reduction(paired_links: f64, redundant_links: f64) -> f64 {
    assert!(paired_links > 0.0, "paired link mean must be positive");
    100.0 * (1.0 - redundant_links / paired_links)
}

fn stats(samples: &[f64]) -> Result<MetricStats, ExperimentError> {
    let (ci_lo, ci_hi) = ci95(samples)?;
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    Ok(MetricStats { mean, ci_lo, ci_hi })
}

/// Raw measurements from one labeling under one mode.
#[derive(Debug, Clone, Copy)]
struct Sample {
    links: f64,
    missing: f64,
    failure_missing: f64,
}

/// Routes every requested mode across P seeded labelings of the
/// configured topology and aggregates the per-labeling measurements.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    catalog: &Catalog,
) -> Result<ExperimentReport, ExperimentError> {
    let n = cfg.topology.n();
    let quorum_sets: Vec<_> = cfg
        .modes
        .iter()
        .map(|mode| {
            let m = mode.multiplicity();
            let entry = catalog
                .get(n, m)
                .ok_or(ExperimentError::CatalogMissing { n, m })?;
            Ok(gen_cyclic_quorums(&entry.base))
        })
        .collect::<Result<_, _>>()?;

    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.permutations).map(|_| seeder.gen()).collect();

    let rows: Vec<Vec<Sample>> = seeds
        .into_par_iter()
        .map(|labeling_seed| {
            let labeling = Labeling::random(n, labeling_seed);
            cfg.modes
                .iter()
                .zip(&quorum_sets)
                .map(|(&mode, q)| {
                    let mut sol = route_quorum_set(&cfg.topology, q, &labeling, mode);
                    if cfg.hub_rule == HubRule::Best {
                        rehub_best(&mut sol);
                    }
                    let missing = coverage(&sol, n).missing_count();
                    let report = simulate_all_failures(
                        &sol,
                        &cfg.topology,
                        cfg.failure_model,
                        cfg.split_segments,
                    );
                    Sample {
                        links: sol.links_used() as f64,
                        missing: missing as f64,
                        failure_missing: report.mean_missing(),
                    }
                })
                .collect()
        })
        .collect();

    let total_pairs = (n * (n - 1)) as f64;
    let mut modes = Vec::with_capacity(cfg.modes.len());
    for (idx, &mode) in cfg.modes.iter().enumerate() {
        let links: Vec<f64> = rows.iter().map(|r| r[idx].links).collect();
        let missing: Vec<f64> = rows.iter().map(|r| r[idx].missing).collect();
        let missing_pct: Vec<f64> = missing.iter().map(|x| 100.0 * x / total_pairs).collect();
        let fail: Vec<f64> = rows.iter().map(|r| r[idx].failure_missing).collect();
        let fail_pct: Vec<f64> = fail.iter().map(|x| 100.0 * x / total_pairs).collect();
        let cov_pct: Vec<f64> = fail_pct.iter().map(|x| 100.0 - x).collect();
        modes.push(ModeStats {
            mode: mode.as_str().to_string(),
            links_used: stats(&links)?,
            missing_pairs: stats(&missing)?,
            missing_pct: stats(&missing_pct)?,
            failure_missing_pairs: stats(&fail)?,
            failure_missing_pct: stats(&fail_pct)?,
            fault_coverage_pct: stats(&cov_pct)?,
        });
    }

    let find = |want: RouteMode| {
        cfg.modes
            .iter()
            .position(|&m| m == want)
            .map(|i| modes[i].links_used.mean)
    };
    let reduction_pct = match (find(RouteMode::Paired), find(RouteMode::Redundant)) {
        (Some(paired), Some(redundant)) => Some(reduction(paired, redundant)),
        _ => None,
    };

    Ok(ExperimentReport {
        network: cfg.network.clone(),
        n,
        permutations: cfg.permutations,
        seed: cfg.seed,
        failure_model: cfg.failure_model.to_string(),
        split_segments: cfg.split_segments,
        hub_rule: cfg.hub_rule.to_string(),
        modes,
        reduction_pct,
    })
}

const CSV_HEADER: &str = "network,mode,metric,mean,ci_lo,ci_hi\n";

fn push_row(out: &mut String, network: &str, mode: &str, metric: &str, s: &MetricStats) {
    out.push_str(&format!(
        "{network},{mode},{metric},{:.6},{:.6},{:.6}\n",
        s.mean, s.ci_lo, s.ci_hi
    ));
}

impl ExperimentReport {
    /// Stats block for one mode, if it was part of the run.
    pub fn mode(&self, mode: RouteMode) -> Option<&ModeStats> {
        self.modes.iter().find(|m| m.mode == mode.as_str())
    }

    /// Links used per mode, plus the paired-to-redundant saving.
    pub fn table1_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for m in &self.modes {
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "links_used",
                &m.links_used,
            );
        }
        if let Some(r) = self.reduction_pct {
            let point = MetricStats {
                mean: r,
                ci_lo: r,
                ci_hi: r,
            };
            push_row(
                &mut out,
                &self.network,
                "redundant",
                "reduction_vs_paired_pct",
                &point,
            );
        }
        out
    }

    /// Fault-free missing pairs per mode.
    pub fn table2_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for m in &self.modes {
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "missing_pairs",
                &m.missing_pairs,
            );
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "missing_pct",
                &m.missing_pct,
            );
        }
        out
    }

    /// Missing pairs and coverage under single-link failures per mode.
    pub fn table3_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        for m in &self.modes {
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "failure_missing_pairs",
                &m.failure_missing_pairs,
            );
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "failure_missing_pct",
                &m.failure_missing_pct,
            );
            push_row(
                &mut out,
                &self.network,
                &m.mode,
                "fault_coverage_pct",
                &m.fault_coverage_pct,
            );
        }
        out
    }

    /// Pretty JSON with a trailing newline; parses back losslessly.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
