//! Command-line front end for quorum-based cycle routing.
//!
//! Subcommands cover the full pipeline: `quorum find` searches for
//! minimum base sets, `quorum verify` checks catalog files, `route`
//! prints the walks for one labeling, `simulate` fails every link and
//! reports missing pairs, and `report` aggregates many labelings into
//! CSV tables and a JSON report. Diagnostics go to standard error;
//! data goes to standard output or the `--out` directory. Exit code 0
//! means success, 1 a domain failure, 2 a usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qcr::experiment::{run_experiment, ExperimentConfig};
use qcr::fault::{fault_coverage, simulate_all_failures, FailureModel};
use qcr::quorum::catalog::{Catalog, CatalogEntry};
use qcr::quorum::search::find_min_base;
use qcr::quorum::{gen_cyclic_quorums, verify_multiplicity};
use qcr::routing::{coverage, rehub_best, route_quorum_set, HubRule, RouteMode, RoutedSolution};
use qcr::topology::{Labeling, Topology};

const DEFAULT_CATALOG: &str = "data/catalog.txt";

#[derive(Parser)]
#[command(
    name = "qcn",
    version,
    about = "Cyclic quorum sets routed as light-trail cycles over optical networks",
    propagate_version = true
)]
struct Cli {
    /// Cap worker threads used by parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "COUNT")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find or verify minimum cyclic quorum base sets.
    #[command(subcommand)]
    Quorum(QuorumCommand),

    /// Route one quorum set as cycles and print the walks.
    Route(RouteArgs),

    /// Fail every link in turn and report missing pairs per edge.
    Simulate(SimulateArgs),

    /// Run a multi-labeling experiment and write report tables.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum QuorumCommand {
    /// Search for a minimum base set and print its catalog line.
    Find(FindArgs),

    /// Check every entry of a catalog file against its multiplicity.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FindArgs {
    /// Universe size (number of nodes).
    #[arg(long)]
    n: usize,

    /// Required pair multiplicity: 1 for plain, 2 for redundant.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    m: u8,

    /// Search budget in seconds; exhausting it yields an unproven base.
    #[arg(long, default_value_t = 60)]
    budget: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog file to verify.
    #[arg(long)]
    file: PathBuf,
}

#[derive(Args)]
struct RouteArgs {
    /// Topology edge-list file.
    #[arg(long)]
    topology: PathBuf,

    /// Catalog file (default: QCN_CATALOG or data/catalog.txt).
    #[arg(long)]
    catalog: Option<PathBuf>,

    /// Routing mode.
    #[arg(long, value_parser = RouteMode::from_str)]
    mode: RouteMode,

    /// Hub choice: owner anchors each cycle at its quorum's node.
    #[arg(long, default_value = "owner", value_parser = HubRule::from_str)]
    hub: HubRule,

    /// Seed for a random node labeling (default: identity labeling).
    #[arg(long)]
    labeling_seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Topology edge-list file.
    #[arg(long)]
    topology: PathBuf,

    /// Catalog file (default: QCN_CATALOG or data/catalog.txt).
    #[arg(long)]
    catalog: Option<PathBuf>,

    /// Routing mode; single cycles have no failure story worth a table.
    #[arg(long, value_parser = parse_sim_mode)]
    mode: RouteMode,

    /// What a failed link does to the cycles crossing it.
    #[arg(long, default_value = "reconfigure", value_parser = FailureModel::from_str)]
    failure_model: FailureModel,

    /// Salvage both pieces of a walk that used a link twice.
    #[arg(long)]
    split_segments: bool,

    /// Hub choice: owner anchors each cycle at its quorum's node.
    #[arg(long, default_value = "owner", value_parser = HubRule::from_str)]
    hub: HubRule,

    /// Seed for a random node labeling (default: identity labeling).
    #[arg(long)]
    labeling_seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Topology edge-list file.
    #[arg(long)]
    topology: PathBuf,

    /// Catalog file (default: QCN_CATALOG or data/catalog.txt).
    #[arg(long)]
    catalog: Option<PathBuf>,

    /// Comma-separated routing modes, one stats block each.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "single,paired,redundant",
        value_parser = RouteMode::from_str
    )]
    modes: Vec<RouteMode>,

    /// Number of random labelings to average over.
    #[arg(long, default_value_t = 100)]
    permutations: usize,

    /// Master seed for the labeling sequence.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// What a failed link does to the cycles crossing it.
    #[arg(long, default_value = "reconfigure", value_parser = FailureModel::from_str)]
    failure_model: FailureModel,

    /// Salvage both pieces of a walk that used a link twice.
    #[arg(long)]
    split_segments: bool,

    /// Hub choice: owner anchors each cycle at its quorum's node.
    #[arg(long, default_value = "owner", value_parser = HubRule::from_str)]
    hub: HubRule,

    /// Output directory for table1-3.csv and report.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

fn parse_sim_mode(s: &str) -> Result<RouteMode, String> {
    match RouteMode::from_str(s)? {
        RouteMode::Single => Err("simulate expects paired or redundant".to_string()),
        mode => Ok(mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // a second init in the same process is harmless; keep the first
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Quorum(QuorumCommand::Find(args)) => quorum_find(args),
        Command::Quorum(QuorumCommand::Verify(args)) => quorum_verify(args),
        Command::Route(args) => route(args),
        Command::Simulate(args) => simulate(args),
        Command::Report(args) => report(args),
    }
}

fn load_topology(path: &Path) -> Result<Topology> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading topology {}", path.display()))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("topology")
        .to_string();
    let t =
        Topology::parse(&text).with_context(|| format!("parsing topology {}", path.display()))?;
    Ok(t.with_name(name))
}

fn load_catalog(explicit: Option<PathBuf>) -> Result<Catalog> {
    let path = explicit
        .or_else(|| std::env::var_os("QCN_CATALOG").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CATALOG));
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading catalog {}", path.display()))?;
    Catalog::parse(&text).with_context(|| format!("parsing catalog {}", path.display()))
}

fn quorum_find(args: FindArgs) -> Result<()> {
    let budget = Duration::from_secs(args.budget);
    let outcome = find_min_base(args.n, args.m as usize, budget)?;
    if !outcome.proven {
        eprintln!("budget exhausted; base is feasible but not proven minimal");
    }
    let entry = CatalogEntry {
        base: outcome.base,
        proven: outcome.proven,
    };
    println!("{}", entry.to_line());
    Ok(())
}

fn quorum_verify(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.file)
        .with_context(|| format!("reading catalog {}", args.file.display()))?;
    let catalog = Catalog::parse(&text)
        .with_context(|| format!("parsing catalog {}", args.file.display()))?;
    let mut bad = 0;
    for entry in catalog.entries() {
        let q = gen_cyclic_quorums(&entry.base);
        let check = verify_multiplicity(&q, entry.m());
        if check.passed() && q.covers_universe() {
            println!("n={} m={} k={}: ok", entry.n(), entry.m(), entry.base.k());
        } else {
            bad += 1;
            let (u, v) = check.failures().first().copied().unwrap_or((0, 0));
            println!(
                "n={} m={} k={}: FAILED (pair {u},{v} co-occurs fewer than {} times)",
                entry.n(),
                entry.m(),
                entry.base.k(),
                entry.m()
            );
        }
    }
    if bad > 0 {
        bail!(
            "{bad} of {} catalog entries failed verification",
            catalog.len()
        );
    }
    eprintln!("all {} entries verified", catalog.len());
    Ok(())
}

/// Routing steps shared by `route` and `simulate`.
fn build_solution(
    t: &Topology,
    catalog: &Catalog,
    mode: RouteMode,
    hub: HubRule,
    labeling_seed: Option<u64>,
) -> Result<RoutedSolution> {
    let m = mode.multiplicity();
    let entry = catalog
        .get(t.n(), m)
        .ok_or_else(|| anyhow!("catalog has no base set for n={} m={m}", t.n()))?;
    let q = gen_cyclic_quorums(&entry.base);
    let labeling = match labeling_seed {
        Some(seed) => Labeling::random(t.n(), seed),
        None => Labeling::identity(t.n()),
    };
    let mut sol = route_quorum_set(t, &q, &labeling, mode);
    if hub == HubRule::Best {
        rehub_best(&mut sol);
    }
    Ok(sol)
}

fn route(args: RouteArgs) -> Result<()> {
    let t = load_topology(&args.topology)?;
    let catalog = load_catalog(args.catalog)?;
    let sol = build_solution(&t, &catalog, args.mode, args.hub, args.labeling_seed)?;
    let cov = coverage(&sol, t.n());
    eprintln!(
        "{}: {} walks, {} links used, {} of {} ordered pairs unserved",
        t.name(),
        sol.walks().len(),
        sol.links_used(),
        cov.missing_count(),
        cov.total_ordered_pairs()
    );
    print!("{}", sol.dump());
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let t = load_topology(&args.topology)?;
    let catalog = load_catalog(args.catalog)?;
    let sol = build_solution(&t, &catalog, args.mode, args.hub, args.labeling_seed)?;
    let report = simulate_all_failures(&sol, &t, args.failure_model, args.split_segments);
    eprintln!(
        "{}: mean missing {:.3} of {} pairs over {} scenarios, fault coverage {:.3}%",
        t.name(),
        report.mean_missing(),
        report.total_ordered_pairs(),
        report.per_edge().len(),
        fault_coverage(&report)
    );
    print!("{}", report.to_csv());
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let t = load_topology(&args.topology)?;
    let catalog = load_catalog(args.catalog)?;
    let mut modes: Vec<RouteMode> = Vec::new();
    for mode in args.modes {
        if !modes.contains(&mode) {
            modes.push(mode);
        }
    }
    let cfg = ExperimentConfig {
        network: t.name().to_string(),
        topology: t,
        modes,
        permutations: args.permutations,
        seed: args.seed,
        failure_model: args.failure_model,
        split_segments: args.split_segments,
        hub_rule: args.hub,
    };
    let report = run_experiment(&cfg, &catalog)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    for (file, text) in [
        ("table1.csv", report.table1_csv()),
        ("table2.csv", report.table2_csv()),
        ("table3.csv", report.table3_csv()),
        ("report.json", report.to_json()),
    ] {
        let path = args.out.join(file);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(r) = report.reduction_pct {
        eprintln!(
            "{}: P={} reduction {:.2}%, wrote 4 files to {}",
            report.network,
            report.permutations,
            r,
            args.out.display()
        );
    } else {
        eprintln!(
            "{}: P={}, wrote 4 files to {}",
            report.network,
            report.permutations,
            args.out.display()
        );
    }
    Ok(())
}
