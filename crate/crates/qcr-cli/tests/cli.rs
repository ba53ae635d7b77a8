//! End-to-end checks of the qcn binary: output formats, exit codes,
//! catalog resolution, and byte-reproducibility of generated reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcn"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn data(file: &str) -> PathBuf {
    repo_root().join("data").join(file)
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn find_prints_known_minimum_bases() {
    let out = bin()
        .args(["quorum", "find", "--n", "7", "--m", "2"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&out), "7 2 4 proven : 1,2,3,5\n");

    let out = bin()
        .args(["quorum", "find", "--n", "7", "--m", "1"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&out), "7 1 3 proven : 1,2,4\n");
}

#[test]
fn verify_accepts_what_find_emits() {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = String::new();
    for (n, m) in [(5, 1), (7, 2), (9, 1)] {
        let out = bin()
            .args([
                "quorum",
                "find",
                "--n",
                &n.to_string(),
                "--m",
                &m.to_string(),
            ])
            .output()
            .unwrap();
        lines.push_str(&stdout_of(&out));
    }
    let path = dir.path().join("found.txt");
    std::fs::write(&path, &lines).unwrap();

    let out = bin()
        .args(["quorum", "verify", "--file"])
        .arg(&path)
        .output()
        .unwrap();
    let text = stdout_of(&out);
    assert_eq!(text.matches(": ok").count(), 3);
}

#[test]
fn verify_rejects_a_deficient_base() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    // {1,2} only realizes differences 1 and 6 on Z_7
    std::fs::write(&path, "7 1 2 unproven : 1,2\n").unwrap();
    let out = bin()
        .args(["quorum", "verify", "--file"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAILED"));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("--definitely-not-a-flag").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["simulate", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--mode", "single"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["quorum", "find", "--n", "9", "--m", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = bin()
        .args(["quorum", "verify", "--file", "/no/such/catalog.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // triangle topology has no catalog entry for n=3
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.txt");
    std::fs::write(&tri, "3 3\n1 2\n2 3\n1 3\n").unwrap();
    let out = bin()
        .args(["route", "--topology"])
        .arg(&tri)
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "single"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n=3"));
}

#[test]
fn route_dump_lists_every_quorum_walk() {
    let out = bin()
        .args(["route", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "single", "--labeling-seed", "9"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    for (i, line) in lines.iter().enumerate() {
        let (head, walk) = line.split_once(" : ").unwrap();
        let mut head_parts = head.split_whitespace();
        assert_eq!(head_parts.next().unwrap(), (i + 1).to_string());
        let hub: usize = head_parts.next().unwrap().parse().unwrap();
        let nodes: Vec<usize> = walk
            .split_whitespace()
            .map(|w| w.parse().unwrap())
            .collect();
        assert_eq!(nodes.first(), Some(&hub));
        assert_eq!(nodes.last(), Some(&hub));
    }
}

#[test]
fn paired_route_doubles_the_walks() {
    let single = bin()
        .args(["route", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "single"])
        .output()
        .unwrap();
    let paired = bin()
        .args(["route", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "paired"])
        .output()
        .unwrap();
    assert_eq!(
        stdout_of(&single).lines().count() * 2,
        stdout_of(&paired).lines().count()
    );
}

#[test]
fn simulate_emits_one_row_per_edge() {
    let out = bin()
        .args(["simulate", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "redundant", "--failure-model", "cycle-loss"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("edge_u,edge_v,missing_pairs"));
    assert_eq!(lines.count(), 22);
}

#[test]
fn report_writes_all_four_files_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = bin()
            .args(["report", "--topology"])
            .arg(data("nsfnet.txt"))
            .args(["--catalog"])
            .arg(data("catalog.txt"))
            .args([
                "--modes",
                "paired,redundant",
                "--permutations",
                "5",
                "--seed",
                "1",
                "--out",
            ])
            .arg(out)
            .output()
            .unwrap();
        stdout_of(&run);
    }
    for file in ["table1.csv", "table2.csv", "table3.csv", "report.json"] {
        let left = std::fs::read(a.join(file)).unwrap();
        let right = std::fs::read(b.join(file)).unwrap();
        assert_eq!(left, right, "{file} differs between identical runs");
        assert!(!left.is_empty());
    }
    let table2 = std::fs::read_to_string(a.join("table2.csv")).unwrap();
    assert!(table2.contains("nsfnet,paired,missing_pairs,0.000000,0.000000,0.000000"));
    let table1 = std::fs::read_to_string(a.join("table1.csv")).unwrap();
    assert!(table1.contains("reduction_vs_paired_pct"));
}

#[test]
fn env_var_supplies_the_default_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("cat.txt");
    std::fs::copy(data("catalog.txt"), &catalog).unwrap();

    // empty working directory: the relative default path cannot resolve
    let out = bin()
        .current_dir(dir.path())
        .env_remove("QCN_CATALOG")
        .args(["route", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--mode", "single"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .current_dir(dir.path())
        .env("QCN_CATALOG", &catalog)
        .args(["route", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--mode", "single"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn jobs_flag_caps_threads_without_changing_output() {
    let narrow = bin()
        .args(["--jobs", "1", "simulate", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "paired"])
        .output()
        .unwrap();
    let wide = bin()
        .args(["simulate", "--topology"])
        .arg(data("nsfnet.txt"))
        .args(["--catalog"])
        .arg(data("catalog.txt"))
        .args(["--mode", "paired"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&narrow), stdout_of(&wide));
}

#[test]
fn shipped_topologies_match_published_counts() {
    for (file, n, m) in [
        ("nsfnet.txt", 14, 22),
        ("arpanet.txt", 20, 31),
        ("american.txt", 24, 43),
        ("chinese.txt", 54, 103),
    ] {
        let text = std::fs::read_to_string(data(file)).unwrap();
        let header = text
            .lines()
            .find(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .unwrap();
        assert_eq!(header, format!("{n} {m}"), "{file}");
        let edges = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .count()
            - 1;
        assert_eq!(edges, m, "{file}");
    }
}
