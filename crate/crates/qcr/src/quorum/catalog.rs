//! Persisted base-set solutions.
//!
//! Minimum-base searches for large n are expensive, so solved bases are
//! kept in a small text catalog that experiments consult before ever
//! searching. One line per solution:
//!
//! ```text
//! N m K proven|unproven : c1,c2,...,cK
//! ```
//!
//! with members ascending. Lines starting with `#` and blank lines are
//! ignored. At most one entry per (N, m) pair.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{BaseSet, QuorumError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("line {line}: malformed catalog entry: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: invalid base set: {source}")]
    InvalidBase {
        line: usize,
        #[source]
        source: QuorumError,
    },
    #[error("line {line}: second entry for n={n} m={m}")]
    DuplicateEntry { line: usize, n: usize, m: usize },
    #[error("catalog has no base for n={n} m={m}")]
    MissingSolution { n: usize, m: usize },
}

/// One solved base set plus whether its minimality was proven by
/// exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub base: BaseSet,
    pub proven: bool,
}

impl CatalogEntry {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.base.multiplicity_target()
    }

    /// Renders the entry in catalog line format.
    pub fn to_line(&self) -> String {
        let members: Vec<String> = self.base.members().iter().map(|c| c.to_string()).collect();
        format!(
            "{} {} {} {} : {}",
            self.n(),
            self.m(),
            self.base.k(),
            if self.proven { "proven" } else { "unproven" },
            members.join(",")
        )
    }
}

/// Collection of solved bases keyed by (n, m).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<(usize, usize), CatalogEntry>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut catalog = Catalog::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let entry = parse_line(trimmed, line)?;
            let key = (entry.n(), entry.m());
            if catalog.entries.contains_key(&key) {
                return Err(CatalogError::DuplicateEntry {
                    line,
                    n: key.0,
                    m: key.1,
                });
            }
            catalog.entries.insert(key, entry);
        }
        Ok(catalog)
    }

    /// Renders all entries, ascending by (n, m). Parsing the output
    /// reproduces the catalog.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            let _ = writeln!(out, "{}", entry.to_line());
        }
        out
    }

    pub fn get(&self, n: usize, m: usize) -> Option<&CatalogEntry> {
        self.entries.get(&(n, m))
    }

    /// Inserts or replaces the entry for the entry's (n, m).
    pub fn insert(&mut self, entry: CatalogEntry) {
        self.entries.insert((entry.n(), entry.m()), entry);
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Quorum growth factor for going redundant at universe size `n`:
    /// the m=2 base size over the m=1 base size.
    pub fn kappa_ratio(&self, n: usize) -> Result<f64, CatalogError> {
        let k1 = self
            .get(n, 1)
            .ok_or(CatalogError::MissingSolution { n, m: 1 })?;
        let k2 = self
            .get(n, 2)
            .ok_or(CatalogError::MissingSolution { n, m: 2 })?;
        Ok(k2.base.k() as f64 / k1.base.k() as f64)
    }
}

fn parse_line(text: &str, line: usize) -> Result<CatalogEntry, CatalogError> {
    let err = |reason: &str| CatalogError::MalformedLine {
        line,
        reason: reason.to_string(),
    };
    let (head, members_part) = text
        .split_once(':')
        .ok_or_else(|| err("missing ':' separator"))?;

    let fields: Vec<&str> = head.split_whitespace().collect();
    let [n, m, k, provenness] = fields[..] else {
        return Err(err("expected \"N m K proven|unproven\" before ':'"));
    };
    let n: usize = n.parse().map_err(|_| err("N is not a number"))?;
    let m: usize = m.parse().map_err(|_| err("m is not a number"))?;
    let k: usize = k.parse().map_err(|_| err("K is not a number"))?;
    let proven = match provenness {
        "proven" => true,
        "unproven" => false,
        other => return Err(err(&format!("expected proven|unproven, got {other:?}"))),
    };

    let mut members = Vec::new();
    for part in members_part.trim().split(',') {
        let c: usize = part
            .trim()
            .parse()
            .map_err(|_| err(&format!("member {part:?} is not a number")))?;
        members.push(c);
    }
    if members.len() != k {
        return Err(err(&format!(
            "K={k} disagrees with {} listed members",
            members.len()
        )));
    }
    if !members.windows(2).all(|w| w[0] < w[1]) {
        return Err(err("members must be listed in ascending order"));
    }
    let base =
        BaseSet::new(n, members, m).map_err(|source| CatalogError::InvalidBase { line, source })?;
    Ok(CatalogEntry { base, proven })
}
