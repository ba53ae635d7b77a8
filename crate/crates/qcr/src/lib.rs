//! Quorum-based cycle routing for survivable optical networks.
//!
//! The crate covers the full pipeline: searching for minimum cyclic
//! quorum base sets (plain or redundant), routing each quorum as a
//! light-trail cycle over a physical topology, degrading those cycles
//! under single-link failures, and aggregating resource and coverage
//! statistics across many random node labelings.
//!
//! ```
//! use std::time::Duration;
//! use qcr::quorum::{gen_cyclic_quorums, search::find_min_base};
//! use qcr::routing::{coverage, route_quorum_set, RouteMode};
//! use qcr::topology::{Labeling, Topology};
//!
//! let ring = Topology::parse("7 7\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n1 7").unwrap();
//! let base = find_min_base(7, 1, Duration::from_secs(1)).unwrap().base;
//! let quorums = gen_cyclic_quorums(&base);
//! let sol = route_quorum_set(&ring, &quorums, &Labeling::identity(7), RouteMode::Paired);
//! assert_eq!(coverage(&sol, 7).missing_count(), 0);
//! ```

pub mod experiment;
pub mod fault;
pub mod quorum;
pub mod routing;
pub mod topology;
