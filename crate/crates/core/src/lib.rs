//! Detection of *network clocks*: heterogeneous partitions of a discrete
//! timeline that maximize the independent-cascade likelihood of observed
//! diffusion cascades over a directed graph.
//!
//! The crate provides
//!
//! - exact ([`dp::solve_oc_dp`]) and near-linear greedy
//!   ([`greedy::solve_oc_greedy`]) single-clock solvers,
//! - a greedy multi-clock solver with node-to-clock assignment
//!   ([`multiclock::solve_koc`]),
//! - brute-force reference solvers for small instances ([`oracle`]),
//! - synthetic graph/cascade generation with hidden stretching clocks
//!   ([`simgen`]),
//! - cascade completion and temporal size-prediction features ([`apps`]).
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod apps;
pub mod cascade;
pub mod clock;
pub mod dp;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod likelihood;
pub mod multiclock;
pub mod oracle;
pub mod scoring;
pub mod simgen;

pub use cascade::{load_cascades, Activation, Cascade, CascadeSet, Time};
pub use clock::{enumerate_clocks, Clock, ClockAssignment, ClockSet, Interval};
pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use likelihood::{IcParams, NonActivationPolicy};
pub use scoring::ScoringIndex;

/// A single clock together with its improvement over `Δ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub clock: Clock,
    pub improvement: f64,
}
