//! Independent-cascade likelihood of observed cascades under a clock, and the
//! improvement of a clock over the single-interval default.
//!
//! All values are natural-log likelihoods. The functions here evaluate the
//! objective directly from the cascades; the solvers use the precomputed
//! [`ScoringIndex`](crate::scoring::ScoringIndex) instead, and the tests tie
//! the two together.

use std::collections::{HashMap, HashSet};

use crate::cascade::{Cascade, CascadeSet, Time};
use crate::clock::{Clock, Interval};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scoring::ScoringIndex;

/// Absolute tolerance used when comparing objective values.
pub const TOLERANCE: f64 = 1e-9;

/// Spontaneous (`pe`) and per-neighbor (`pn`) activation probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcParams {
    pe: f64,
    pn: f64,
}

impl IcParams {
    pub fn new(pe: f64, pn: f64) -> Result<Self> {
        for (name, value) in [("pe", pe), ("pn", pn)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1), got {value}"
                )));
            }
        }
        if pe >= pn {
            log::warn!(
                "pe ({pe}) is not smaller than pn ({pn}); network structure will matter little"
            );
        }
        Ok(Self { pe, pn })
    }

    pub fn pe(&self) -> f64 {
        self.pe
    }

    pub fn pn(&self) -> f64 {
        self.pn
    }
}

impl Default for IcParams {
    fn default() -> Self {
        Self { pe: 0.001, pn: 0.1 }
    }
}

/// Which non-activation terms enter the log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum NonActivationPolicy {
    /// Activation terms only.
    None,
    /// Non-activation terms only for inactive nodes with at least one
    /// contagious in-neighbor.
    #[default]
    ContagiousOnly,
    /// Non-activation terms for every inactive node in every interval.
    Full,
}

impl std::str::FromStr for NonActivationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "contagious_only" | "contagious-only" => Ok(Self::ContagiousOnly),
            "full" => Ok(Self::Full),
            other => Err(Error::InvalidParameter(format!("unknown policy {other:?}"))),
        }
    }
}

/// `ln(1 - (1 - pe)(1 - pn)^c)`: log-likelihood of activating with `c`
/// contagious in-neighbors.
pub fn activation_loglik(contagious: usize, p: IcParams) -> f64 {
    if contagious == 0 {
        return p.pe.ln();
    }
    let stay = (1.0 - p.pe).ln() + contagious as f64 * (1.0 - p.pn).ln();
    // ln(1 - e^x) without cancellation for x near 0
    (-stay.exp_m1()).ln()
}

/// `ln((1 - pe)(1 - pn)^c)`: log-likelihood of staying inactive.
pub fn nonactivation_loglik(contagious: usize, p: IcParams) -> f64 {
    (-p.pe).ln_1p() + contagious as f64 * (-p.pn).ln_1p()
}

/// Horizon a clock over `cs` must span.
pub(crate) fn clock_horizon(cs: &CascadeSet) -> Time {
    cs.horizon().max(1)
}

pub(crate) fn check_horizon(cs: &CascadeSet, clock: &Clock) -> Result<()> {
    if clock.horizon() != clock_horizon(cs) {
        return Err(Error::HorizonMismatch {
            clock: clock.horizon(),
            data: cs.horizon(),
        });
    }
    Ok(())
}

fn check_adjacent(cur: Interval, prev: Option<Interval>) -> Result<()> {
    match prev {
        Some(prev) if !prev.precedes(&cur) => Err(Error::NotAdjacent {
            prev_start: prev.start,
            prev_end: prev.end,
            start: cur.start,
            end: cur.end,
        }),
        _ => Ok(()),
    }
}

/// `|N(v) ∩ A(X, prev)|`, zero when there is no preceding interval.
pub fn contagious_neighbors(
    g: &Graph,
    cs: &CascadeSet,
    cascade_id: u64,
    v: NodeId,
    cur: Interval,
    prev: Option<Interval>,
) -> Result<usize> {
    check_adjacent(cur, prev)?;
    let cascade = cs.cascade(cascade_id)?;
    let ins = g.in_neighbors(v)?;
    Ok(prev.map_or(0, |prev| count_in(cascade, ins, prev)))
}

fn count_in(cascade: &Cascade, ins: &[NodeId], prev: Interval) -> usize {
    ins.iter()
        .filter(|&&u| cascade.time_of(u).is_some_and(|t| prev.contains(t)))
        .count()
}

/// `LL(𝕏 | Δ)`: log-likelihood of all cascades with their events remapped
/// onto the intervals of `clock`.
pub fn total_loglik(
    g: &Graph,
    cs: &CascadeSet,
    clock: &Clock,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<f64> {
    check_horizon(cs, clock)?;
    let n = g.node_count();
    Ok(cs
        .cascades()
        .iter()
        .map(|c| cascade_loglik(g, n, c, clock, p, policy))
        .sum())
}

fn cascade_loglik(
    g: &Graph,
    node_count: usize,
    cascade: &Cascade,
    clock: &Clock,
    p: IcParams,
    policy: NonActivationPolicy,
) -> f64 {
    let step: HashMap<NodeId, usize> = cascade
        .activations()
        .iter()
        .map(|a| (a.node, clock.step_of(a.time)))
        .collect();
    let mut total = 0.0;
    for a in cascade.activations() {
        let s = step[&a.node];
        let c = g
            .ins(a.node)
            .iter()
            .filter(|u| step.get(u) == Some(&(s - 1)))
            .count();
        total += activation_loglik(c, p);
    }
    if policy == NonActivationPolicy::None {
        return total;
    }
    // (node, step) pairs of inactive nodes with contagious in-neighbors
    let mut exposed: HashMap<(NodeId, usize), usize> = HashMap::new();
    for a in cascade.activations() {
        let s = step[&a.node];
        for &w in g.outs(a.node) {
            let inactive = step.get(&w).is_none_or(|&sw| sw > s + 1);
            if inactive {
                *exposed.entry((w, s + 1)).or_default() += 1;
            }
        }
    }
    let steps = clock.interval_count();
    for (&(_, s), &c) in &exposed {
        if s <= steps {
            total += nonactivation_loglik(c, p);
        }
    }
    if policy == NonActivationPolicy::Full {
        // remaining inactive nodes each contribute ln(1 - pe) per interval
        let mut activated_by = vec![0usize; steps + 2];
        for &s in step.values() {
            activated_by[s] += 1;
        }
        let mut exposed_at = vec![0usize; steps + 2];
        for &(_, s) in exposed.keys() {
            if s <= steps {
                exposed_at[s] += 1;
            }
        }
        let mut active = 0;
        for s in 1..=steps {
            active += activated_by[s];
            let quiet = node_count - active - exposed_at[s];
            total += quiet as f64 * nonactivation_loglik(0, p);
        }
    }
    total
}

/// `I(𝕏 | Δ) = LL(𝕏 | Δ) - LL(𝕏 | Δ_max)`.
pub fn improvement(
    g: &Graph,
    cs: &CascadeSet,
    clock: &Clock,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<f64> {
    let baseline = Clock::max(clock_horizon(cs))?;
    Ok(total_loglik(g, cs, clock, p, policy)? - total_loglik(g, cs, &baseline, p, policy)?)
}

/// Improvement contributed by node `v` of one cascade over `cur` given the
/// preceding interval `prev`:
/// activation in `cur` scores `LL - ln pe`, an already active node scores 0,
/// and a node still inactive after `cur` scores its non-activation term as
/// selected by `policy`.
#[allow(clippy::too_many_arguments)]
pub fn interval_improvement(
    g: &Graph,
    cs: &CascadeSet,
    v: NodeId,
    cascade_id: u64,
    cur: Interval,
    prev: Option<Interval>,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<f64> {
    let c = contagious_neighbors(g, cs, cascade_id, v, cur, prev)?;
    let t = cs.cascade(cascade_id)?.time_of(v);
    Ok(node_term(t, c, cur, p, policy))
}

fn node_term(
    time: Option<Time>,
    c: usize,
    cur: Interval,
    p: IcParams,
    policy: NonActivationPolicy,
) -> f64 {
    match time {
        Some(t) if t < cur.start => 0.0,
        Some(t) if t <= cur.end => activation_loglik(c, p) - p.pe.ln(),
        _ => match policy {
            NonActivationPolicy::None => 0.0,
            NonActivationPolicy::ContagiousOnly if c == 0 => 0.0,
            _ => nonactivation_loglik(c, p),
        },
    }
}

/// Sum of [`interval_improvement`] over every node of every cascade.
pub fn total_interval_improvement(
    g: &Graph,
    cs: &CascadeSet,
    cur: Interval,
    prev: Option<Interval>,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<f64> {
    check_adjacent(cur, prev)?;
    let n = g.node_count();
    let mut total = 0.0;
    for cascade in cs.cascades() {
        let mut candidates: HashSet<NodeId> =
            cascade.active_in(cur).iter().map(|a| a.node).collect();
        if let Some(prev) = prev {
            for a in cascade.active_in(prev) {
                candidates.extend(g.outs(a.node));
            }
        }
        let mut inactive_seen = 0;
        for &v in &candidates {
            let t = cascade.time_of(v);
            let c = prev.map_or(0, |prev| count_in(cascade, g.ins(v), prev));
            if t.is_none_or(|t| t > cur.end) {
                inactive_seen += 1;
            }
            total += node_term(t, c, cur, p, policy);
        }
        if policy == NonActivationPolicy::Full {
            let active = cascade
                .active_in(Interval {
                    start: 1,
                    end: cur.end,
                })
                .len();
            let quiet = n - active - inactive_seen;
            total += quiet as f64 * nonactivation_loglik(0, p);
        }
    }
    Ok(total)
}

/// Exact change in log-likelihood from adding a cut at `t` to `clock`.
pub fn delta_for_cut(
    g: &Graph,
    cs: &CascadeSet,
    clock: &Clock,
    t: Time,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<f64> {
    check_horizon(cs, clock)?;
    ScoringIndex::new(g, cs, p, policy).cut_delta(clock, t)
}
