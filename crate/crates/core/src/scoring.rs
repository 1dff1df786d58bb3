//! Precomputed view of a cascade set for fast objective evaluation.
//!
//! Every `(cascade, node)` pair that can ever contribute a term is a
//! *target*. Activated targets are numbered first, in `(time, cascade, node)`
//! order, so the activations of a time range form a contiguous id range.
//! Each activation keeps a list of *links*: the targets among its
//! out-neighbors in the same cascade that are not yet active at its time.
//! Every interval term of the objective is a function of the link counts
//! arriving from the preceding interval, which lets the solvers update
//! terms incrementally.

use std::collections::HashMap;
use std::ops::Range;

use crate::cascade::{CascadeSet, Time};
use crate::clock::{Clock, Interval};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::likelihood::{
    activation_loglik, clock_horizon, nonactivation_loglik, IcParams, NonActivationPolicy,
};

/// Time of a target that never activates.
pub(crate) const NEVER: Time = Time::MAX;

#[derive(Debug, Clone)]
pub struct ScoringIndex {
    horizon: Time,
    policy: NonActivationPolicy,
    pub(crate) target_time: Vec<Time>,
    target_node: Vec<NodeId>,
    target_cascade: Vec<u32>,
    /// Activations at tick `t` are ids `time_start[t]..time_start[t + 1]`.
    pub(crate) time_start: Vec<usize>,
    link_start: Vec<usize>,
    link_targets: Vec<u32>,
    /// `LL_act(c) - ln pe`
    act_gain: Vec<f64>,
    /// Tracked non-activation term for `c` contagious neighbors.
    nonact: Vec<f64>,
    /// Per inactive node and interval under [`NonActivationPolicy::Full`].
    quiet: f64,
    population: usize,
    prior: Option<Vec<f64>>,
}

/// Reusable per-target counters.
#[derive(Debug)]
pub(crate) struct Scratch {
    pub counts: Vec<u32>,
    pub touched: Vec<u32>,
}

impl Scratch {
    pub fn new(targets: usize) -> Self {
        Self {
            counts: vec![0; targets],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn bump(&mut self, target: u32) -> u32 {
        let c = &mut self.counts[target as usize];
        if *c == 0 {
            self.touched.push(target);
        }
        *c += 1;
        *c
    }

    pub fn clear(&mut self) {
        for &t in &self.touched {
            self.counts[t as usize] = 0;
        }
        self.touched.clear();
    }
}

impl ScoringIndex {
    pub fn new(g: &Graph, cs: &CascadeSet, p: IcParams, policy: NonActivationPolicy) -> Self {
        let horizon = clock_horizon(cs);
        let mut order: Vec<(Time, u32, NodeId)> = cs
            .cascades()
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| {
                c.activations()
                    .iter()
                    .map(move |a| (a.time, ci as u32, a.node))
            })
            .collect();
        order.sort_unstable();
        let activation_count = order.len();

        let mut target_time: Vec<Time> = order.iter().map(|o| o.0).collect();
        let mut target_cascade: Vec<u32> = order.iter().map(|o| o.1).collect();
        let mut target_node: Vec<NodeId> = order.iter().map(|o| o.2).collect();
        let mut lookup: HashMap<(u32, NodeId), u32> = order
            .iter()
            .enumerate()
            .map(|(i, o)| ((o.1, o.2), i as u32))
            .collect();

        let mut time_start = vec![0usize; horizon as usize + 2];
        for &(t, _, _) in &order {
            time_start[t as usize + 1] += 1;
        }
        for t in 1..time_start.len() {
            time_start[t] += time_start[t - 1];
        }

        let mut link_start = Vec::with_capacity(activation_count + 1);
        let mut link_targets = Vec::new();
        link_start.push(0);
        for &(t, ci, u) in &order {
            for &w in g.outs(u) {
                let id = *lookup.entry((ci, w)).or_insert_with(|| {
                    target_time.push(NEVER);
                    target_cascade.push(ci);
                    target_node.push(w);
                    (target_time.len() - 1) as u32
                });
                if target_time[id as usize] > t {
                    link_targets.push(id);
                }
            }
            link_start.push(link_targets.len());
        }

        let max_c = g.max_in_degree() + 1;
        let ln_pe = p.pe().ln();
        let act_gain = (0..=max_c)
            .map(|c| activation_loglik(c, p) - ln_pe)
            .collect();
        let nonact = (0..=max_c)
            .map(|c| match policy {
                NonActivationPolicy::None => 0.0,
                NonActivationPolicy::ContagiousOnly if c == 0 => 0.0,
                NonActivationPolicy::ContagiousOnly => nonactivation_loglik(c, p),
                NonActivationPolicy::Full => c as f64 * (-p.pn()).ln_1p(),
            })
            .collect();
        let quiet = match policy {
            NonActivationPolicy::Full => nonactivation_loglik(0, p),
            _ => 0.0,
        };

        Self {
            horizon,
            policy,
            target_time,
            target_node,
            target_cascade,
            time_start,
            link_start,
            link_targets,
            act_gain,
            nonact,
            quiet,
            population: cs.len() * g.node_count(),
            prior: None,
        }
    }

    /// Conditions activation gains on per-activation prior improvements:
    /// each activated target scores `max(0, gain - prior)`. `prior` is
    /// indexed like [`ScoringIndex::activation_node`].
    pub fn with_prior(mut self, prior: Vec<f64>) -> Result<Self> {
        if prior.len() != self.activation_count() {
            return Err(Error::InvalidParameter(format!(
                "prior has {} entries for {} activations",
                prior.len(),
                self.activation_count()
            )));
        }
        if prior.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::InvalidParameter("prior values must be >= 0".into()));
        }
        self.prior = Some(prior);
        Ok(self)
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn policy(&self) -> NonActivationPolicy {
        self.policy
    }

    pub fn activation_count(&self) -> usize {
        self.link_start.len() - 1
    }

    pub fn target_count(&self) -> usize {
        self.target_time.len()
    }

    /// Node of the `i`-th activation in `(time, cascade, node)` order.
    pub fn activation_node(&self, i: usize) -> NodeId {
        self.target_node[i]
    }

    /// Position (in `cs.cascades()`) of the cascade of the `i`-th activation.
    pub fn activation_cascade(&self, i: usize) -> usize {
        self.target_cascade[i] as usize
    }

    pub fn activation_time(&self, i: usize) -> Time {
        self.target_time[i]
    }

    #[inline]
    pub(crate) fn links(&self, activation: usize) -> &[u32] {
        &self.link_targets[self.link_start[activation]..self.link_start[activation + 1]]
    }

    /// Activation ids with time in `[start, end]`.
    #[inline]
    pub(crate) fn acts_in(&self, start: Time, end: Time) -> Range<usize> {
        self.time_start[start as usize]..self.time_start[end as usize + 1]
    }

    /// Activation gain of `target` with `c` contagious in-neighbors.
    #[inline]
    pub(crate) fn gain(&self, target: u32, c: u32) -> f64 {
        let raw = self.act_gain[c as usize];
        match &self.prior {
            Some(prior) => (raw - prior[target as usize]).max(0.0),
            None => raw,
        }
    }

    /// Unconditioned activation gain for `c` contagious in-neighbors.
    pub fn raw_gain(&self, c: usize) -> f64 {
        self.act_gain[c]
    }

    #[inline]
    pub(crate) fn nonact(&self, c: u32) -> f64 {
        self.nonact[c as usize]
    }

    /// Term of `target` when `c` links reach it and the interval ends at `end`.
    #[inline]
    pub(crate) fn term(&self, target: u32, c: u32, end: Time) -> f64 {
        if self.target_time[target as usize] <= end {
            self.gain(target, c)
        } else {
            self.nonact(c)
        }
    }

    /// Non-activation mass of nodes with no contagious neighbor, for an
    /// interval ending at `end`. Zero unless the policy is `Full`.
    #[inline]
    pub(crate) fn quiet_term(&self, end: Time) -> f64 {
        if self.quiet == 0.0 {
            return 0.0;
        }
        let active = self.time_start[end as usize + 1];
        (self.population - active) as f64 * self.quiet
    }

    /// Objective contribution of interval `cur` preceded by `prev`.
    pub(crate) fn pair_term_with(
        &self,
        cur: Interval,
        prev: Option<Interval>,
        scratch: &mut Scratch,
    ) -> f64 {
        let mut total = self.quiet_term(cur.end);
        let Some(prev) = prev else {
            return total;
        };
        for a in self.acts_in(prev.start, prev.end) {
            for &v in self.links(a) {
                if self.target_time[v as usize] >= cur.start {
                    scratch.bump(v);
                }
            }
        }
        for &v in &scratch.touched {
            total += self.term(v, scratch.counts[v as usize], cur.end);
        }
        scratch.clear();
        total
    }

    /// Improvement contributed by `cur` given `prev`; equals
    /// [`total_interval_improvement`](crate::likelihood::total_interval_improvement)
    /// when no prior is set.
    pub fn pair_term(&self, cur: Interval, prev: Option<Interval>) -> f64 {
        self.pair_term_with(cur, prev, &mut Scratch::new(self.target_count()))
    }

    /// Constant subtracted from the interval-term sum to measure improvement
    /// against `Δ_max`.
    pub(crate) fn baseline(&self) -> f64 {
        self.quiet_term(self.horizon)
    }

    /// `I(𝕏 | Δ)` in one pass over the activations.
    pub fn clock_improvement(&self, clock: &Clock) -> Result<f64> {
        self.check_clock(clock)?;
        let mut scratch = Scratch::new(self.target_count());
        let intervals = clock.intervals();
        let mut total = 0.0;
        let mut prev = None;
        for &cur in &intervals {
            total += self.pair_term_with(cur, prev, &mut scratch);
            prev = Some(cur);
        }
        Ok(total - self.baseline())
    }

    fn check_clock(&self, clock: &Clock) -> Result<()> {
        if clock.horizon() != self.horizon {
            return Err(Error::HorizonMismatch {
                clock: clock.horizon(),
                data: self.horizon,
            });
        }
        Ok(())
    }

    /// Exact change in the objective from adding a cut at `t`. Only the split
    /// interval and its successor change their terms.
    pub fn cut_delta(&self, clock: &Clock, t: Time) -> Result<f64> {
        self.check_clock(clock)?;
        if clock.is_cut(t) {
            return Err(Error::AlreadyBoundary(t));
        }
        if t < 2 || t > self.horizon {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon,
            });
        }
        let step = clock.step_of(t);
        let split = clock.interval(step);
        let prev = (step > 1).then(|| clock.interval(step - 1));
        let next = (step < clock.interval_count()).then(|| clock.interval(step + 1));
        let left = Interval {
            start: split.start,
            end: t - 1,
        };
        let right = Interval {
            start: t,
            end: split.end,
        };
        let mut scratch = Scratch::new(self.target_count());
        let mut pair = |cur, prev| self.pair_term_with(cur, prev, &mut scratch);
        let mut before = pair(split, prev);
        let mut after = pair(left, prev) + pair(right, Some(left));
        if let Some(next) = next {
            before += pair(next, Some(split));
            after += pair(next, Some(right));
        }
        Ok(after - before)
    }

    /// Unconditioned activation gain of every activation under `clock`,
    /// indexed like [`ScoringIndex::activation_node`].
    pub fn activation_gains(&self, clock: &Clock) -> Result<Vec<f64>> {
        self.check_clock(clock)?;
        let n = self.activation_count();
        let step: Vec<usize> = (0..n).map(|i| clock.step_of(self.target_time[i])).collect();
        let mut counts = vec![0u32; n];
        for a in 0..n {
            for &v in self.links(a) {
                let v = v as usize;
                if v < n && step[v] == step[a] + 1 {
                    counts[v] += 1;
                }
            }
        }
        Ok(counts.iter().map(|&c| self.act_gain[c as usize]).collect())
    }
}
