//! Multiple clocks: each node follows the clock under which its own
//! activations are best explained. Clocks are added greedily, each round
//! solving a single-clock problem conditioned on the node scores reached
//! so far.
//!
//! A node's score under a clock is the summed activation gain
//! `LL_act(c) - ln pe` of its activations across all cascades, with every
//! event remapped by that clock. Non-activation terms are not attributed to
//! any node, so the single-clock solves run without them.

use crate::cascade::CascadeSet;
use crate::clock::{Clock, ClockAssignment, ClockSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::likelihood::{IcParams, NonActivationPolicy};
use crate::scoring::ScoringIndex;
use crate::{dp, greedy};

/// A round whose marginal gain falls below this ends the greedy early.
pub const MIN_ROUND_GAIN: f64 = 1e-9;

/// Single-clock solver used inside each greedy round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Exact DP; the overall greedy keeps the `(1 - 1/e)` guarantee.
    Dp,
    /// Greedy sweep solver; much faster, no guarantee.
    Greedy,
}

impl std::str::FromStr for InnerSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Self::Dp),
            "greedy" => Ok(Self::Greedy),
            other => Err(Error::InvalidParameter(format!(
                "unknown inner solver {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiClockSolution {
    pub clocks: ClockSet,
    pub assignment: ClockAssignment,
    /// Marginal improvement added by each clock, in selection order.
    pub per_clock_gain: Vec<f64>,
    pub total: f64,
}

/// Per-node scores of clocks over one dataset.
#[derive(Debug, Clone)]
pub struct NodeScorer {
    index: ScoringIndex,
    node_count: usize,
}

impl NodeScorer {
    pub fn new(g: &Graph, cs: &CascadeSet, p: IcParams) -> Self {
        Self {
            index: ScoringIndex::new(g, cs, p, NonActivationPolicy::None),
            node_count: g.node_count(),
        }
    }

    pub fn index(&self) -> &ScoringIndex {
        &self.index
    }

    /// Score of every node under `clock`.
    pub fn node_scores(&self, clock: &Clock) -> Result<Vec<f64>> {
        let gains = self.index.activation_gains(clock)?;
        Ok(self.fold_by_node(&gains))
    }

    fn fold_by_node(&self, gains: &[f64]) -> Vec<f64> {
        let mut scores = vec![0.0; self.node_count];
        for (i, &gain) in gains.iter().enumerate() {
            scores[self.index.activation_node(i) as usize] += gain;
        }
        scores
    }

    /// `Σ_v max_j score_j(v)` over precomputed score vectors.
    pub fn combine(&self, per_clock: &[Vec<f64>]) -> f64 {
        (0..self.node_count)
            .map(|v| {
                per_clock
                    .iter()
                    .map(|s| s[v])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    }

    pub fn multi_improvement(&self, clocks: &[Clock]) -> Result<f64> {
        if clocks.is_empty() {
            return Err(Error::InvalidParameter("clock set is empty".into()));
        }
        let scores = clocks
            .iter()
            .map(|c| self.node_scores(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.combine(&scores))
    }
}

/// Improvement of a clock set: every node counts under its best clock.
pub fn multi_improvement(g: &Graph, cs: &CascadeSet, clocks: &[Clock], p: IcParams) -> Result<f64> {
    NodeScorer::new(g, cs, p).multi_improvement(clocks)
}

/// Index of each node's best clock, lowest index on ties.
pub fn assign_nodes(
    g: &Graph,
    cs: &CascadeSet,
    clocks: &[Clock],
    p: IcParams,
) -> Result<ClockAssignment> {
    if clocks.is_empty() {
        return Err(Error::InvalidParameter("clock set is empty".into()));
    }
    let scorer = NodeScorer::new(g, cs, p);
    let scores = clocks
        .iter()
        .map(|c| scorer.node_scores(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax_assignment(&scores, g.node_count()))
}

pub(crate) fn argmax_assignment(per_clock: &[Vec<f64>], node_count: usize) -> ClockAssignment {
    ClockAssignment(
        (0..node_count)
            .map(|v| {
                let mut best = 0;
                for (j, s) in per_clock.iter().enumerate().skip(1) {
                    if s[v] > per_clock[best][v] {
                        best = j;
                    }
                }
                best
            })
            .collect(),
    )
}

/// Greedily selects up to `k` clocks.
pub fn solve_koc(
    g: &Graph,
    cs: &CascadeSet,
    k: usize,
    p: IcParams,
    inner: InnerSolver,
) -> Result<MultiClockSolution> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let scorer = NodeScorer::new(g, cs, p);
    let n = scorer.index.activation_count();
    let mut clocks: Vec<Clock> = Vec::new();
    let mut gains: Vec<Vec<f64>> = Vec::new();
    let mut node_scores: Vec<Vec<f64>> = Vec::new();
    let mut per_clock_gain = Vec::new();
    let mut total = 0.0;
    while clocks.len() < k {
        // prior: each activation's gain under its node's current clock
        let mut index = scorer.index.clone();
        if !clocks.is_empty() {
            let assignment = argmax_assignment(&node_scores, g.node_count());
            let prior: Vec<f64> = (0..n)
                .map(|i| gains[assignment.clock_of(index.activation_node(i))][i])
                .collect();
            index = index.with_prior(prior)?;
        }
        let candidate = match inner {
            InnerSolver::Dp => dp::solve_indexed(&index)?.0.clock,
            InnerSolver::Greedy => greedy::solve_indexed(&index)?.clock,
        };
        let candidate_gains = scorer.index.activation_gains(&candidate)?;
        let candidate_scores = scorer.fold_by_node(&candidate_gains);
        node_scores.push(candidate_scores);
        let value = scorer.combine(&node_scores);
        let gain = value - total;
        if clocks.is_empty() || gain >= MIN_ROUND_GAIN {
            clocks.push(candidate);
            gains.push(candidate_gains);
            per_clock_gain.push(if clocks.len() == 1 { value } else { gain });
            total = value;
        } else {
            node_scores.pop();
            break;
        }
        if clocks.len() == 1 && total < MIN_ROUND_GAIN {
            break;
        }
    }
    let assignment = argmax_assignment(&node_scores, g.node_count());
    Ok(MultiClockSolution {
        clocks,
        assignment,
        per_clock_gain,
        total,
    })
}
