//! Brute-force reference solvers. They enumerate every clock (or every
//! k-subset of clocks) and score each with the direct likelihood evaluator,
//! sharing no code path with the DP or greedy solvers.

use std::collections::HashMap;

use crate::cascade::{CascadeSet, Time};
use crate::clock::{combinations, enumerate_clocks, Clock};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::likelihood::{
    activation_loglik, clock_horizon, total_loglik, IcParams, NonActivationPolicy,
};
use crate::multiclock::{argmax_assignment, MultiClockSolution};
use crate::Solution;

pub const ORACLE_KOC_HORIZON_LIMIT: Time = 8;
pub const ORACLE_KOC_K_LIMIT: usize = 3;

/// Globally optimal single clock. Ties go to fewer cuts, then to the
/// lexicographically smallest cut set.
pub fn oracle_oc(
    g: &Graph,
    cs: &CascadeSet,
    p: IcParams,
    policy: NonActivationPolicy,
) -> Result<Solution> {
    let horizon = clock_horizon(cs);
    let baseline = total_loglik(g, cs, &Clock::max(horizon)?, p, policy)?;
    let mut best: Option<Solution> = None;
    for clock in enumerate_clocks(horizon)? {
        let improvement = total_loglik(g, cs, &clock, p, policy)? - baseline;
        if best.as_ref().is_none_or(|b| improvement > b.improvement) {
            best = Some(Solution { clock, improvement });
        }
    }
    Ok(best.expect("at least one clock exists"))
}

/// Per-node activation score under `clock`, computed from scratch.
pub fn node_scores_direct(g: &Graph, cs: &CascadeSet, clock: &Clock, p: IcParams) -> Vec<f64> {
    let mut scores = vec![0.0; g.node_count()];
    let ln_pe = p.pe().ln();
    for cascade in cs.cascades() {
        let step: HashMap<NodeId, usize> = cascade
            .activations()
            .iter()
            .map(|a| (a.node, clock.remap_time(a.time).expect("time within clock")))
            .collect();
        for a in cascade.activations() {
            let s = step[&a.node];
            let c = g
                .ins(a.node)
                .iter()
                .filter(|u| step.get(u).is_some_and(|&su| su + 1 == s))
                .count();
            scores[a.node as usize] += activation_loglik(c, p) - ln_pe;
        }
    }
    scores
}

/// Optimal set of at most `k` clocks by exhaustive search.
pub fn oracle_koc(g: &Graph, cs: &CascadeSet, k: usize, p: IcParams) -> Result<MultiClockSolution> {
    let horizon = clock_horizon(cs);
    if horizon > ORACLE_KOC_HORIZON_LIMIT {
        return Err(Error::TooLarge {
            what: "the multi-clock oracle",
            horizon,
            limit: ORACLE_KOC_HORIZON_LIMIT,
        });
    }
    if k < 1 || k > ORACLE_KOC_K_LIMIT.max(1usize << (horizon - 1)) {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside the oracle's range"
        )));
    }
    let clocks: Vec<Clock> = enumerate_clocks(horizon)?.collect();
    let scores: Vec<Vec<f64>> = clocks
        .iter()
        .map(|c| node_scores_direct(g, cs, c, p))
        .collect();
    let n = g.node_count();
    let value = |subset: &[usize]| -> f64 {
        (0..n)
            .map(|v| {
                subset
                    .iter()
                    .map(|&j| scores[j][v])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    };
    // Adding clocks never lowers the value, so only full-size subsets matter.
    let size = k.min(clocks.len());
    if size > ORACLE_KOC_K_LIMIT {
        // full menu: every node takes its individually best clock
        let all: Vec<usize> = (0..clocks.len()).collect();
        return Ok(build_solution(&clocks, &scores, &all, n, value(&all)));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in combinations(clocks.len(), size) {
        let v = value(&subset);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((subset, v));
        }
    }
    let (subset, total) = best.expect("non-empty enumeration");
    Ok(build_solution(&clocks, &scores, &subset, n, total))
}

fn build_solution(
    clocks: &[Clock],
    scores: &[Vec<f64>],
    subset: &[usize],
    node_count: usize,
    total: f64,
) -> MultiClockSolution {
    let chosen: Vec<Vec<f64>> = subset.iter().map(|&j| scores[j].clone()).collect();
    let mut per_clock_gain = Vec::with_capacity(subset.len());
    let mut running = vec![f64::NEG_INFINITY; node_count];
    let mut prev_total = 0.0;
    for s in &chosen {
        for v in 0..node_count {
            running[v] = running[v].max(s[v]);
        }
        let t: f64 = running.iter().sum();
        per_clock_gain.push(t - prev_total);
        prev_total = t;
    }
    MultiClockSolution {
        clocks: subset.iter().map(|&j| clocks[j].clone()).collect(),
        assignment: argmax_assignment(&chosen, node_count),
        per_clock_gain,
        total,
    }
}
