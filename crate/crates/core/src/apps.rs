//! Applications of a detected clock: completing cascades with hidden
//! activations, and temporal features for cascade-size prediction.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::{Activation, Cascade, CascadeSet};
use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::simgen::cascade_rng;

/// Backward search states explored per observed activation before the
/// reconstruction gives up on it.
pub const CHAIN_SEARCH_LIMIT: usize = 50_000;

/// A cascade with some activations removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionInstance {
    pub observed: Cascade,
    pub hidden: Vec<Activation>,
    pub drop_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub feasible: bool,
    /// Nodes placed by the reconstruction that were not observed.
    pub inferred: Vec<NodeId>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Removes each activation except the first and the last independently
/// with probability `drop_rate`.
pub fn hide<R: Rng + ?Sized>(
    cascade: &Cascade,
    drop_rate: f64,
    rng: &mut R,
) -> Result<CompletionInstance> {
    if !(0.0..=1.0).contains(&drop_rate) {
        return Err(Error::InvalidParameter(format!(
            "drop rate must lie in [0, 1], got {drop_rate}"
        )));
    }
    let acts = cascade.activations();
    if acts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "cascade {} has fewer than two activations",
            cascade.id()
        )));
    }
    let last = acts.len() - 1;
    let mut kept = Vec::with_capacity(acts.len());
    let mut hidden = Vec::new();
    for (i, &a) in acts.iter().enumerate() {
        // always draw, so the pattern for one rate is independent of the data
        let drop = rng.random::<f64>() < drop_rate;
        if i == 0 || i == last || !drop {
            kept.push(a);
        } else {
            hidden.push(a);
        }
    }
    Ok(CompletionInstance {
        observed: Cascade::new(cascade.id(), kept)?,
        hidden,
        drop_rate,
    })
}

/// Reconstructs a cascade forest in which every observed activation sits at
/// graph distance from a root equal to its remapped step minus the roots'
/// step. Missing links are filled with the shortest chain of unobserved
/// nodes found by a backward search.
pub fn complete(
    g: &Graph,
    instance: &CompletionInstance,
    clock: &Clock,
) -> Result<CompletionResult> {
    let observed = instance.observed.activations();
    let mut steps = Vec::with_capacity(observed.len());
    for a in observed {
        steps.push((clock.remap_time(a.time)?, a.node));
    }
    steps.sort_unstable();
    let hidden: HashSet<NodeId> = instance.hidden.iter().map(|a| a.node).collect();
    let Some(&(root_step, _)) = steps.first() else {
        return Ok(score(true, Vec::new(), &hidden));
    };

    let observed_nodes: HashSet<NodeId> = steps.iter().map(|&(_, v)| v).collect();
    let mut depth_of: HashMap<NodeId, usize> = HashMap::new();
    let mut inferred = Vec::new();
    for &(step, v) in &steps {
        let d = step - root_step;
        if d == 0 {
            depth_of.insert(v, 0);
            continue;
        }
        match find_chain(g, v, d, &depth_of, &observed_nodes) {
            Some(chain) => {
                for (k, &x) in chain.iter().enumerate() {
                    depth_of.insert(x, d - 1 - k);
                    inferred.push(x);
                }
                depth_of.insert(v, d);
            }
            None => return Ok(score(false, inferred, &hidden)),
        }
    }
    Ok(score(true, inferred, &hidden))
}

/// Unobserved intermediates `x_1, .., x_k` (nearest to `v` first) such that
/// `p -> x_k -> .. -> x_1 -> v` for some placed `p` at depth `d - k - 1`.
fn find_chain(
    g: &Graph,
    v: NodeId,
    d: usize,
    depth_of: &HashMap<NodeId, usize>,
    observed: &HashSet<NodeId>,
) -> Option<Vec<NodeId>> {
    // states are (node, distance from v); parents index into `states`
    let mut states: Vec<(NodeId, usize, usize)> = vec![(v, 0, usize::MAX)];
    let mut seen: HashSet<(NodeId, usize)> = HashSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (x, level, _) = states[i];
        for &u in g.ins(x) {
            let k = level + 1;
            if let Some(&du) = depth_of.get(&u) {
                if du + k == d {
                    let chain = unwind(&states, i);
                    if !chain.contains(&u) {
                        return Some(chain);
                    }
                }
                continue;
            }
            // an intermediate needs depth >= 1 and must not be observed
            if k >= d || observed.contains(&u) || !seen.insert((u, k)) {
                continue;
            }
            if states.len() >= CHAIN_SEARCH_LIMIT {
                return None;
            }
            if path_contains(&states, i, u) {
                continue;
            }
            states.push((u, k, i));
            queue.push_back(states.len() - 1);
        }
    }
    None
}

fn path_contains(states: &[(NodeId, usize, usize)], mut i: usize, node: NodeId) -> bool {
    while i != usize::MAX {
        if states[i].0 == node {
            return true;
        }
        i = states[i].2;
    }
    false
}

fn unwind(states: &[(NodeId, usize, usize)], mut i: usize) -> Vec<NodeId> {
    let mut chain = Vec::new();
    while states[i].2 != usize::MAX {
        chain.push(states[i].0);
        i = states[i].2;
    }
    chain.reverse();
    chain
}

fn score(feasible: bool, inferred: Vec<NodeId>, hidden: &HashSet<NodeId>) -> CompletionResult {
    if !feasible {
        return CompletionResult {
            feasible,
            inferred,
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        };
    }
    let hits = inferred.iter().filter(|v| hidden.contains(v)).count() as f64;
    let precision = if inferred.is_empty() {
        if hidden.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        hits / inferred.len() as f64
    };
    let recall = if hidden.is_empty() {
        1.0
    } else {
        hits / hidden.len() as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    CompletionResult {
        feasible,
        inferred,
        precision,
        recall,
        f1,
    }
}

/// Averages over cascades for one drop rate. Infeasible cascades count
/// with zero precision and recall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionRow {
    pub drop_rate: f64,
    pub success: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Hides and completes every cascade with at least two activations, once
/// per drop rate. The hidden activations depend only on `seed`, the rate's
/// position and the cascade id, so different clocks see the same instances.
pub fn completion_batch(
    g: &Graph,
    cs: &CascadeSet,
    clock: &Clock,
    drop_rates: &[f64],
    seed: u64,
) -> Result<Vec<CompletionRow>> {
    let eligible: Vec<&Cascade> = cs.cascades().iter().filter(|c| c.len() >= 2).collect();
    let mut rows = Vec::with_capacity(drop_rates.len());
    for (j, &rate) in drop_rates.iter().enumerate() {
        let rate_seed = seed.wrapping_add((j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let results = eligible
            .par_iter()
            .map(|c| {
                let mut rng = cascade_rng(rate_seed, c.id());
                let instance = hide(c, rate, &mut rng)?;
                complete(g, &instance, clock)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = results.len().max(1) as f64;
        let mean = |f: fn(&CompletionResult) -> f64| results.iter().map(f).sum::<f64>() / n;
        rows.push(CompletionRow {
            drop_rate: rate,
            success: mean(|r| if r.feasible { 1.0 } else { 0.0 }),
            precision: mean(|r| r.precision),
            recall: mean(|r| r.recall),
            f1: mean(|r| r.f1),
        });
    }
    Ok(rows)
}

pub const DEFAULT_SIZE_RATIO: f64 = 1.5;

/// Temporal features of the first `m` activations of a cascade, on
/// clock-remapped times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeFeatureRow {
    pub cascade_id: u64,
    pub m: usize,
    pub time_to_mth: usize,
    pub mean_gap: f64,
    pub median_gap: f64,
    pub max_gap: usize,
    pub distinct_steps: usize,
    /// The cascade reached at least `alpha * m` activations.
    pub large: bool,
}

/// One row per cascade with at least `m` activations.
pub fn extract_size_features(
    cs: &CascadeSet,
    clock: &Clock,
    m: usize,
    alpha: f64,
) -> Result<Vec<SizeFeatureRow>> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "prefix length m must be at least 2, got {m}"
        )));
    }
    let mut rows = Vec::new();
    for c in cs.cascades().iter().filter(|c| c.len() >= m) {
        let steps = c.activations()[..m]
            .iter()
            .map(|a| clock.remap_time(a.time))
            .collect::<Result<Vec<_>>>()?;
        let mut gaps: Vec<usize> = steps.windows(2).map(|w| w[1] - w[0]).collect();
        let mean_gap = gaps.iter().sum::<usize>() as f64 / gaps.len() as f64;
        let max_gap = *gaps.iter().max().expect("m >= 2");
        gaps.sort_unstable();
        let mid = gaps.len() / 2;
        let median_gap = if gaps.len() % 2 == 1 {
            gaps[mid] as f64
        } else {
            (gaps[mid - 1] + gaps[mid]) as f64 / 2.0
        };
        let mut distinct = steps.clone();
        distinct.dedup();
        rows.push(SizeFeatureRow {
            cascade_id: c.id(),
            m,
            time_to_mth: steps[m - 1] - steps[0],
            mean_gap,
            median_gap,
            max_gap,
            distinct_steps: distinct.len(),
            large: c.len() as f64 >= alpha * m as f64,
        });
    }
    Ok(rows)
}
