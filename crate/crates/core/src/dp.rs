//! Exact single-clock solver: dynamic programming over all `O(T²)`
//! intervals, with the best predecessor recorded for backtracking.

use std::collections::HashMap;

use crate::cascade::{CascadeSet, Time};
use crate::clock::{Clock, Interval};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::likelihood::{IcParams, NonActivationPolicy};
use crate::scoring::{ScoringIndex, Scratch, NEVER};
use crate::Solution;

/// Timelines longer than this are refused; use the greedy solver instead.
pub const DP_HORIZON_LIMIT: Time = 2000;

/// Prior improvement per `(cascade id, node)` activation, used to condition
/// a solve on clocks already selected.
pub type ActivationPrior = HashMap<(u64, NodeId), f64>;

/// `best(s, e)`: the best objective of a clock over `[1, e]` whose last
/// interval is `[s, e]`; `back(s, e)`: start of the preceding interval.
#[derive(Debug, Clone)]
pub struct DpTable {
    horizon: Time,
    best: Vec<f64>,
    back: Vec<Time>,
}

impl DpTable {
    fn new(horizon: Time) -> Self {
        let n = (horizon as usize + 1) * (horizon as usize + 1);
        Self {
            horizon,
            best: vec![f64::NEG_INFINITY; n],
            back: vec![0; n],
        }
    }

    #[inline]
    fn at(&self, start: Time, end: Time) -> usize {
        start as usize * (self.horizon as usize + 1) + end as usize
    }

    /// Best objective (sum of interval terms, before subtracting the
    /// `Δ_max` baseline) over clocks ending with `interval`.
    pub fn best(&self, interval: Interval) -> f64 {
        self.best[self.at(interval.start, interval.end)]
    }

    /// Predecessor of `interval` on its best path, `None` for first intervals.
    pub fn back(&self, interval: Interval) -> Option<Interval> {
        let b = self.back[self.at(interval.start, interval.end)];
        (b != 0).then(|| Interval {
            start: b,
            end: interval.start - 1,
        })
    }
}

/// Solves the single-clock problem exactly.
pub fn solve_oc_dp(
    g: &Graph,
    cs: &CascadeSet,
    p: IcParams,
    policy: NonActivationPolicy,
    prior: Option<&ActivationPrior>,
) -> Result<Solution> {
    let mut index = ScoringIndex::new(g, cs, p, policy);
    if let Some(prior) = prior {
        let prior = prior_in_index_order(&index, cs, prior);
        index = index.with_prior(prior)?;
    }
    Ok(solve_indexed(&index)?.0)
}

pub(crate) fn prior_in_index_order(
    index: &ScoringIndex,
    cs: &CascadeSet,
    prior: &ActivationPrior,
) -> Vec<f64> {
    (0..index.activation_count())
        .map(|i| {
            let id = cs.cascades()[index.activation_cascade(i)].id();
            prior
                .get(&(id, index.activation_node(i)))
                .copied()
                .unwrap_or(0.0)
        })
        .collect()
}

/// Runs the DP on a prepared index, returning the table for inspection.
pub fn solve_indexed(index: &ScoringIndex) -> Result<(Solution, DpTable)> {
    let horizon = index.horizon();
    if horizon > DP_HORIZON_LIMIT {
        return Err(Error::TooLarge {
            what: "the exact solver (use the greedy solver)",
            horizon,
            limit: DP_HORIZON_LIMIT,
        });
    }
    let mut table = DpTable::new(horizon);
    for e in 1..=horizon {
        let at = table.at(1, e);
        table.best[at] = index.quiet_term(e);
    }

    let mut scratch = Scratch::new(index.target_count());
    let mut delta = vec![0.0f64; horizon as usize + 2];
    for s in 2..=horizon {
        delta.iter_mut().for_each(|d| *d = 0.0);
        // With the preceding interval [b, s-1] fixed, the term of [s, e] is
        //   base + Σ_{τ = s..=e} delta[τ] + quiet(e)
        // where `base` sums non-activation terms of every target reached
        // and `delta[τ]` switches targets activating at τ to their gains.
        let mut base = 0.0;
        for b in (1..s).rev() {
            for a in index.acts_in(b, b) {
                for &v in index.links(a) {
                    let tv = index.target_time[v as usize];
                    if tv < s {
                        continue;
                    }
                    let c_new = scratch.bump(v);
                    let c_old = c_new - 1;
                    let (h_old, h_new) = (index.nonact(c_old), index.nonact(c_new));
                    base += h_new - h_old;
                    if tv != NEVER {
                        let g_old = index.gain(v, c_old);
                        let g_new = index.gain(v, c_new);
                        delta[tv as usize] += (g_new - h_new) - (g_old - h_old);
                    }
                }
            }
            let prefix = table.best[table.at(b, s - 1)];
            let mut run = base;
            for e in s..=horizon {
                run += delta[e as usize];
                let candidate = prefix + run + index.quiet_term(e);
                let at = table.at(s, e);
                // b descends, so `>=` keeps the longest predecessor on ties
                if candidate >= table.best[at] {
                    table.best[at] = candidate;
                    table.back[at] = b;
                }
            }
        }
        scratch.clear();
    }

    let mut last_start = 1;
    for s in 2..=horizon {
        if table.best[table.at(s, horizon)] > table.best[table.at(last_start, horizon)] {
            last_start = s;
        }
    }
    let objective = table.best[table.at(last_start, horizon)];
    let mut cuts = Vec::new();
    let mut cur = Interval {
        start: last_start,
        end: horizon,
    };
    while let Some(prev) = table.back(cur) {
        cuts.push(cur.start);
        cur = prev;
    }
    let clock = Clock::from_cuts(horizon, cuts)?;
    let solution = Solution {
        clock,
        improvement: objective - index.baseline(),
    };
    Ok((solution, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::load_cascades;
    use crate::likelihood::improvement;

    fn chain() -> (Graph, CascadeSet) {
        let g = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 2), (0, 2, 3)], &g).unwrap();
        (g, cs)
    }

    #[test]
    fn chain_is_split_everywhere() {
        let (g, cs) = chain();
        let sol = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::ContagiousOnly,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::min(3).unwrap());
        assert!((sol.improvement - 9.228260).abs() < 1e-6);
    }

    #[test]
    fn single_activation_keeps_default_clock() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let cs = load_cascades(&[(0, 0, 4)], &g).unwrap();
        let sol = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::Full,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::max(1).unwrap());
        assert_eq!(sol.improvement, 0.0);
    }

    #[test]
    fn simultaneous_activations_cannot_split() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 1)], &g).unwrap();
        let sol = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::ContagiousOnly,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::max(1).unwrap());
        assert_eq!(sol.improvement, 0.0);
    }

    #[test]
    fn empty_set_returns_default_clock() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let cs = load_cascades(&[], &g).unwrap();
        let sol = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::None,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::max(1).unwrap());
        assert_eq!(sol.improvement, 0.0);
    }

    #[test]
    fn ties_prefer_coarser_clocks() {
        // no activation has an earlier in-neighbor: every clock scores 0
        let g = Graph::from_edges(&[(0, 1), (3, 2)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 2, 2), (0, 3, 5)], &g).unwrap();
        let sol = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::None,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::max(5).unwrap());
    }

    #[test]
    fn table_prefixes_match_interval_sums() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (0, 2), (3, 4)]).unwrap();
        let cs = load_cascades(
            &[
                (0, 0, 1),
                (0, 1, 2),
                (0, 2, 3),
                (0, 3, 5),
                (0, 4, 6),
                (1, 2, 1),
                (1, 3, 4),
            ],
            &g,
        )
        .unwrap();
        let p = IcParams::default();
        let index = ScoringIndex::new(&g, &cs, p, NonActivationPolicy::ContagiousOnly);
        let (sol, table) = solve_indexed(&index).unwrap();
        let mut prefix = 0.0;
        let mut prev = None;
        for cur in sol.clock.intervals() {
            prefix += index.pair_term(cur, prev);
            assert!((table.best(cur) - prefix).abs() < 1e-9);
            prev = Some(cur);
        }
        let direct =
            improvement(&g, &cs, &sol.clock, p, NonActivationPolicy::ContagiousOnly).unwrap();
        assert!((direct - sol.improvement).abs() < 1e-9);
    }

    #[test]
    fn horizon_guard() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 2500)], &g).unwrap();
        let err = solve_oc_dp(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::None,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
        // compression brings it back in range
        let sol = solve_oc_dp(
            &g,
            &cs.compress_timeline(),
            IcParams::default(),
            NonActivationPolicy::None,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock.cuts(), &[2]);
    }

    #[test]
    fn empty_prior_matches_unconditioned() {
        let (g, cs) = chain();
        let p = IcParams::default();
        let plain = solve_oc_dp(&g, &cs, p, NonActivationPolicy::None, None).unwrap();
        let conditioned = solve_oc_dp(
            &g,
            &cs,
            p,
            NonActivationPolicy::None,
            Some(&ActivationPrior::new()),
        )
        .unwrap();
        assert_eq!(plain, conditioned);
    }
}
