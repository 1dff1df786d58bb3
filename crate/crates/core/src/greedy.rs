//! Greedy single-clock solver.
//!
//! Starting from `Δ_max`, each sweep walks the activation times in order,
//! scores a cut before every activation time against the current clock, and
//! keeps a set of positively scoring cuts that share no active edge. The
//! accepted cuts are applied together and the sweep repeats until no cut
//! improves the objective. By default a stalled run then moves every
//! existing cut to the best position between its neighbors (or drops it)
//! and resumes adding; [`GreedyOptions::insertion_only`] turns that off.

use crate::cascade::{Activation, CascadeSet, Time};
use crate::clock::{Clock, Interval};
use crate::dp::{prior_in_index_order, ActivationPrior};
use crate::error::Result;
use crate::graph::Graph;
use crate::likelihood::{clock_horizon, IcParams, NonActivationPolicy};
use crate::scoring::{ScoringIndex, Scratch};
use crate::Solution;

/// Cuts scoring at or below this are not considered improvements.
pub const MIN_CUT_GAIN: f64 = 1e-10;

/// A `(graph edge, cascade)` pair whose source activates strictly before
/// its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveEdge {
    pub cascade_id: u64,
    pub source: Activation,
    pub target: Activation,
}

impl ActiveEdge {
    /// A cut at `b` spans this edge when `source.time < b <= target.time`.
    pub fn spans(&self, position: Time) -> bool {
        self.source.time < position && position <= self.target.time
    }

    /// Number of cuts of `clock` spanning the edge. The edge explains the
    /// target's activation exactly when this is 1.
    pub fn cut_count(&self, clock: &Clock) -> usize {
        clock.cuts().iter().filter(|&&b| self.spans(b)).count()
    }
}

pub fn build_active_edges(g: &Graph, cs: &CascadeSet) -> Vec<ActiveEdge> {
    let mut edges = Vec::new();
    for cascade in cs.cascades() {
        for &target in cascade.activations() {
            for &u in g.ins(target.node) {
                if let Some(t) = cascade.time_of(u) {
                    if t < target.time {
                        edges.push(ActiveEdge {
                            cascade_id: cascade.id(),
                            source: Activation { node: u, time: t },
                            target,
                        });
                    }
                }
            }
        }
    }
    edges
}

/// A scored cut position. `reach` is the latest target time among active
/// edges whose source precedes `position`; two cuts `a < b` share an active
/// edge exactly when `a.reach >= b.position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutCandidate {
    pub position: Time,
    pub score: f64,
    pub reach: Time,
}

impl CutCandidate {
    pub fn conflicts_with(&self, other: &CutCandidate) -> bool {
        let (lo, hi) = if self.position <= other.position {
            (self, other)
        } else {
            (other, self)
        };
        lo.position == hi.position || lo.reach >= hi.position
    }
}

/// Set of mutually independent cuts, sorted by position.
#[derive(Debug, Clone, Default)]
pub struct CutSet {
    cuts: Vec<CutCandidate>,
}

impl CutSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cuts(&self) -> &[CutCandidate] {
        &self.cuts
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn total_score(&self) -> f64 {
        self.cuts.iter().map(|c| c.score).sum()
    }

    /// Adds `candidate` if it conflicts with no member, or if its score
    /// beats the combined score of every member it conflicts with (which
    /// are then dropped). Returns whether it was added.
    pub fn add_or_drop(&mut self, candidate: CutCandidate) -> bool {
        let conflicting: f64 = self
            .cuts
            .iter()
            .filter(|c| c.conflicts_with(&candidate))
            .map(|c| c.score)
            .sum();
        let any = self.cuts.iter().any(|c| c.conflicts_with(&candidate));
        if any && candidate.score <= conflicting {
            return false;
        }
        self.cuts.retain(|c| !c.conflicts_with(&candidate));
        let at = self
            .cuts
            .partition_point(|c| c.position < candidate.position);
        self.cuts.insert(at, candidate);
        debug_assert!(self.cuts.windows(2).all(|w| !w[0].conflicts_with(&w[1])));
        true
    }
}

/// `reach[t]` for every position `t` in `0..=horizon + 1`.
fn reach_table(index: &ScoringIndex) -> Vec<Time> {
    let horizon = index.horizon();
    let n = index.activation_count();
    let mut latest = vec![0 as Time; horizon as usize + 2];
    for a in 0..n {
        let t = index.activation_time(a) as usize;
        for &v in index.links(a) {
            if (v as usize) < n {
                latest[t] = latest[t].max(index.target_time[v as usize]);
            }
        }
    }
    // reach[t] = max over source times < t
    let mut reach = vec![0 as Time; horizon as usize + 2];
    for t in 1..reach.len() {
        reach[t] = reach[t - 1].max(latest[t - 1]);
    }
    reach
}

/// Exact objective change for a cut before every activation time that is
/// not already a cut, computed in one pass per interval against `clock`.
pub fn sweep_scores(index: &ScoringIndex, clock: &Clock) -> Vec<(Time, f64)> {
    let mut out = Vec::new();
    let mut pi = Scratch::new(index.target_count());
    let mut left = Scratch::new(index.target_count());
    let mut right = Scratch::new(index.target_count());
    let intervals = clock.intervals();
    for (k, &split) in intervals.iter().enumerate() {
        let prev = k.checked_sub(1).map(|j| intervals[j]);
        let next = intervals.get(k + 1).copied();
        score_interval(
            index,
            split,
            prev,
            next,
            &mut out,
            [&mut pi, &mut left, &mut right],
        );
    }
    out
}

fn score_interval(
    index: &ScoringIndex,
    split: Interval,
    prev: Option<Interval>,
    next: Option<Interval>,
    out: &mut Vec<(Time, f64)>,
    [pi, left, right]: [&mut Scratch; 3],
) {
    let acts = index.acts_in(split.start + 1, split.end);
    if acts.is_empty() {
        return;
    }
    let (a, b) = (split.start, split.end);
    let mut before = index.pair_term_with(split, prev, pi);
    if let Some(next) = next {
        before += index.pair_term_with(next, Some(split), pi);
    }

    // [a, t-1] after `prev`: counts from prev, targets at or after a
    let mut sum_a = 0.0;
    if let Some(prev) = prev {
        for act in index.acts_in(prev.start, prev.end) {
            for &v in index.links(act) {
                if index.target_time[v as usize] >= a {
                    pi.bump(v);
                }
            }
        }
        for &v in &pi.touched {
            sum_a += index.nonact(pi.counts[v as usize]);
        }
    }

    // [next] after [t, b]: counts from [a, b], targets after b
    let mut sum_c = 0.0;
    let next_end = next.map(|n| n.end);
    if let Some(end) = next_end {
        for act in index.acts_in(a, b) {
            for &v in index.links(act) {
                if index.target_time[v as usize] > b {
                    right.bump(v);
                }
            }
        }
        for &v in &right.touched {
            sum_c += index.term(v, right.counts[v as usize], end);
        }
    }

    // [t, b] after [a, t-1]
    let mut sum_b = 0.0;
    let quiet_b = index.quiet_term(b);
    let quiet_next = next_end.map_or(0.0, |e| index.quiet_term(e));

    let mut tau = a;
    while tau < b {
        let here = index.acts_in(tau, tau);
        if !here.is_empty() {
            for act in here.clone() {
                let v = act as u32;
                let c = pi.counts[act];
                if c > 0 {
                    sum_a += index.gain(v, c) - index.nonact(c);
                }
                let c = left.counts[act];
                if c > 0 {
                    sum_b -= index.gain(v, c);
                }
            }
            for act in here {
                for &v in index.links(act) {
                    let tv = index.target_time[v as usize];
                    let c_old = left.counts[v as usize];
                    let c_new = left.bump(v);
                    sum_b += index.term(v, c_new, b) - index.term(v, c_old, b);
                    if let Some(end) = next_end {
                        if tv > b {
                            let c_old = right.counts[v as usize];
                            right.counts[v as usize] -= 1;
                            sum_c += index.term(v, c_old - 1, end) - index.term(v, c_old, end);
                        }
                    }
                }
            }
        }
        let t = tau + 1;
        if !index.acts_in(t, t).is_empty() {
            let after = sum_a + index.quiet_term(t - 1) + sum_b + quiet_b + sum_c + quiet_next;
            out.push((t, after - before));
        }
        tau += 1;
    }
    pi.clear();
    left.clear();
    right.clear();
}

/// Greedy solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// When adding cuts stalls, move or drop existing cuts and resume.
    /// Off gives the plain insertion-only greedy.
    pub refine: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { refine: true }
    }
}

impl GreedyOptions {
    pub fn insertion_only() -> Self {
        Self { refine: false }
    }
}

/// Runs the greedy solver on a prepared index with default options.
pub fn solve_indexed(index: &ScoringIndex) -> Result<Solution> {
    solve_indexed_with(index, GreedyOptions::default())
}

pub fn solve_indexed_with(index: &ScoringIndex, options: GreedyOptions) -> Result<Solution> {
    let horizon = index.horizon();
    let reach = reach_table(index);
    let mut clock = Clock::max(horizon)?;
    let mut score = 0.0;
    loop {
        if !add_cuts(index, &reach, &mut clock, &mut score)? {
            if !options.refine {
                break;
            }
            // adding is stuck: move or drop existing cuts, then try again
            let refined = refine_cuts(index, &clock)?;
            let value = index.clock_improvement(&refined)?;
            if value <= score + MIN_CUT_GAIN {
                break;
            }
            clock = refined;
            score = value;
        }
        log::debug!(
            "greedy: {} intervals, improvement {score}",
            clock.interval_count()
        );
    }
    Ok(Solution {
        clock,
        improvement: score,
    })
}

/// One sweep of cut additions. Returns whether the clock changed.
fn add_cuts(
    index: &ScoringIndex,
    reach: &[Time],
    clock: &mut Clock,
    score: &mut f64,
) -> Result<bool> {
    let mut set = CutSet::new();
    for (position, delta) in sweep_scores(index, clock) {
        if delta > MIN_CUT_GAIN {
            set.add_or_drop(CutCandidate {
                position,
                score: delta,
                reach: reach[position as usize],
            });
        }
    }
    if set.is_empty() {
        return Ok(false);
    }
    // Scores were computed against the pre-sweep clock; if the batch
    // does not improve, retry with the better-scoring half.
    let mut batch: Vec<CutCandidate> = set.cuts().to_vec();
    batch.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then(x.position.cmp(&y.position))
    });
    let mut progressed = false;
    while !batch.is_empty() {
        let candidate = clock.with_cuts(batch.iter().map(|c| c.position))?;
        let value = index.clock_improvement(&candidate)?;
        if value > *score {
            *clock = candidate;
            *score = value;
            progressed = true;
            break;
        }
        batch.truncate(batch.len() / 2);
    }
    Ok(progressed)
}

/// Revisits every cut of `clock` in order: with the two intervals around
/// it merged, the cut moves to the best-scoring position inside the merged
/// interval, or is dropped if no position gains anything.
fn refine_cuts(index: &ScoringIndex, clock: &Clock) -> Result<Clock> {
    let horizon = index.horizon();
    let mut scratch = [
        Scratch::new(index.target_count()),
        Scratch::new(index.target_count()),
        Scratch::new(index.target_count()),
    ];
    let mut out = Vec::new();
    let mut cuts = clock.cuts().to_vec();
    let mut i = 0;
    while i < cuts.len() {
        let current = cuts[i];
        let merged = Clock::from_cuts(horizon, cuts.iter().copied().filter(|&c| c != current))?;
        let k = i + 1;
        let prev = (k > 1).then(|| merged.interval(k - 1));
        let next = (k < merged.interval_count()).then(|| merged.interval(k + 1));
        out.clear();
        let [pi, left, right] = &mut scratch;
        score_interval(
            index,
            merged.interval(k),
            prev,
            next,
            &mut out,
            [pi, left, right],
        );
        let here = out
            .iter()
            .find(|&&(t, _)| t == current)
            .map_or(f64::NEG_INFINITY, |&(_, d)| d);
        let (best_at, best) =
            out.iter().copied().fold(
                (current, here),
                |acc, (t, d)| if d > acc.1 { (t, d) } else { acc },
            );
        if best <= 0.0 {
            cuts.remove(i);
            continue;
        }
        if best > here + MIN_CUT_GAIN {
            cuts[i] = best_at;
        }
        i += 1;
    }
    Clock::from_cuts(horizon, cuts)
}

/// Solves the single-clock problem greedily.
pub fn solve_oc_greedy(
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
    debug_assert_eq!(index.horizon(), clock_horizon(cs));
    solve_indexed(&index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::load_cascades;

    fn cand(position: Time, score: f64, reach: Time) -> CutCandidate {
        CutCandidate {
            position,
            score,
            reach,
        }
    }

    #[test]
    fn active_edges_require_strict_order() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 3), (0, 2, 3)], &g).unwrap();
        let edges = build_active_edges(&g, &cs);
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0].source.node, 0);
        assert_eq!(edges[0].target.node, 1);
        assert!(edges[0].spans(2) && edges[0].spans(3) && !edges[0].spans(1));
        assert_eq!(edges[0].cut_count(&Clock::from_cuts(3, [2, 3]).unwrap()), 2);
    }

    #[test]
    fn add_or_drop_rules() {
        let mut set = CutSet::new();
        assert!(set.add_or_drop(cand(3, 1.0, 5)));
        // shares an edge with the cut at 3 and scores lower
        assert!(!set.add_or_drop(cand(4, 0.5, 6)));
        assert_eq!(set.cuts().len(), 1);
        // independent
        assert!(set.add_or_drop(cand(8, 0.2, 9)));
        // conflicts with 8 only and beats it
        assert!(set.add_or_drop(cand(9, 0.3, 12)));
        assert_eq!(
            set.cuts().iter().map(|c| c.position).collect::<Vec<_>>(),
            vec![3, 9]
        );
        // conflicts with both; must beat their sum
        let mut wide = set.clone();
        assert!(!wide.add_or_drop(cand(2, 1.2, 10)));
        assert!(wide.add_or_drop(cand(2, 1.4, 10)));
        assert_eq!(wide.cuts().len(), 1);
        assert!(wide.total_score() >= 1.3);
    }

    #[test]
    fn refinement_never_loses_and_stays_consistent() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (0, 2), (3, 4), (1, 4)]).unwrap();
        let cs = load_cascades(
            &[
                (0, 0, 1),
                (0, 1, 3),
                (0, 2, 4),
                (0, 3, 6),
                (0, 4, 7),
                (1, 0, 2),
                (1, 2, 3),
                (1, 3, 5),
                (1, 4, 8),
            ],
            &g,
        )
        .unwrap();
        for policy in [
            NonActivationPolicy::None,
            NonActivationPolicy::ContagiousOnly,
            NonActivationPolicy::Full,
        ] {
            let index = ScoringIndex::new(&g, &cs, IcParams::default(), policy);
            let plain = solve_indexed_with(&index, GreedyOptions { refine: false }).unwrap();
            let refined = solve_indexed_with(&index, GreedyOptions { refine: true }).unwrap();
            assert!(refined.improvement >= plain.improvement - 1e-12);
            let direct = index.clock_improvement(&refined.clock).unwrap();
            assert!((direct - refined.improvement).abs() < 1e-9);
            let (best, _) = crate::dp::solve_indexed(&index).unwrap();
            assert!(refined.improvement <= best.improvement + 1e-9);
        }
    }

    #[test]
    fn chain_reaches_min_clock() {
        let g = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 2), (0, 2, 3)], &g).unwrap();
        let sol = solve_oc_greedy(
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
    fn simultaneous_data_keeps_default_clock() {
        let g = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 1), (1, 2, 1)], &g).unwrap();
        let sol = solve_oc_greedy(
            &g,
            &cs,
            IcParams::default(),
            NonActivationPolicy::ContagiousOnly,
            None,
        )
        .unwrap();
        assert_eq!(sol.clock, Clock::max(1).unwrap());
    }

    #[test]
    fn sweep_matches_single_cut_deltas() {
        let g =
            Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (0, 2), (3, 4), (1, 4), (4, 0)]).unwrap();
        let cs = load_cascades(
            &[
                (0, 0, 1),
                (0, 1, 2),
                (0, 2, 4),
                (0, 3, 5),
                (0, 4, 7),
                (1, 2, 1),
                (1, 3, 3),
                (1, 4, 6),
                (1, 0, 7),
            ],
            &g,
        )
        .unwrap();
        for policy in [
            NonActivationPolicy::None,
            NonActivationPolicy::ContagiousOnly,
            NonActivationPolicy::Full,
        ] {
            let index = ScoringIndex::new(&g, &cs, IcParams::default(), policy);
            for clock in [
                Clock::max(7).unwrap(),
                Clock::from_cuts(7, [3, 6]).unwrap(),
                Clock::from_cuts(7, [2, 5, 7]).unwrap(),
            ] {
                let scores = sweep_scores(&index, &clock);
                let expected: Vec<Time> = (2..=7).filter(|&t| !clock.is_cut(t)).collect();
                assert_eq!(scores.iter().map(|s| s.0).collect::<Vec<_>>(), expected);
                for (t, d) in scores {
                    let exact = index.cut_delta(&clock, t).unwrap();
                    assert!((d - exact).abs() < 1e-9, "{policy:?} t={t}: {d} vs {exact}");
                }
            }
        }
    }
}
