//! Network clocks: ordered partitions of the timeline `[1, T]` into
//! contiguous intervals, stored canonically as the set of cut positions.

use serde::{Deserialize, Serialize};

use crate::cascade::Time;
use crate::error::{Error, Result};

/// Largest timeline the exhaustive enumerator accepts.
pub const ENUMERATION_LIMIT: Time = 20;

/// Closed interval `[start, end]` of original ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

impl Interval {
    pub fn new(start: Time, end: Time) -> Result<Self> {
        if start == 0 || start > end {
            return Err(Error::InvalidClock(format!(
                "interval [{start}, {end}] is empty or starts before 1"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn width(&self) -> Time {
        self.end - self.start + 1
    }

    /// True when `self` ends exactly one tick before `next` starts.
    pub fn precedes(&self, next: &Interval) -> bool {
        self.end + 1 == next.start
    }
}

/// A partition of `[1, horizon]`. A cut at position `t` separates `t - 1`
/// from `t`, so cuts live in `2..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clock {
    horizon: Time,
    cuts: Vec<Time>,
}

impl Clock {
    /// `Δ_max`: every tick in one interval.
    pub fn max(horizon: Time) -> Result<Self> {
        Self::from_cuts(horizon, std::iter::empty())
    }

    /// `Δ_min`: the original timeline, one interval per tick.
    pub fn min(horizon: Time) -> Result<Self> {
        Self::from_cuts(horizon, 2..=horizon)
    }

    /// Fixed windows of width `w`; the last window may be shorter.
    pub fn homogeneous(horizon: Time, width: Time) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidParameter("window width must be >= 1".into()));
        }
        Self::from_cuts(horizon, (1..=horizon).step_by(width as usize).skip(1))
    }

    /// Homogeneous clock with about `intervals` windows: width
    /// `ceil(horizon / intervals)`, so never more than `intervals`.
    pub fn homogeneous_matching(horizon: Time, intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidParameter(
                "interval count must be >= 1".into(),
            ));
        }
        let width = (horizon as usize).div_ceil(intervals).max(1);
        Self::homogeneous(horizon, width as Time)
    }

    /// Builds a clock from arbitrary cut positions (duplicates are merged).
    pub fn from_cuts(horizon: Time, cuts: impl IntoIterator<Item = Time>) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidClock("horizon must be >= 1".into()));
        }
        let mut cuts: Vec<Time> = cuts.into_iter().collect();
        cuts.sort_unstable();
        cuts.dedup();
        if let Some(&bad) = cuts.iter().find(|&&c| c < 2 || c > horizon) {
            return Err(Error::InvalidClock(format!(
                "cut {bad} outside 2..={horizon}"
            )));
        }
        Ok(Self { horizon, cuts })
    }

    /// Builds a clock from a contiguous interval list covering `[1, T]`.
    pub fn from_intervals(intervals: &[Interval]) -> Result<Self> {
        let first = intervals
            .first()
            .ok_or_else(|| Error::InvalidClock("no intervals".into()))?;
        if first.start != 1 {
            return Err(Error::InvalidClock("first interval must start at 1".into()));
        }
        for pair in intervals.windows(2) {
            if !pair[0].precedes(&pair[1]) || pair[1].start > pair[1].end {
                return Err(Error::InvalidClock(format!(
                    "intervals [{}, {}] and [{}, {}] are not adjacent",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                )));
            }
        }
        let horizon = intervals.last().map(|i| i.end).unwrap_or(1);
        Self::from_cuts(horizon, intervals.iter().skip(1).map(|i| i.start))
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    /// Sorted cut positions.
    pub fn cuts(&self) -> &[Time] {
        &self.cuts
    }

    /// Number of intervals `f = |cuts| + 1`.
    pub fn interval_count(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn is_cut(&self, t: Time) -> bool {
        self.cuts.binary_search(&t).is_ok()
    }

    pub fn intervals(&self) -> Vec<Interval> {
        let starts = std::iter::once(1).chain(self.cuts.iter().copied());
        let ends = self
            .cuts
            .iter()
            .map(|&c| c - 1)
            .chain(std::iter::once(self.horizon));
        starts
            .zip(ends)
            .map(|(start, end)| Interval { start, end })
            .collect()
    }

    /// The `i`-th interval, 1-based.
    pub fn interval(&self, index: usize) -> Interval {
        let start = if index == 1 { 1 } else { self.cuts[index - 2] };
        let end = if index == self.interval_count() {
            self.horizon
        } else {
            self.cuts[index - 1] - 1
        };
        Interval { start, end }
    }

    fn check_time(&self, t: Time) -> Result<()> {
        if t < 1 || t > self.horizon {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// `δ_Δ(t)`: the interval containing `t`.
    pub fn interval_of(&self, t: Time) -> Result<Interval> {
        Ok(self.interval(self.remap_time(t)?))
    }

    /// 1-based index of the interval containing `t`.
    pub fn remap_time(&self, t: Time) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.step_of(t))
    }

    /// Unchecked [`Clock::remap_time`] for ticks already known to be in range.
    pub(crate) fn step_of(&self, t: Time) -> usize {
        self.cuts.partition_point(|&c| c <= t) + 1
    }

    /// A copy of this clock with one more cut.
    pub fn with_cut(&self, t: Time) -> Result<Self> {
        if self.is_cut(t) {
            return Err(Error::AlreadyBoundary(t));
        }
        Self::from_cuts(self.horizon, self.cuts.iter().copied().chain([t]))
    }

    pub fn with_cuts(&self, extra: impl IntoIterator<Item = Time>) -> Result<Self> {
        Self::from_cuts(self.horizon, self.cuts.iter().copied().chain(extra))
    }
}

/// Candidate clocks for the multi-clock problem, in selection order.
pub type ClockSet = Vec<Clock>;

/// Node → index into a [`ClockSet`], one entry per graph node.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClockAssignment(pub Vec<usize>);

impl ClockAssignment {
    pub fn clock_of(&self, node: crate::graph::NodeId) -> usize {
        self.0[node as usize]
    }
}

/// Every clock over `[1, T]`: ordered by number of cuts, then
/// lexicographically by cut set.
pub fn enumerate_clocks(horizon: Time) -> Result<impl Iterator<Item = Clock>> {
    enumerate_clocks_bounded(horizon, ENUMERATION_LIMIT)
}

pub fn enumerate_clocks_bounded(horizon: Time, limit: Time) -> Result<impl Iterator<Item = Clock>> {
    if horizon < 1 {
        return Err(Error::InvalidClock("horizon must be >= 1".into()));
    }
    if horizon > limit {
        return Err(Error::TooLarge {
            what: "clock enumeration",
            horizon,
            limit,
        });
    }
    let positions: Vec<Time> = (2..=horizon).collect();
    let n = positions.len();
    Ok((0..=n).flat_map(move |k| {
        let positions = positions.clone();
        Combinations::new(n, k).map(move |idx| Clock {
            horizon,
            cuts: idx.iter().map(|&i| positions[i]).collect(),
        })
    }))
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Iterates all k-subsets of `0..n` lexicographically.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    Combinations::new(n, k)
}
