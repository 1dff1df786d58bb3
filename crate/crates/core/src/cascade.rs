//! Cascade datasets: activation records, per-cascade lookup and timeline
//! normalization/compression.

use std::collections::{BTreeMap, HashMap};

use crate::clock::Interval;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Discrete time tick on the internal timeline, starting at 1.
pub type Time = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Activation {
    pub node: NodeId,
    pub time: Time,
}

/// One diffusion episode. Each node activates at most once; activations are
/// kept sorted by `(time, node)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    id: u64,
    activations: Vec<Activation>,
    time_of: HashMap<NodeId, Time>,
}

impl Cascade {
    pub fn new(id: u64, mut activations: Vec<Activation>) -> Result<Self> {
        activations.sort_unstable_by_key(|a| (a.time, a.node));
        let mut time_of = HashMap::with_capacity(activations.len());
        for a in &activations {
            if time_of.insert(a.node, a.time).is_some() {
                return Err(Error::RepeatedActivation {
                    cascade: id,
                    node: a.node,
                });
            }
        }
        Ok(Self {
            id,
            activations,
            time_of,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn len(&self) -> usize {
        self.activations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activations.is_empty()
    }

    /// Activation time of `v`, if `v` joined this cascade.
    pub fn time_of(&self, v: NodeId) -> Option<Time> {
        self.time_of.get(&v).copied()
    }

    /// Activations whose time falls in `[interval.start, interval.end]`.
    pub fn active_in(&self, interval: Interval) -> &[Activation] {
        let lo = self
            .activations
            .partition_point(|a| a.time < interval.start);
        let hi = self.activations.partition_point(|a| a.time <= interval.end);
        &self.activations[lo..hi.max(lo)]
    }

    pub fn active_at_time(&self, t: Time) -> &[Activation] {
        self.active_in(Interval { start: t, end: t })
    }

    fn map_times(&self, f: impl Fn(Time) -> Time) -> Self {
        let activations: Vec<_> = self
            .activations
            .iter()
            .map(|a| Activation {
                node: a.node,
                time: f(a.time),
            })
            .collect();
        // Monotone maps keep node uniqueness, so this cannot fail.
        Self::new(self.id, activations).expect("time map preserves uniqueness")
    }
}

/// Mapping from internal ticks back to the timestamps of the input data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timeline {
    offset: i64,
    compressed: Option<Vec<i64>>,
}

impl Timeline {
    /// Shift-only timeline: internal tick `t` is external time `t + offset`.
    pub fn shifted(offset: i64) -> Self {
        Self {
            offset,
            compressed: None,
        }
    }

    pub fn is_compressed(&self) -> bool {
        self.compressed.is_some()
    }

    /// External timestamp of internal tick `t`.
    pub fn to_external(&self, t: Time) -> i64 {
        match &self.compressed {
            Some(map) => {
                let idx = t as usize;
                if idx >= 1 && idx <= map.len() {
                    map[idx - 1]
                } else {
                    // past the compressed range: extrapolate by unit steps
                    let last = *map.last().unwrap_or(&0);
                    last + idx as i64 - map.len() as i64
                }
            }
            None => t as i64 + self.offset,
        }
    }

    /// Smallest internal tick whose external time is at least `external`.
    pub fn to_internal_ceil(&self, external: i64) -> i64 {
        match &self.compressed {
            Some(map) => map.partition_point(|&x| x < external) as i64 + 1,
            None => external - self.offset,
        }
    }
}

/// A set of cascades over a shared timeline `[1, horizon]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeSet {
    cascades: Vec<Cascade>,
    by_id: HashMap<u64, usize>,
    horizon: Time,
    total_activations: usize,
    node_count: usize,
    timeline: Timeline,
}

impl CascadeSet {
    /// Builds a set from ready-made cascades on the internal timeline.
    /// Times must already be `>= 1`; no shifting is applied.
    pub fn from_cascades(node_count: usize, mut cascades: Vec<Cascade>) -> Result<Self> {
        cascades.sort_by_key(Cascade::id);
        let mut by_id = HashMap::with_capacity(cascades.len());
        let mut horizon = 0;
        let mut total = 0;
        for (i, c) in cascades.iter().enumerate() {
            if by_id.insert(c.id, i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "cascade id {} appears twice",
                    c.id
                )));
            }
            for a in &c.activations {
                if a.node as usize >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: a.node,
                        node_count,
                    });
                }
                if a.time == 0 {
                    return Err(Error::InvalidTime(0));
                }
                horizon = horizon.max(a.time);
            }
            total += c.len();
        }
        Ok(Self {
            cascades,
            by_id,
            horizon,
            total_activations: total,
            node_count,
            timeline: Timeline::default(),
        })
    }

    pub(crate) fn with_timeline(mut self, timeline: Timeline) -> Self {
        self.timeline = timeline;
        self
    }

    pub fn cascades(&self) -> &[Cascade] {
        &self.cascades
    }

    pub fn cascade(&self, id: u64) -> Result<&Cascade> {
        self.by_id
            .get(&id)
            .map(|&i| &self.cascades[i])
            .ok_or(Error::UnknownCascade(id))
    }

    /// Last activation time `T`; 0 for an empty set.
    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn total_activations(&self) -> usize {
        self.total_activations
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn timeline(&self) -> &Timeline {
        &self.timeline
    }

    pub fn len(&self) -> usize {
        self.cascades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cascades.is_empty()
    }

    /// `A(X, δ)`: nodes of cascade `cascade_id` active somewhere in `interval`.
    pub fn active_at(&self, cascade_id: u64, interval: Interval) -> Result<Vec<NodeId>> {
        let cascade = self.cascade(cascade_id)?;
        Ok(cascade.active_in(interval).iter().map(|a| a.node).collect())
    }

    /// Distinct activation times across all cascades, ascending.
    pub fn distinct_times(&self) -> Vec<Time> {
        let mut times: Vec<Time> = self
            .cascades
            .iter()
            .flat_map(|c| c.activations.iter().map(|a| a.time))
            .collect();
        times.sort_unstable();
        times.dedup();
        times
    }

    /// Drops ticks with no activation in any cascade and renumbers the rest
    /// `1..=T'`. The external timestamps stay recoverable via [`Self::timeline`].
    pub fn compress_timeline(&self) -> CascadeSet {
        let times = self.distinct_times();
        let dense = times.iter().enumerate().all(|(i, &t)| t as usize == i + 1);
        if dense {
            return self.clone();
        }
        let rank: HashMap<Time, Time> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i as Time + 1))
            .collect();
        let cascades = self
            .cascades
            .iter()
            .map(|c| c.map_times(|t| rank[&t]))
            .collect();
        let external = times
            .iter()
            .map(|&t| self.timeline.to_external(t))
            .collect();
        CascadeSet::from_cascades(self.node_count, cascades)
            .expect("compression keeps a valid set")
            .with_timeline(Timeline {
                offset: 0,
                compressed: Some(external),
            })
    }

    /// Applies a monotone, injective-on-order map to every activation time.
    pub(crate) fn map_times(&self, f: impl Fn(&Cascade, Activation) -> Time) -> Result<Self> {
        let cascades = self
            .cascades
            .iter()
            .map(|c| {
                let acts = c
                    .activations
                    .iter()
                    .map(|&a| Activation {
                        node: a.node,
                        time: f(c, a),
                    })
                    .collect();
                Cascade::new(c.id, acts)
            })
            .collect::<Result<Vec<_>>>()?;
        CascadeSet::from_cascades(self.node_count, cascades)
    }
}

/// Loads `(cascade_id, node, time)` records against `g`.
///
/// Times are shifted so that the earliest activation in the set lands at 1;
/// the shift is kept in the returned set's [`Timeline`].
pub fn load_cascades(records: &[(u64, NodeId, i64)], g: &Graph) -> Result<CascadeSet> {
    let node_count = g.node_count();
    let min_time = records.iter().map(|r| r.2).min().unwrap_or(1);
    if let Some(bad) = records.iter().find(|r| r.2 <= 0) {
        return Err(Error::InvalidTime(bad.2));
    }
    let offset = min_time - 1;
    let mut grouped: BTreeMap<u64, Vec<Activation>> = BTreeMap::new();
    for &(cascade, node, time) in records {
        if node as usize >= node_count {
            return Err(Error::NodeOutOfRange { node, node_count });
        }
        let shifted = time - offset;
        let time = Time::try_from(shifted).map_err(|_| Error::InvalidTime(time))?;
        grouped
            .entry(cascade)
            .or_default()
            .push(Activation { node, time });
    }
    let cascades = grouped
        .into_iter()
        .map(|(id, acts)| Cascade::new(id, acts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CascadeSet::from_cascades(node_count, cascades)?.with_timeline(Timeline::shifted(offset)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(&edges).unwrap()
    }

    #[test]
    fn load_normalizes_first_activation_to_one() {
        let cs = load_cascades(&[(0, 5, 3), (0, 6, 4)], &graph(7)).unwrap();
        assert_eq!(cs.horizon(), 2);
        let c = cs.cascade(0).unwrap();
        assert_eq!(c.time_of(5), Some(1));
        assert_eq!(c.time_of(6), Some(2));
        assert_eq!(cs.timeline().to_external(1), 3);
    }

    #[test]
    fn repeated_node_rejected() {
        let err = load_cascades(&[(0, 5, 1), (0, 5, 2)], &graph(7)).unwrap_err();
        assert!(matches!(
            err,
            Error::RepeatedActivation {
                cascade: 0,
                node: 5
            }
        ));
    }

    #[test]
    fn same_node_in_two_cascades() {
        let cs = load_cascades(&[(0, 5, 1), (1, 5, 1)], &graph(7)).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.total_activations(), 2);
        assert_eq!(cs.cascade(1).unwrap().time_of(5), Some(1));
    }

    #[test]
    fn unknown_node_rejected() {
        assert!(matches!(
            load_cascades(&[(0, 9, 1)], &graph(3)),
            Err(Error::NodeOutOfRange { node: 9, .. })
        ));
    }

    #[test]
    fn compress_removes_empty_ticks() {
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 5), (1, 2, 9)], &graph(3)).unwrap();
        let compressed = cs.compress_timeline();
        assert_eq!(compressed.horizon(), 3);
        assert_eq!(compressed.cascade(0).unwrap().time_of(1), Some(2));
        assert_eq!(compressed.cascade(1).unwrap().time_of(2), Some(3));
        let back: Vec<_> = (1..=3)
            .map(|t| compressed.timeline().to_external(t))
            .collect();
        assert_eq!(back, vec![1, 5, 9]);
    }

    #[test]
    fn compress_dense_is_identity() {
        let cs = load_cascades(&[(0, 0, 1), (0, 1, 2), (0, 2, 3)], &graph(3)).unwrap();
        assert_eq!(cs.compress_timeline(), cs);
        let empty = load_cascades(&[], &graph(3)).unwrap();
        assert_eq!(empty.compress_timeline().total_activations(), 0);
    }

    #[test]
    fn active_at_intervals() {
        let cs = load_cascades(&[(0, 5, 1), (0, 6, 2)], &graph(7)).unwrap();
        assert_eq!(
            cs.active_at(0, Interval::new(1, 2).unwrap()).unwrap(),
            vec![5, 6]
        );
        assert!(cs
            .active_at(0, Interval::new(3, 3).unwrap())
            .unwrap()
            .is_empty());
        assert_eq!(
            cs.active_at(0, Interval::new(2, 2).unwrap()).unwrap(),
            vec![6]
        );
        assert!(matches!(
            cs.active_at(4, Interval::new(1, 1).unwrap()),
            Err(Error::UnknownCascade(4))
        ));
    }
}
