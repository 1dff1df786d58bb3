//! Synthetic data: preferential-attachment graphs, independent-cascade
//! sampling, and random stretching of the timeline by a hidden clock.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::cascade::{Activation, Cascade, CascadeSet, Time};
use crate::clock::Clock;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::likelihood::IcParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub nodes: usize,
    /// Edges attached by every new node.
    pub attachment: usize,
    pub params: IcParams,
    pub min_cascade_size: usize,
    pub cascade_count: usize,
    /// Mean interval length of the hidden stretching clock.
    pub stretch_mean: f64,
    pub seed: u64,
    /// Allow spontaneous activations while sampling.
    pub spontaneous: bool,
    pub max_steps: Time,
    /// Sampling attempts per cascade before giving up.
    pub max_attempts: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            nodes: 1000,
            attachment: 2,
            params: IcParams::default(),
            min_cascade_size: 30,
            cascade_count: 5000,
            stretch_mean: 1.0,
            seed: 0,
            spontaneous: false,
            max_steps: 100,
            max_attempts: 100_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nodes", self.nodes),
            ("attachment", self.attachment),
            ("min_cascade_size", self.min_cascade_size),
            ("cascade_count", self.cascade_count),
            ("max_steps", self.max_steps as usize),
            ("max_attempts", self.max_attempts),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.stretch_mean.is_nan() || self.stretch_mean < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "stretch mean must be at least 1, got {}",
                self.stretch_mean
            )));
        }
        Ok(())
    }

    fn spread(&self) -> Spread {
        Spread {
            pe: if self.spontaneous {
                self.params.pe()
            } else {
                0.0
            },
            pn: self.params.pn(),
        }
    }
}

/// Raw activation probabilities used by the sampler. Unlike [`IcParams`]
/// the endpoints 0 and 1 are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub pe: f64,
    pub pn: f64,
}

impl Spread {
    pub fn new(pe: f64, pn: f64) -> Result<Self> {
        for (name, value) in [("pe", pe), ("pn", pn)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(Self { pe, pn })
    }

    /// `1 - (1 - pe)(1 - pn)^c`.
    pub fn activation_probability(&self, contagious: usize) -> f64 {
        1.0 - (1.0 - self.pe) * (1.0 - self.pn).powi(contagious as i32)
    }
}

/// Preferential-attachment graph with every undirected edge stored in
/// both directions. Starts from a clique on `attachment + 1` nodes.
pub fn generate_graph(cfg: &SimConfig) -> Result<Graph> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.nodes;
    let m = cfg.attachment;
    let seed_size = n.min(m + 1);
    let mut undirected: Vec<(NodeId, NodeId)> = Vec::new();
    for u in 0..seed_size {
        for v in u + 1..seed_size {
            undirected.push((u as NodeId, v as NodeId));
        }
    }
    // one entry per edge endpoint: sampling from it is degree-proportional
    let mut ends: Vec<NodeId> = undirected.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for v in seed_size..n {
        chosen.clear();
        while chosen.len() < m {
            let u = *ends.choose(&mut rng).expect("seed clique has edges");
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            undirected.push((u, v as NodeId));
            ends.push(u);
            ends.push(v as NodeId);
        }
    }
    let edges: Vec<(NodeId, NodeId)> = undirected
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    Graph::with_node_count(n, &edges)
}

/// Discrete-time IC run from `seeds`, all active at `t = 1`. A node with
/// `c` in-neighbors activated at the previous step activates with
/// probability `1 - (1 - pe)(1 - pn)^c`; when `pe = 0` only nodes with
/// `c > 0` are considered. Stops when nothing new activates (and `pe = 0`)
/// or after `max_steps` steps.
pub fn sample_from<R: Rng + ?Sized>(
    g: &Graph,
    spread: Spread,
    id: u64,
    seeds: &[NodeId],
    max_steps: Time,
    rng: &mut R,
) -> Result<Cascade> {
    let n = g.node_count();
    for &s in seeds {
        if s as usize >= n {
            return Err(Error::NodeOutOfRange {
                node: s,
                node_count: n,
            });
        }
    }
    let mut active = vec![false; n];
    let mut counts = vec![0usize; n];
    let mut acts = Vec::new();
    let mut frontier: Vec<NodeId> = Vec::new();
    for &s in seeds {
        if !active[s as usize] {
            active[s as usize] = true;
            frontier.push(s);
            acts.push(Activation { node: s, time: 1 });
        }
    }
    let mut touched: Vec<NodeId> = Vec::new();
    let mut t: Time = 1;
    while t < max_steps && (!frontier.is_empty() || spread.pe > 0.0) {
        t += 1;
        for &u in &frontier {
            for &v in g.outs(u) {
                if !active[v as usize] {
                    if counts[v as usize] == 0 {
                        touched.push(v);
                    }
                    counts[v as usize] += 1;
                }
            }
        }
        let mut next = Vec::new();
        if spread.pe > 0.0 {
            for v in 0..n {
                if !active[v] && rng.random::<f64>() < spread.activation_probability(counts[v]) {
                    next.push(v as NodeId);
                }
            }
        } else {
            for &v in &touched {
                if rng.random::<f64>() < spread.activation_probability(counts[v as usize]) {
                    next.push(v);
                }
            }
        }
        for &v in &touched {
            counts[v as usize] = 0;
        }
        touched.clear();
        for &v in &next {
            active[v as usize] = true;
            acts.push(Activation { node: v, time: t });
        }
        frontier = next;
    }
    Cascade::new(id, acts)
}

/// Single-source IC run; see [`sample_from`].
pub fn sample_cascade<R: Rng + ?Sized>(
    g: &Graph,
    spread: Spread,
    id: u64,
    start: NodeId,
    max_steps: Time,
    rng: &mut R,
) -> Result<Cascade> {
    sample_from(g, spread, id, &[start], max_steps, rng)
}

/// Random generator for cascade `id`: its own stream of the seeded ChaCha
/// generator, so results do not depend on scheduling.
pub fn cascade_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id + 1);
    rng
}

/// Samples `cfg.cascade_count` cascades of at least `cfg.min_cascade_size`
/// activations from uniformly random start nodes, in parallel.
pub fn sample_cascades(g: &Graph, cfg: &SimConfig) -> Result<CascadeSet> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return Err(Error::InvalidParameter("graph has no nodes".into()));
    }
    let spread = cfg.spread();
    let cascades = (0..cfg.cascade_count as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = cascade_rng(cfg.seed, id);
            for _ in 0..cfg.max_attempts {
                let start = rng.random_range(0..g.node_count()) as NodeId;
                let c = sample_cascade(g, spread, id, start, cfg.max_steps, &mut rng)?;
                if c.len() >= cfg.min_cascade_size {
                    return Ok(c);
                }
            }
            Err(Error::SamplingExhausted {
                min_size: cfg.min_cascade_size,
                attempts: cfg.max_attempts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CascadeSet::from_cascades(g.node_count(), cascades)
}

/// Stretches every original step `i` into a random interval of length
/// `1 + Geometric(1 / mean)` and moves each activation at step `i` to a
/// uniform time inside interval `i`. All cascades share the hidden clock.
///
/// The result is shifted so its first activation lies at 1 and the hidden
/// clock ends at the last stretched activation, so
/// `hidden.remap_time(new_t)` recovers the original step whenever the
/// input starts at 1.
pub fn stretch<R: Rng + ?Sized>(
    cs: &CascadeSet,
    mean: f64,
    rng: &mut R,
) -> Result<(CascadeSet, Clock)> {
    if mean.is_nan() || mean < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "stretch mean must be at least 1, got {mean}"
        )));
    }
    let horizon = cs.horizon();
    if horizon == 0 {
        return Ok((cs.clone(), Clock::max(1)?));
    }
    let lengths = Geometric::new(1.0 / mean)
        .map_err(|e| Error::InvalidParameter(format!("stretch mean {mean}: {e}")))?;
    // starts[i - 1] = first tick of the interval for original step i
    let mut starts: Vec<u64> = Vec::with_capacity(horizon as usize + 1);
    let mut next = 1u64;
    for _ in 0..horizon {
        starts.push(next);
        next += 1 + lengths.sample(rng);
    }
    starts.push(next);
    if next > Time::MAX as u64 / 2 {
        return Err(Error::InvalidParameter(
            "stretched timeline too long".into(),
        ));
    }

    let mut cascades = Vec::with_capacity(cs.len());
    for c in cs.cascades() {
        let acts = c
            .activations()
            .iter()
            .map(|a| {
                let i = a.time as usize - 1;
                let t = rng.random_range(starts[i]..starts[i + 1]);
                Activation {
                    node: a.node,
                    time: t as Time,
                }
            })
            .collect();
        cascades.push(Cascade::new(c.id(), acts)?);
    }
    let raw = CascadeSet::from_cascades(cs.node_count(), cascades)?;
    let first = raw
        .cascades()
        .iter()
        .flat_map(|c| c.activations().iter().map(|a| a.time))
        .min()
        .unwrap_or(1);
    let shift = first - 1;
    let shifted = raw.map_times(|_, a| a.time - shift)?;
    let new_horizon = shifted.horizon();
    let cuts = starts[1..horizon as usize]
        .iter()
        .map(|&s| s as i64 - shift as i64)
        .filter(|&s| s >= 2 && s <= new_horizon as i64)
        .map(|s| s as Time);
    let hidden = Clock::from_cuts(new_horizon, cuts)?;
    Ok((shifted, hidden))
}

/// Output of [`simulate`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub graph: Graph,
    pub original: CascadeSet,
    pub stretched: CascadeSet,
    pub hidden: Clock,
}

/// Graph, cascades, and stretched cascades for one configuration.
pub fn simulate(cfg: &SimConfig) -> Result<Simulation> {
    let graph = generate_graph(cfg)?;
    let original = sample_cascades(&graph, cfg)?;
    let mut rng = cascade_rng(cfg.seed, u64::MAX - 1);
    let (stretched, hidden) = stretch(&original, cfg.stretch_mean, &mut rng)?;
    Ok(Simulation {
        graph,
        original,
        stretched,
        hidden,
    })
}

/// Output of [`simulate_communities`].
#[derive(Debug, Clone)]
pub struct Communities {
    pub graph: Graph,
    pub stretched: CascadeSet,
    /// Hidden clock of each community, in input order.
    pub hidden: Vec<Clock>,
    /// Community of every node.
    pub community: Vec<usize>,
}

/// Disjoint copies of the [`simulate`] setup, one per entry of
/// `stretch_means`, each stretched by its own hidden clock. Every community
/// has `cfg.nodes` nodes and `cfg.cascade_count` cascades; node and cascade
/// ids are offset so the union is one dataset. Useful for multi-clock runs.
pub fn simulate_communities(cfg: &SimConfig, stretch_means: &[f64]) -> Result<Communities> {
    if stretch_means.is_empty() {
        return Err(Error::InvalidParameter("no communities requested".into()));
    }
    let n = cfg.nodes;
    let mut edges = Vec::new();
    let mut cascades = Vec::new();
    let mut hidden = Vec::with_capacity(stretch_means.len());
    for (j, &mean) in stretch_means.iter().enumerate() {
        let part = SimConfig {
            stretch_mean: mean,
            seed: cfg.seed.wrapping_add(j as u64 * 1_000_003),
            ..cfg.clone()
        };
        let sim = simulate(&part)?;
        let offset = (j * n) as NodeId;
        edges.extend(sim.graph.edges().map(|(u, v)| (u + offset, v + offset)));
        let id_offset = (j * cfg.cascade_count) as u64;
        for c in sim.stretched.cascades() {
            let acts = c
                .activations()
                .iter()
                .map(|a| Activation {
                    node: a.node + offset,
                    time: a.time,
                })
                .collect();
            cascades.push(Cascade::new(c.id() + id_offset, acts)?);
        }
        hidden.push(sim.hidden);
    }
    let total = n * stretch_means.len();
    Ok(Communities {
        graph: Graph::with_node_count(total, &edges)?,
        stretched: CascadeSet::from_cascades(total, cascades)?,
        hidden,
        community: (0..total).map(|v| v / n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SimConfig {
        SimConfig {
            nodes: 200,
            cascade_count: 20,
            min_cascade_size: 5,
            seed: 7,
            ..SimConfig::default()
        }
    }

    #[test]
    fn default_graph_size() {
        let g = generate_graph(&SimConfig::default()).unwrap();
        assert_eq!(g.node_count(), 1000);
        let undirected = g.edge_count() as f64 / 2.0;
        assert!((undirected - 2200.0).abs() / 2200.0 < 0.15, "{undirected}");
        for (u, v) in g.edges() {
            assert!(g.has_edge(v, u));
        }
    }

    #[test]
    fn three_nodes_form_a_triangle() {
        let cfg = SimConfig {
            nodes: 3,
            ..SimConfig::default()
        };
        let g = generate_graph(&cfg).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn graph_is_deterministic_and_connected() {
        let cfg = small_cfg();
        let a = generate_graph(&cfg).unwrap();
        let b = generate_graph(&cfg).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let mut seen = vec![false; a.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in a.outs(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn certain_spread_walks_a_path() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_cascade(&g, Spread::new(0.0, 1.0).unwrap(), 0, 0, 10, &mut rng).unwrap();
        let times: Vec<_> = (0..4).map(|v| c.time_of(v).unwrap()).collect();
        assert_eq!(times, vec![1, 2, 3, 4]);
    }

    #[test]
    fn no_spread_keeps_the_start_only() {
        let g = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_cascade(&g, Spread::new(0.0, 0.0).unwrap(), 0, 1, 10, &mut rng).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.time_of(1), Some(1));
    }

    #[test]
    fn sampled_cascades_respect_min_size_and_seed() {
        let cfg = small_cfg();
        let g = generate_graph(&cfg).unwrap();
        let a = sample_cascades(&g, &cfg).unwrap();
        let b = sample_cascades(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        assert!(a.cascades().iter().all(|c| c.len() >= 5));
        assert!(a.cascades().iter().all(|c| c.activations()[0].time == 1));
    }

    #[test]
    fn impossible_min_size_errors() {
        let cfg = SimConfig {
            nodes: 5,
            min_cascade_size: 10,
            cascade_count: 1,
            max_attempts: 50,
            ..SimConfig::default()
        };
        let g = generate_graph(&cfg).unwrap();
        assert!(matches!(
            sample_cascades(&g, &cfg),
            Err(Error::SamplingExhausted { .. })
        ));
    }

    #[test]
    fn unit_stretch_is_identity() {
        let cfg = small_cfg();
        let g = generate_graph(&cfg).unwrap();
        let cs = sample_cascades(&g, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (out, hidden) = stretch(&cs, 1.0, &mut rng).unwrap();
        assert_eq!(out, cs);
        assert_eq!(hidden, Clock::min(cs.horizon()).unwrap());
    }

    #[test]
    fn stretch_is_inverted_by_the_hidden_clock() {
        let cfg = small_cfg();
        let g = generate_graph(&cfg).unwrap();
        let cs = sample_cascades(&g, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (out, hidden) = stretch(&cs, 3.5, &mut rng).unwrap();
        assert!(out.horizon() > cs.horizon());
        assert_eq!(hidden.interval_count(), cs.horizon() as usize);
        for (orig, new) in cs.cascades().iter().zip(out.cascades()) {
            assert_eq!(orig.len(), new.len());
            for a in orig.activations() {
                let t = new.time_of(a.node).unwrap();
                assert_eq!(hidden.remap_time(t).unwrap(), a.time as usize);
            }
        }
    }

    #[test]
    fn stretch_rejects_small_mean() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let cs = crate::cascade::load_cascades(&[(0, 0, 1)], &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(stretch(&cs, 0.5, &mut rng).is_err());
    }

    #[test]
    fn communities_are_disjoint() {
        let cfg = SimConfig {
            nodes: 60,
            cascade_count: 5,
            min_cascade_size: 5,
            seed: 3,
            ..SimConfig::default()
        };
        let out = simulate_communities(&cfg, &[1.0, 4.0]).unwrap();
        assert_eq!(out.graph.node_count(), 120);
        assert_eq!(out.stretched.len(), 10);
        assert_eq!(out.hidden.len(), 2);
        for (u, v) in out.graph.edges() {
            assert_eq!(out.community[u as usize], out.community[v as usize]);
        }
        for c in out.stretched.cascades() {
            let home = c.id() as usize / 5;
            assert!(c
                .activations()
                .iter()
                .all(|a| out.community[a.node as usize] == home));
        }
    }
}
