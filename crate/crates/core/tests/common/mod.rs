//! Random small instances shared by the integration tests.
#![allow(dead_code)]

use netclock::{load_cascades, CascadeSet, Graph, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directed graph on `2..=max_nodes` nodes, each ordered pair an edge with
/// probability `density`.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize, density: f64) -> Graph {
    let n = rng.random_range(2..=max_nodes);
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in 0..n as NodeId {
            if u != v && rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::with_node_count(n, &edges).unwrap()
}

/// Up to three cascades over `g` with at most `max_acts` activations in
/// total, times drawn from `1..=max_time`, on a compressed timeline.
pub fn random_cascades<R: Rng>(
    rng: &mut R,
    g: &Graph,
    max_time: i64,
    max_acts: usize,
) -> CascadeSet {
    let n = g.node_count();
    let cascades = rng.random_range(1..=3u64);
    let mut records = Vec::new();
    let mut budget = max_acts;
    for id in 0..cascades {
        if budget == 0 {
            break;
        }
        let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
        nodes.shuffle(rng);
        let size = rng.random_range(1..=n.min(budget));
        budget -= size;
        for &v in &nodes[..size] {
            records.push((id, v, rng.random_range(1..=max_time)));
        }
    }
    load_cascades(&records, g).unwrap().compress_timeline()
}

pub fn random_instance(
    seed: u64,
    max_nodes: usize,
    max_time: i64,
    max_acts: usize,
) -> (Graph, CascadeSet) {
    let mut rng = rng(seed);
    let g = random_graph(&mut rng, max_nodes, 0.3);
    let cs = random_cascades(&mut rng, &g, max_time, max_acts);
    (g, cs)
}
