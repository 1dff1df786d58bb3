//! Generate a preferential-attachment graph, sample cascades and stretch
//! their timeline; then remap the stretched data with the hidden clock.

use netclock::simgen::{simulate, SimConfig};

fn main() -> netclock::Result<()> {
    let cfg = SimConfig {
        cascade_count: 100,
        stretch_mean: 4.0,
        seed: 3,
        ..SimConfig::default()
    };
    let sim = simulate(&cfg)?;
    println!(
        "graph: {} nodes, {} undirected edges",
        sim.graph.node_count(),
        sim.graph.edge_count() / 2
    );
    println!(
        "cascades: {} with {} activations, horizon {} -> {} after stretching",
        sim.original.len(),
        sim.original.total_activations(),
        sim.original.horizon(),
        sim.stretched.horizon()
    );
    let first = &sim.stretched.cascades()[0];
    let original = &sim.original.cascades()[0];
    println!(
        "cascade {} (node: original -> stretched -> remapped)",
        first.id()
    );
    for a in original.activations().iter().take(8) {
        let t = first.time_of(a.node).expect("same nodes");
        println!(
            "  {:>4}: {:>3} -> {:>4} -> {:>3}",
            a.node,
            a.time,
            t,
            sim.hidden.remap_time(t)?
        );
    }
    Ok(())
}
