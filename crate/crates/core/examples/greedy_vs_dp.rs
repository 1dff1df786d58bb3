//! Greedy and exact solvers on stretched synthetic data.

use std::time::Instant;

use netclock::greedy::{solve_indexed_with, GreedyOptions};
use netclock::simgen::{simulate, SimConfig};
use netclock::{dp, IcParams, NonActivationPolicy, ScoringIndex};

fn main() -> netclock::Result<()> {
    let cfg = SimConfig {
        cascade_count: 200,
        stretch_mean: 3.0,
        seed: 42,
        ..SimConfig::default()
    };
    let sim = simulate(&cfg)?;
    let cs = &sim.stretched;
    println!(
        "{} activations, horizon {}, hidden clock has {} intervals",
        cs.total_activations(),
        cs.horizon(),
        sim.hidden.interval_count()
    );
    let index = ScoringIndex::new(
        &sim.graph,
        cs,
        IcParams::default(),
        NonActivationPolicy::ContagiousOnly,
    );

    let start = Instant::now();
    let (exact, _) = dp::solve_indexed(&index)?;
    println!(
        "dp:             {:>12.3} with {:>3} intervals in {:?}",
        exact.improvement,
        exact.clock.interval_count(),
        start.elapsed()
    );
    for (name, options) in [
        ("greedy:", GreedyOptions::default()),
        ("insertion-only:", GreedyOptions::insertion_only()),
    ] {
        let start = Instant::now();
        let sol = solve_indexed_with(&index, options)?;
        println!(
            "{name:<15} {:>12.3} with {:>3} intervals in {:?} ({:.1}% of dp)",
            sol.improvement,
            sol.clock.interval_count(),
            start.elapsed(),
            100.0 * sol.improvement / exact.improvement
        );
    }
    println!(
        "greedy clock equals the hidden one: {}",
        solve_indexed_with(&index, GreedyOptions::default())?.clock == sim.hidden
    );
    Ok(())
}
