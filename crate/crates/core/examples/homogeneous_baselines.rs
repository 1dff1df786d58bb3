//! How far fixed-width windows fall behind the detected clock.

use netclock::greedy::solve_oc_greedy;
use netclock::likelihood::improvement;
use netclock::simgen::{simulate, SimConfig};
use netclock::{Clock, IcParams, NonActivationPolicy};

fn main() -> netclock::Result<()> {
    let p = IcParams::default();
    let policy = NonActivationPolicy::ContagiousOnly;
    let sim = simulate(&SimConfig {
        cascade_count: 100,
        stretch_mean: 3.0,
        seed: 5,
        ..SimConfig::default()
    })?;
    let (g, cs) = (&sim.graph, &sim.stretched);
    let gr = solve_oc_greedy(g, cs, p, policy, None)?;
    println!(
        "greedy: {:.2} ({} intervals)",
        gr.improvement,
        gr.clock.interval_count()
    );
    for w in 1..=10 {
        let clock = Clock::homogeneous(cs.horizon(), w)?;
        let value = improvement(g, cs, &clock, p, policy)?;
        println!(
            "w = {w:>2}: {value:>10.2} ({:>5.1}% of greedy)",
            100.0 * value / gr.improvement
        );
    }
    Ok(())
}
