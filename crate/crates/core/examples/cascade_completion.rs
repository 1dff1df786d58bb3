//! Hide activations and reconstruct them under three clocks: the detected
//! one, the raw timeline, and a homogeneous clock of the same size.

use netclock::apps::completion_batch;
use netclock::greedy::solve_oc_greedy;
use netclock::simgen::{simulate, SimConfig};
use netclock::{Clock, IcParams, NonActivationPolicy};

fn main() -> netclock::Result<()> {
    let cfg = SimConfig {
        cascade_count: 300,
        stretch_mean: 4.0,
        seed: 21,
        ..SimConfig::default()
    };
    let sim = simulate(&cfg)?;
    let (g, cs) = (&sim.graph, &sim.stretched);
    let detected = solve_oc_greedy(
        g,
        cs,
        IcParams::default(),
        NonActivationPolicy::ContagiousOnly,
        None,
    )?
    .clock;
    let horizon = cs.horizon();
    let clocks = [
        ("GR", detected.clone()),
        ("MIN", Clock::min(horizon)?),
        (
            "AGG-match",
            Clock::homogeneous_matching(horizon, detected.interval_count())?,
        ),
    ];
    let rates = [0.1, 0.3, 0.5];
    println!(
        "{:<10} {:>5} {:>8} {:>8} {:>8}",
        "clock", "drop", "success", "recall", "f1"
    );
    for (name, clock) in &clocks {
        for row in completion_batch(g, cs, clock, &rates, 1)? {
            println!(
                "{name:<10} {:>5.1} {:>8.3} {:>8.3} {:>8.3}",
                row.drop_rate, row.success, row.recall, row.f1
            );
        }
    }
    Ok(())
}
