//! Detect the clock of a tiny hand-written dataset and print its intervals.
//!
//! cargo run --example detect_clock

use netclock::dp::solve_oc_dp;
use netclock::{load_cascades, Graph, IcParams, NonActivationPolicy};

fn main() -> netclock::Result<()> {
    // a -> b -> c -> d, plus a shortcut a -> c
    let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (0, 2)])?;
    // Two cascades recorded at a resolution finer than the spreading pace.
    let cs = load_cascades(
        &[
            (0, 0, 1),
            (0, 1, 4),
            (0, 2, 5),
            (0, 3, 9),
            (1, 0, 2),
            (1, 2, 5),
            (1, 3, 8),
        ],
        &g,
    )?;
    let sol = solve_oc_dp(
        &g,
        &cs,
        IcParams::default(),
        NonActivationPolicy::ContagiousOnly,
        None,
    )?;
    println!("improvement over one big interval: {:.4}", sol.improvement);
    for (i, d) in sol.clock.intervals().iter().enumerate() {
        println!("interval {}: [{}, {}]", i + 1, d.start, d.end);
    }
    Ok(())
}
