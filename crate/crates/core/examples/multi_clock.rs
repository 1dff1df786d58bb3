//! Several communities spreading at different paces: pick k clocks and see
//! which community each node ends up with.

use netclock::multiclock::{solve_koc, InnerSolver};
use netclock::simgen::{simulate_communities, SimConfig};
use netclock::IcParams;

fn main() -> netclock::Result<()> {
    let cfg = SimConfig {
        nodes: 300,
        cascade_count: 60,
        seed: 9,
        ..SimConfig::default()
    };
    let means = [1.0, 3.0, 6.0];
    let data = simulate_communities(&cfg, &means)?;
    let sol = solve_koc(
        &data.graph,
        &data.stretched,
        means.len(),
        IcParams::default(),
        InnerSolver::Greedy,
    )?;
    println!("total improvement {:.2}", sol.total);
    for (j, (clock, gain)) in sol.clocks.iter().zip(&sol.per_clock_gain).enumerate() {
        let mut members = vec![0usize; means.len()];
        for (v, &c) in sol.assignment.0.iter().enumerate() {
            if c == j {
                members[data.community[v]] += 1;
            }
        }
        println!(
            "clock {j}: {:>3} intervals, gain {gain:>10.2}, nodes per community {members:?}",
            clock.interval_count()
        );
    }
    for (c, hidden) in data.hidden.iter().enumerate() {
        println!(
            "community {c} hidden clock: {} intervals",
            hidden.interval_count()
        );
    }
    Ok(())
}
