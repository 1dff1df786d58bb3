//! Temporal features of cascade prefixes, on raw and on clock time.

use netclock::apps::{extract_size_features, DEFAULT_SIZE_RATIO};
use netclock::greedy::solve_oc_greedy;
use netclock::simgen::{simulate, SimConfig};
use netclock::{Clock, IcParams, NonActivationPolicy};

fn main() -> netclock::Result<()> {
    let cfg = SimConfig {
        cascade_count: 200,
        stretch_mean: 3.0,
        seed: 8,
        ..SimConfig::default()
    };
    let sim = simulate(&cfg)?;
    let cs = &sim.stretched;
    let clock = solve_oc_greedy(
        &sim.graph,
        cs,
        IcParams::default(),
        NonActivationPolicy::ContagiousOnly,
        None,
    )?
    .clock;
    let m = 25;
    for (name, c) in [("raw", Clock::min(cs.horizon())?), ("clock", clock)] {
        let rows = extract_size_features(cs, &c, m, DEFAULT_SIZE_RATIO)?;
        let large = rows.iter().filter(|r| r.large).count();
        let mean = |f: fn(&netclock::apps::SizeFeatureRow) -> f64| {
            rows.iter().map(f).sum::<f64>() / rows.len() as f64
        };
        println!(
            "{name:>5}: {} cascades ({large} large), mean time to {m}th {:.2}, mean gap {:.2}, mean distinct steps {:.2}",
            rows.len(),
            mean(|r| r.time_to_mth as f64),
            mean(|r| r.mean_gap),
            mean(|r| r.distinct_steps as f64),
        );
    }
    Ok(())
}
