use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use netclock::apps::completion_batch;
use netclock::greedy::{self, GreedyOptions};
use netclock::io::{self, ClockJson, ClockSetJson, DetectStats, NodeMap, NODE_MAP_FILE};
use netclock::likelihood::{improvement, total_loglik};
use netclock::multiclock::{solve_koc, InnerSolver};
use netclock::simgen::{simulate, SimConfig};
use netclock::{dp, oracle, ScoringIndex};
use netclock::{CascadeSet, Clock, Error, Graph, IcParams, NonActivationPolicy};

#[derive(Parser)]
#[command(
    name = "netclock",
    version,
    about = "Detect network clocks in diffusion cascades"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the single clock with the largest improvement.
    Detect {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "greedy")]
        algo: Algo,
        #[arg(long, default_value = "contagious_only")]
        policy: NonActivationPolicy,
        /// Greedy only adds cuts; skip moving or dropping them once adding stalls.
        #[arg(long)]
        insertion_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedily select up to k clocks and assign every node to one.
    DetectK {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_enum, default_value = "greedy")]
        inner: Inner,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a graph, cascades, and a stretched copy with its hidden clock.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 2)]
        attachment: usize,
        #[arg(long, default_value_t = 5000)]
        cascades: usize,
        #[arg(long, default_value_t = 30)]
        min_size: usize,
        #[arg(long, default_value_t = 1.0)]
        stretch_mean: f64,
        #[arg(long, default_value_t = 0.001)]
        pe: f64,
        #[arg(long, default_value_t = 0.1)]
        pn: f64,
        /// Allow spontaneous activations while sampling.
        #[arg(long)]
        spontaneous: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Hide activations and measure how well a clock helps recover them.
    Complete {
        #[command(flatten)]
        data: DataArgs,
        /// Clock JSON as written by `detect` or `simulate`.
        #[arg(long)]
        clock: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
        drop_rates: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the improvement of several methods on one dataset.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        /// Methods: dp, greedy, oracle, min, max, aggW, a range aggA..aggB, or
        /// aggmatch (homogeneous with as many intervals as the greedy clock).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "dp,greedy,agg1..agg10,min"
        )]
        compare: Vec<String>,
        #[arg(long, default_value = "contagious_only")]
        policy: NonActivationPolicy,
        /// Optional CSV copy of the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Edge list, `src<TAB>dst` per line.
    graph: PathBuf,
    /// Cascades, `cascade_id<TAB>node<TAB>time` per line.
    cascades: PathBuf,
    #[arg(long, default_value_t = 0.001)]
    pe: f64,
    #[arg(long, default_value_t = 0.1)]
    pn: f64,
    /// Drop ticks without activations before solving.
    #[arg(long)]
    compress: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Dp,
    Greedy,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inner {
    Dp,
    Greedy,
}

struct Data {
    graph: Graph,
    map: NodeMap,
    cascades: CascadeSet,
    params: IcParams,
}

impl DataArgs {
    fn load(&self) -> netclock::Result<Data> {
        let params = IcParams::new(self.pe, self.pn)?;
        let (graph, map) = io::read_edge_list(&self.graph)?;
        let mut cascades = io::read_cascades(&self.cascades, &graph, &map)?;
        if self.compress {
            cascades = cascades.compress_timeline();
        }
        log::info!(
            "{} nodes, {} edges, {} cascades, {} activations, horizon {}",
            graph.node_count(),
            graph.edge_count(),
            cascades.len(),
            cascades.total_activations(),
            cascades.horizon()
        );
        Ok(Data {
            graph,
            map,
            cascades,
            params,
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidParameter(_) => 2,
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => 2,
        _ => 1,
    }
}

fn run(command: Command) -> netclock::Result<()> {
    match command {
        Command::Detect {
            data,
            algo,
            policy,
            insertion_only,
            out,
        } => detect(&data.load()?, algo, policy, !insertion_only, &out),
        Command::DetectK {
            data,
            k,
            inner,
            out,
        } => detect_k(&data.load()?, k as usize, inner, &out),
        Command::Simulate {
            nodes,
            attachment,
            cascades,
            min_size,
            stretch_mean,
            pe,
            pn,
            spontaneous,
            seed,
            out_dir,
        } => {
            let cfg = SimConfig {
                nodes,
                attachment,
                params: IcParams::new(pe, pn)?,
                min_cascade_size: min_size,
                cascade_count: cascades,
                stretch_mean,
                seed,
                spontaneous,
                ..SimConfig::default()
            };
            simulate_to(&cfg, &out_dir)
        }
        Command::Complete {
            data,
            clock,
            drop_rates,
            seed,
            out,
        } => {
            let data = data.load()?;
            let json = io::read_clock_json(&clock)?;
            let clock = json.to_clock(data.cascades.timeline(), data.cascades.horizon())?;
            let rows = completion_batch(&data.graph, &data.cascades, &clock, &drop_rates, seed)?;
            for r in &rows {
                println!(
                    "drop {:.2}: success {:.3} precision {:.3} recall {:.3} f1 {:.3}",
                    r.drop_rate, r.success, r.precision, r.recall, r.f1
                );
            }
            io::write_csv(&out, &rows)
        }
        Command::Eval {
            data,
            compare,
            policy,
            out,
        } => eval(&data.load()?, &compare, policy, out.as_deref()),
    }
}

fn detect(
    data: &Data,
    algo: Algo,
    policy: NonActivationPolicy,
    refine: bool,
    out: &Path,
) -> netclock::Result<()> {
    let (g, cs, p) = (&data.graph, &data.cascades, data.params);
    let started = Instant::now();
    let solution = match algo {
        Algo::Dp => dp::solve_oc_dp(g, cs, p, policy, None)?,
        Algo::Greedy => {
            let index = ScoringIndex::new(g, cs, p, policy);
            greedy::solve_indexed_with(&index, GreedyOptions { refine })?
        }
        Algo::Oracle => oracle::oracle_oc(g, cs, p, policy)?,
    };
    let wall = started.elapsed().as_secs_f64();
    let loglik = total_loglik(g, cs, &solution.clock, p, policy)?;
    let loglik_max = total_loglik(g, cs, &Clock::max(solution.clock.horizon())?, p, policy)?;
    let mut json = ClockJson::new(&solution.clock, cs.timeline(), solution.improvement);
    json.stats = Some(DetectStats {
        algorithm: algo_name(algo).to_owned(),
        policy: policy_name(policy).to_owned(),
        loglik,
        loglik_max,
        interval_count: solution.clock.interval_count(),
        wall_time_secs: wall,
    });
    println!(
        "{} intervals, improvement {:.6} ({:.3}s)",
        solution.clock.interval_count(),
        solution.improvement,
        wall
    );
    io::write_json(out, &json)
}

fn algo_name(algo: Algo) -> &'static str {
    match algo {
        Algo::Dp => "dp",
        Algo::Greedy => "greedy",
        Algo::Oracle => "oracle",
    }
}

fn policy_name(policy: NonActivationPolicy) -> &'static str {
    match policy {
        NonActivationPolicy::None => "none",
        NonActivationPolicy::ContagiousOnly => "contagious_only",
        NonActivationPolicy::Full => "full",
    }
}

fn detect_k(data: &Data, k: usize, inner: Inner, out: &Path) -> netclock::Result<()> {
    let inner = match inner {
        Inner::Dp => InnerSolver::Dp,
        Inner::Greedy => InnerSolver::Greedy,
    };
    let sol = solve_koc(&data.graph, &data.cascades, k, data.params, inner)?;
    for (j, gain) in sol.per_clock_gain.iter().enumerate() {
        let share = if sol.total > 0.0 {
            100.0 * gain / sol.total
        } else {
            0.0
        };
        println!(
            "clock {j}: {} intervals, gain {gain:.6} ({share:.1}%)",
            sol.clocks[j].interval_count()
        );
    }
    let json = ClockSetJson::new(
        &sol.clocks,
        &sol.per_clock_gain,
        sol.total,
        &sol.assignment,
        data.cascades.timeline(),
        &data.map,
    );
    io::write_json(out, &json)
}

fn simulate_to(cfg: &SimConfig, dir: &Path) -> netclock::Result<()> {
    let sim = simulate(cfg)?;
    std::fs::create_dir_all(dir)?;
    let map = NodeMap::identity(sim.graph.node_count());
    io::write_edge_list(&dir.join("graph.tsv"), &sim.graph, &map)?;
    map.write(&dir.join(NODE_MAP_FILE))?;
    io::write_cascades(&dir.join("cascades.tsv"), &sim.original, &map)?;
    io::write_cascades(&dir.join("stretched.tsv"), &sim.stretched, &map)?;
    let hidden = ClockJson::new(&sim.hidden, sim.stretched.timeline(), 0.0);
    io::write_json(&dir.join("hidden_clock.json"), &hidden)?;
    println!(
        "{} nodes, {} edges, {} cascades, {} activations, stretched horizon {}",
        sim.graph.node_count(),
        sim.graph.edge_count(),
        sim.original.len(),
        sim.original.total_activations(),
        sim.stretched.horizon()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct EvalRow {
    method: String,
    improvement: f64,
    ratio_to_best: f64,
    interval_count: usize,
}

fn expand_methods(compare: &[String]) -> netclock::Result<Vec<String>> {
    let mut methods = Vec::new();
    for item in compare {
        if let Some((a, b)) = item.split_once("..") {
            let width = |s: &str| {
                s.strip_prefix("agg")
                    .and_then(|w| w.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("bad range {item:?}")))
            };
            for w in width(a)?..=width(b)? {
                methods.push(format!("agg{w}"));
            }
        } else {
            methods.push(item.clone());
        }
    }
    Ok(methods)
}

fn eval(
    data: &Data,
    compare: &[String],
    policy: NonActivationPolicy,
    out: Option<&Path>,
) -> netclock::Result<()> {
    let (g, cs, p) = (&data.graph, &data.cascades, data.params);
    let horizon = cs.horizon().max(1);
    let mut results = Vec::new();
    for method in expand_methods(compare)? {
        let clock = match method.as_str() {
            "dp" => dp::solve_oc_dp(g, cs, p, policy, None)?.clock,
            "greedy" => greedy::solve_oc_greedy(g, cs, p, policy, None)?.clock,
            "oracle" => oracle::oracle_oc(g, cs, p, policy)?.clock,
            "min" => Clock::min(horizon)?,
            "max" => Clock::max(horizon)?,
            "aggmatch" => {
                let gr = greedy::solve_oc_greedy(g, cs, p, policy, None)?.clock;
                Clock::homogeneous_matching(horizon, gr.interval_count())?
            }
            other => match other.strip_prefix("agg").and_then(|w| w.parse().ok()) {
                Some(w) => Clock::homogeneous(horizon, w)?,
                None => return Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
            },
        };
        let value = improvement(g, cs, &clock, p, policy)?;
        results.push((method, value, clock.interval_count()));
    }
    let best = results
        .iter()
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let rows: Vec<EvalRow> = results
        .into_iter()
        .map(|(method, value, intervals)| EvalRow {
            method,
            improvement: value,
            ratio_to_best: if best > 0.0 { value / best } else { 1.0 },
            interval_count: intervals,
        })
        .collect();
    println!(
        "{:<10} {:>16} {:>8} {:>10}",
        "method", "improvement", "ratio", "intervals"
    );
    for r in &rows {
        println!(
            "{:<10} {:>16.6} {:>8.4} {:>10}",
            r.method, r.improvement, r.ratio_to_best, r.interval_count
        );
    }
    if let Some(path) = out {
        io::write_csv(path, &rows)?;
    }
    Ok(())
}
