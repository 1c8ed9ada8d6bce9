use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use simlink::channel::PhaseConfig;
use simlink::config::default_scenario;
use simlink::optimizer::{run_algorithm, Algorithm};
use simlink::LinkScenario;
use simlink_cli::table::fmt_f64;
use simlink_cli::{
    delay_surface, delay_tail, emit_outputs, linspace, run_sweep, surface_table, tail_table, Manifest, SweepSpec, Table,
    QUOTED_RATES,
};

#[derive(Parser)]
#[command(name = "simlink", version, about = "Stacked-metasurface link experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dotted override such as `num_streams=5` or `options.los_mode=spherical`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Base seed; defaults to the scenario's `rng_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    reps: Option<usize>,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Larger runs: 10 replications of 50 iterations.
    #[arg(long, global = true)]
    full_scale: bool,
    #[arg(long, global = true, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Subcommand)]
enum Command {
    /// Final and mean rate of BCD and AO over a swept parameter.
    RateSweep {
        /// `streams`, `atoms`, `layers` or any dotted scenario key.
        #[arg(long, default_value = "streams")]
        param: String,
        /// Comma-separated values; defaults depend on the parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "bcd,ao")]
        algorithms: Vec<String>,
    },
    /// Total-delay bound over a grid of thresholds and packet sizes.
    DelaySurface {
        /// `S:v_data` pairs.
        #[arg(long, value_delimiter = ',')]
        rates: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 12)]
        t_points: usize,
        #[arg(long, default_value_t = 1e7)]
        l_min: f64,
        #[arg(long, default_value_t = 1.5e8)]
        l_max: f64,
        #[arg(long, default_value_t = 15)]
        l_points: usize,
    },
    /// Analytic queueing bound against a simulated FIFO queue.
    DelayTail {
        #[arg(long, default_value_t = 40.96)]
        v_data: f64,
        #[arg(long, default_value_t = 100_000)]
        departures: usize,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// One seed, both algorithms, full traces and final phases.
    SingleRun,
}

struct Effective {
    scenario: LinkScenario,
    seed: u64,
    reps: usize,
    iterations: usize,
}

fn load(common: &Common) -> Result<Effective, String> {
    let base = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            LinkScenario::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => default_scenario(),
    };
    let mut scenario = base.with_overrides(&common.overrides).map_err(|e| e.to_string())?;
    if let Some(seed) = common.seed {
        scenario.rng_seed = seed;
    }
    let scenario = scenario.validated().map_err(|e| e.to_string())?;
    for w in scenario.warnings() {
        eprintln!("warning: {w}");
    }
    let (reps, iterations) = if common.full_scale { (10, 50) } else { (5, 20) };
    Ok(Effective {
        seed: scenario.rng_seed,
        scenario,
        reps: common.reps.unwrap_or(reps),
        iterations: common.iterations.unwrap_or(iterations),
    })
}

fn parse_algorithm(name: &str) -> Result<Algorithm, String> {
    match name.to_ascii_lowercase().as_str() {
        "bcd" => Ok(Algorithm::Bcd),
        "ao" => Ok(Algorithm::Ao),
        other => Err(format!("unknown algorithm `{other}`")),
    }
}

fn default_values(param: &str) -> Vec<String> {
    let v: &[&str] = match param {
        "streams" | "S" | "num_streams" => &["1", "2", "3", "4", "5"],
        "atoms" | "M" => &["9", "16", "25", "36"],
        "layers" | "L" => &["2", "3", "4", "5"],
        _ => &[],
    };
    v.iter().map(|s| s.to_string()).collect()
}

fn parse_rates(items: &[String]) -> Result<Vec<(usize, f64)>, String> {
    if items.is_empty() {
        return Ok(QUOTED_RATES.to_vec());
    }
    items
        .iter()
        .map(|item| {
            let (s, v) = item.split_once(':').ok_or_else(|| format!("rate `{item}` is not S:v_data"))?;
            let s = s.trim().parse().map_err(|_| format!("bad stream count in `{item}`"))?;
            let v = v.trim().parse().map_err(|_| format!("bad rate in `{item}`"))?;
            Ok((s, v))
        })
        .collect()
}

fn phases_table(p: &PhaseConfig) -> Table {
    let mut t = Table::new(&["side", "layer", "atom", "phase_rad"]);
    for (side, layers) in [("TX", &p.tx), ("RX", &p.rx)] {
        for (l, layer) in layers.iter().enumerate() {
            for (a, &theta) in layer.iter().enumerate() {
                t.push(vec![side.into(), (l + 1).to_string(), (a + 1).to_string(), fmt_f64(theta)]);
            }
        }
    }
    t
}

fn run(cli: Cli) -> Result<(), String> {
    let started = Instant::now();
    let eff = load(&cli.common)?;
    let workers = cli.common.workers.max(1);
    let out = &cli.common.out;
    let written = match cli.command {
        Command::RateSweep {
            param,
            values,
            algorithms,
        } => {
            let values = if values.is_empty() { default_values(&param) } else { values };
            let algorithms = algorithms.iter().map(|a| parse_algorithm(a)).collect::<Result<Vec<_>, _>>()?;
            let spec = SweepSpec {
                parameter: param,
                values,
                replications: eff.reps,
                iterations: eff.iterations,
                algorithms,
                base: eff.scenario.clone(),
                base_seed: eff.seed,
            };
            spec.validate().map_err(|e| e.to_string())?;
            let result = run_sweep(&spec, workers).map_err(|e| e.to_string())?;
            let seeds = (0..spec.values.len())
                .flat_map(|v| (0..spec.replications).map(move |r| (v, r)))
                .map(|(v, r)| spec.cell_seed(v, r))
                .collect();
            let manifest = Manifest::new("rate-sweep", &eff.scenario, eff.seed, seeds, workers, started.elapsed().as_secs_f64());
            emit_outputs(out, &[("rate_sweep", &result.table())], Some(&result.timings()), manifest)
        }
        Command::DelaySurface {
            rates,
            t_min,
            t_max,
            t_points,
            l_min,
            l_max,
            l_points,
        } => {
            let rates = parse_rates(&rates)?;
            let cells = delay_surface(
                &eff.scenario,
                &rates,
                &linspace(t_min, t_max, t_points),
                &linspace(l_min, l_max, l_points),
            )
            .map_err(|e| e.to_string())?;
            let manifest = Manifest::new("delay-surface", &eff.scenario, eff.seed, vec![], workers, started.elapsed().as_secs_f64());
            emit_outputs(out, &[("delay_surface", &surface_table(&cells))], None, manifest)
        }
        Command::DelayTail {
            v_data,
            departures,
            t_max,
            points,
        } => {
            let (rows, _) = delay_tail(&eff.scenario, v_data, &linspace(0.0, t_max, points), departures, eff.seed)
                .map_err(|e| e.to_string())?;
            let manifest = Manifest::new("delay-tail", &eff.scenario, eff.seed, vec![eff.seed], workers, started.elapsed().as_secs_f64());
            emit_outputs(out, &[("delay_tail", &tail_table(&rows))], None, manifest)
        }
        Command::SingleRun => {
            let bcd = run_algorithm(Algorithm::Bcd, &eff.scenario, eff.iterations, eff.seed).map_err(|e| e.to_string())?;
            let ao = run_algorithm(Algorithm::Ao, &eff.scenario, eff.iterations, eff.seed).map_err(|e| e.to_string())?;
            let mut timings = Table::new(&["algorithm", "runtime_s"]);
            for o in [&bcd, &ao] {
                timings.push(vec![o.trace.algorithm.label().into(), format!("{:.6}", o.trace.wall_time_s())]);
            }
            println!(
                "BCD {:.4} bit/s/Hz, AO {:.4} bit/s/Hz after {} iterations",
                bcd.trace.final_v_data(),
                ao.trace.final_v_data(),
                eff.iterations
            );
            let manifest = Manifest::new("single-run", &eff.scenario, eff.seed, vec![eff.seed], 1, started.elapsed().as_secs_f64());
            emit_outputs(
                out,
                &[
                    ("trace_bcd", &Table::from_text(&bcd.trace.to_table())),
                    ("trace_ao", &Table::from_text(&ao.trace.to_table())),
                    ("phases_bcd", &phases_table(&bcd.phases)),
                    ("phases_ao", &phases_table(&ao.phases)),
                ],
                Some(&timings),
                manifest,
            )
        }
    }
    .map_err(|e| e.to_string())?;
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
