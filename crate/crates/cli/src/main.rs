//! `ircolor` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ircolor::driver::{incremental_reoptimize, DriverOptions};
use ircolor::harness::{self, ExperimentConfig, OrderStrategy, StartPolicy};
use ircolor::optimizer::DEFAULT_BUDGET;
use ircolor::rng;
use ircolor::traversal::EdgeOrder;
use ircolor::walk::{self, RandomWalkSpec, Reflection};
use ircolor::{Algorithm, Graph, GraphFamily, OptimizerConfig};

/// Exit code for a `run` that hit the generation budget.
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "ircolor", version, about = "Incremental reoptimization of graph 2-colorings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list
    Generate {
        /// Family spec, e.g. `path:16`, `depth-k-star:19:3`, `toroid:8`
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit an edge insertion order
    Order {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, default_value = "bfs")]
        kind: String,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one incremental reoptimization and print its statistics
    Run {
        #[command(flatten)]
        graph: GraphSource,
        /// Order strategy; ignored when --order-file is given
        #[arg(long, default_value = "bfs")]
        order: String,
        /// Order produced by `ircolor order`
        #[arg(long)]
        order_file: Option<PathBuf>,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long, default_value = "generic-rls")]
        algorithm: String,
        #[arg(long, default_value_t = 1, conflicts_with = "lambda_star")]
        lambda: usize,
        /// Use lambda* derived from the graph and the order strategy
        #[arg(long)]
        lambda_star: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        continue_on_timeout: bool,
        /// Per-insertion CSV instead of JSON
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a JSON config; writes CSV and JSON summary
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        continue_on_timeout: bool,
        /// Output prefix; writes `<out>.csv` and `<out>.json`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-walk hitting-time checks
    Walk {
        #[command(subcommand)]
        check: WalkCheck,
    },
    /// Fit a log-log growth exponent of evaluations against n on a sweep CSV
    Fit { csv: PathBuf },
}

#[derive(Args)]
struct GraphSource {
    /// Family spec, e.g. `path:16`
    #[arg(long, required_unless_present = "graph")]
    family: Option<String>,
    /// Edge-list file
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
}

impl GraphSource {
    fn load(&self) -> anyhow::Result<Graph> {
        match (&self.family, &self.graph) {
            (Some(spec), _) => Ok(Graph::generate(GraphFamily::parse_spec(spec)?)?),
            (None, Some(path)) => Ok(Graph::parse_edge_list(&read(path)?)?),
            (None, None) => bail!("one of --family or --graph is required"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReflectionArg {
    Barrier,
    Bounce,
    Sticky,
}

impl From<ReflectionArg> for Reflection {
    fn from(r: ReflectionArg) -> Self {
        match r {
            ReflectionArg::Barrier => Reflection::Barrier,
            ReflectionArg::Bounce => Reflection::Bounce,
            ReflectionArg::Sticky => Reflection::Sticky,
        }
    }
}

#[derive(Subcommand)]
enum WalkCheck {
    /// Exact expected absorption times against the closed forms
    Exact {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, value_enum, default_value = "barrier")]
        reflection: ReflectionArg,
        /// Absorb at both 0 and k
        #[arg(long)]
        two_sided: bool,
    },
    /// Minimum of eta lockstep walks started in state 1
    Eta {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tail bound Pr[T >= 2 r k^2] <= 2^-r
    Tail {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn start_policy(start: Option<usize>) -> StartPolicy {
    start.map_or(StartPolicy::Random, StartPolicy::Fixed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate { family, out } => {
            let g = Graph::generate(GraphFamily::parse_spec(&family)?)?;
            emit(out.as_deref(), &g.to_edge_list())?;
        }
        Command::Order {
            graph,
            kind,
            start,
            seed,
            out,
        } => {
            let g = graph.load()?;
            let order = OrderStrategy::parse(&kind)?.build(&g, start_policy(start), seed)?;
            emit(out.as_deref(), &format!("{}\n", order.to_line()))?;
        }
        Command::Run {
            graph,
            order,
            order_file,
            start,
            algorithm,
            lambda,
            lambda_star,
            seed,
            budget,
            continue_on_timeout,
            csv,
            out,
        } => {
            let g = graph.load()?;
            let strategy = OrderStrategy::parse(&order)?;
            let order = match order_file {
                Some(path) => {
                    let order = EdgeOrder::parse_line(read(&path)?.trim())?;
                    order.validate(&g)?;
                    order
                }
                None => strategy.build(&g, start_policy(start), seed)?,
            };
            let lambda = if lambda_star {
                harness::lambda_star_for(&g, strategy)?
            } else {
                lambda
            };
            let config = OptimizerConfig::new(algorithm.parse::<Algorithm>()?, lambda, seed)?;
            let options = DriverOptions {
                budget,
                continue_on_timeout,
            };
            let (stats, _) = incremental_reoptimize(&g, &order, &config, &options)?;
            let text = if csv { stats.to_csv() } else { format!("{}\n", stats.to_json()?) };
            emit(out.as_deref(), &text)?;
            if stats.totals.timeouts > 0 && !continue_on_timeout {
                eprintln!("timeout: generation budget {budget} exhausted");
                return Ok(ExitCode::from(EXIT_TIMEOUT));
            }
        }
        Command::Sweep {
            config,
            seed,
            budget,
            reps,
            continue_on_timeout,
            out,
        } => {
            let mut cfg = ExperimentConfig::from_json(&read(&config)?)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(budget) = budget {
                cfg.budget = budget;
            }
            if let Some(reps) = reps {
                cfg.repetitions = reps;
            }
            cfg.continue_on_timeout |= continue_on_timeout;
            if let Some(prefix) = out {
                cfg.csv_out = Some(prefix.with_extension("csv"));
                cfg.json_out = Some(prefix.with_extension("json"));
            }
            cfg.validate()?;
            let result = harness::run_sweep(&cfg)?;
            match &cfg.csv_out {
                Some(path) => emit(Some(path), &result.to_csv())?,
                None => emit(None, &result.to_csv())?,
            }
            if let Some(path) = &cfg.json_out {
                emit(Some(path), &result.summary_json()?)?;
            }
            eprint!("{}", harness::format_summaries(&result.summaries));
            if let Ok(fit) = result.fit_evaluations() {
                eprintln!("fitted exponent of mean evaluations vs n: {:.3}", fit.slope);
            }
        }
        Command::Walk { check } => walk_check(check)?,
        Command::Fit { csv } => {
            let (points, fit) = harness::fit_csv(&read(&csv)?)?;
            let report = serde_json::json!({
                "points": points,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "residual": fit.residual,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn walk_check(check: WalkCheck) -> anyhow::Result<()> {
    match check {
        WalkCheck::Exact {
            k,
            p,
            reflection,
            two_sided,
        } => {
            println!("x0 exact closed_form rel_error");
            let base = if two_sided {
                RandomWalkSpec::two_sided(k, 0, p)
            } else {
                RandomWalkSpec::reflecting(k, 0, p).with_reflection(reflection.into())
            };
            let exact = walk::exact_hitting_times(&base)?;
            for (x0, &e) in exact.iter().enumerate() {
                let spec = RandomWalkSpec { x0, ..base };
                let closed = if two_sided {
                    walk::expected_two_sided_closed_form(&spec)?
                } else {
                    walk::expected_absorption_closed_form(&spec)?
                };
                let rel = if closed == 0.0 { e.abs() } else { ((e - closed) / closed).abs() };
                println!("{x0} {e:.6} {closed:.6} {rel:.2e}");
            }
        }
        WalkCheck::Eta { k, eta, samples, seed } => {
            let stats = walk::simulate_min_of_eta(k, eta, samples, &mut rng::seeded(seed))?;
            println!(
                "{}",
                serde_json::json!({"k": k, "eta": eta, "samples": samples, "mean": stats.mean,
                                   "variance": stats.variance, "std_error": stats.std_error})
            );
        }
        WalkCheck::Tail { k, r, samples, seed } => {
            let check = walk::check_tail_bound(k, r, samples, &mut rng::seeded(seed))?;
            println!("{}", serde_json::to_string(&check)?);
            if !check.passed {
                bail!("tail bound violated");
            }
        }
    }
    Ok(())
}
