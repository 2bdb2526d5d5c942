//! Parameter sweeps over graph families, repeated seeded runs, and
//! log-log exponent fits of the measured costs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{incremental_reoptimize, DriverOptions};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphFamily};
use crate::optimizer::{Algorithm, OptimizerConfig, DEFAULT_BUDGET};
use crate::rng;
use crate::traversal::{self, DfsMode, EdgeOrder};

/// Stream id reserved for order generation, disjoint from island streams.
const ORDER_STREAM: u64 = u64::MAX;

pub const CSV_HEADER: &str = "family,n,m,order,algorithm,lambda,seed,evaluations,generations,timeouts";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStrategy {
    Bfs,
    Dfs,
    DfsGreedy,
    Generic,
    WorstCase,
    Random,
}

impl OrderStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderStrategy::Bfs => "bfs",
            OrderStrategy::Dfs => "dfs",
            OrderStrategy::DfsGreedy => "dfs-greedy",
            OrderStrategy::Generic => "generic",
            OrderStrategy::WorstCase => "worst-case",
            OrderStrategy::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "bfs" => OrderStrategy::Bfs,
            "dfs" => OrderStrategy::Dfs,
            "dfs-greedy" => OrderStrategy::DfsGreedy,
            "generic" => OrderStrategy::Generic,
            "worst-case" => OrderStrategy::WorstCase,
            "random" => OrderStrategy::Random,
            other => return Err(Error::Parse(format!("unknown order {other:?}"))),
        })
    }

    pub fn is_traversal(&self) -> bool {
        !matches!(self, OrderStrategy::WorstCase | OrderStrategy::Random)
    }

    /// Builds an order for `g`; the returned order records `seed`.
    pub fn build(&self, g: &Graph, start: StartPolicy, seed: u64) -> Result<EdgeOrder> {
        let mut rng = rng::stream(seed, ORDER_STREAM);
        let start = match start {
            StartPolicy::Random => None,
            StartPolicy::Fixed(v) => Some(v),
        };
        let order = match self {
            OrderStrategy::Bfs => traversal::bfs_order(g, start, &mut rng)?,
            OrderStrategy::Dfs => traversal::dfs_order(g, start, DfsMode::Scan, &mut rng)?,
            OrderStrategy::DfsGreedy => traversal::dfs_order(g, start, DfsMode::DepthGreedy, &mut rng)?,
            OrderStrategy::Generic => traversal::generic_traversal_order(g, &mut rng)?,
            OrderStrategy::WorstCase => traversal::worst_case_order(g)?,
            OrderStrategy::Random => traversal::random_order(g, &mut rng),
        };
        Ok(order.with_seed(seed))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartPolicy {
    #[default]
    Random,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaRule {
    Fixed(usize),
    /// `λ* = max(⌈log2(L n / m)⌉, 1)` with `L` the diameter for BFS orders
    /// and the longest path otherwise.
    Star,
}

impl Default for LambdaRule {
    fn default() -> Self {
        LambdaRule::Fixed(1)
    }
}

fn default_repetitions() -> usize {
    100
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: Vec<GraphFamily>,
    pub order: OrderStrategy,
    #[serde(default)]
    pub start: StartPolicy,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub lambda: LambdaRule,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub continue_on_timeout: bool,
    #[serde(default)]
    pub csv_out: Option<PathBuf>,
    #[serde(default)]
    pub json_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(grid: Vec<GraphFamily>, order: OrderStrategy, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            grid,
            order,
            start: StartPolicy::Random,
            algorithm,
            lambda: LambdaRule::default(),
            repetitions: default_repetitions(),
            seed: 0,
            budget: DEFAULT_BUDGET,
            continue_on_timeout: false,
            csv_out: None,
            json_out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("grid must not be empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if let LambdaRule::Fixed(0) = self.lambda {
            return Err(Error::Config("lambda must be >= 1".into()));
        }
        for f in &self.grid {
            f.validate()?;
            if self.order == OrderStrategy::WorstCase && !matches!(f, GraphFamily::WorstCaseTree { .. }) {
                return Err(Error::Config(format!(
                    "worst-case order needs the worst-case tree, got {}",
                    f.name()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `max(⌈log2(L n / m)⌉, 1)`, computed exactly in integers.
pub fn lambda_star(l: u64, n: u64, m: u64) -> Result<usize> {
    if l == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidParameters("lambda* needs L, n, m >= 1".into()));
    }
    let target = l as u128 * n as u128;
    let mut lambda = 0usize;
    while (m as u128) << lambda < target {
        lambda += 1;
    }
    Ok(lambda.max(1))
}

/// One repetition: a CSV row plus a few extra measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub grid_index: usize,
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub order: String,
    pub algorithm: String,
    pub lambda: usize,
    pub seed: u64,
    pub evaluations: u64,
    pub generations: u64,
    pub timeouts: u64,
    /// Generations spent on insertions that introduced a conflict.
    pub repair_generations: u64,
    pub conflicts_introduced: usize,
    pub final_proper: bool,
}

impl RepetitionResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.m,
            self.order,
            self.algorithm,
            self.lambda,
            self.seed,
            self.evaluations,
            self.generations,
            self.timeouts
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub params: GraphFamily,
    pub n: usize,
    pub m: usize,
    pub lambda: usize,
    pub repetitions: usize,
    pub mean_evaluations: f64,
    pub median_evaluations: f64,
    pub stddev_evaluations: f64,
    pub mean_generations: f64,
    pub mean_repair_generations: f64,
    pub mean_conflicts_introduced: f64,
    pub timeout_fraction: f64,
    pub proper_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub repetitions: Vec<RepetitionResult>,
    pub summaries: Vec<GridSummary>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.repetitions {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a ExperimentConfig,
            summaries: &'a [GridSummary],
        }
        Ok(serde_json::to_string_pretty(&Summary {
            config: &self.config,
            summaries: &self.summaries,
        })?)
    }

    /// Exponent of mean evaluations against `n` across the grid.
    pub fn fit_evaluations(&self) -> Result<ExponentFit> {
        let xs: Vec<f64> = self.summaries.iter().map(|s| s.n as f64).collect();
        let ys: Vec<f64> = self.summaries.iter().map(|s| s.mean_evaluations).collect();
        fit_exponent(&xs, &ys)
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn resolve_lambda(cfg: &ExperimentConfig, g: &Graph) -> Result<usize> {
    match cfg.lambda {
        LambdaRule::Fixed(l) => Ok(l),
        LambdaRule::Star => lambda_star_for(g, cfg.order),
    }
}

/// `λ*` for `g` under `order`: `L` is the diameter for BFS, else the
/// longest path.
pub fn lambda_star_for(g: &Graph, order: OrderStrategy) -> Result<usize> {
    let metrics = g.metrics()?;
    let l = if order == OrderStrategy::Bfs {
        metrics.diameter
    } else {
        metrics.longest_path
    };
    lambda_star(l.max(1) as u64, g.n() as u64, g.m().max(1) as u64)
}

fn run_one(cfg: &ExperimentConfig, g: &Graph, grid_index: usize, lambda: usize, seed: u64) -> Result<RepetitionResult> {
    let order = cfg.order.build(g, cfg.start, seed)?;
    let opt = OptimizerConfig::new(cfg.algorithm, lambda, seed)?;
    let opts = DriverOptions {
        budget: cfg.budget,
        continue_on_timeout: cfg.continue_on_timeout,
    };
    let (stats, state) = incremental_reoptimize(g, &order, &opt, &opts)?;
    Ok(RepetitionResult {
        grid_index,
        family: g.family().map(|f| f.name()).unwrap_or("custom").to_string(),
        n: g.n(),
        m: g.m(),
        order: cfg.order.as_str().to_string(),
        algorithm: cfg.algorithm.as_str().to_string(),
        lambda,
        seed,
        evaluations: stats.totals.evaluations,
        generations: stats.totals.generations,
        timeouts: stats.totals.timeouts,
        repair_generations: stats.repair_generations(),
        conflicts_introduced: stats.conflicts_introduced(),
        final_proper: stats.completed && state.is_proper(),
    })
}

/// Runs `repetitions` seeded runs per grid point. Repetitions may execute
/// in parallel; results are always in (grid, repetition) order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let graphs = cfg
        .grid
        .iter()
        .map(|&f| {
            let g = Graph::generate(f)?;
            let lambda = resolve_lambda(cfg, &g)?;
            Ok((g, lambda))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|gi| (0..cfg.repetitions).map(move |r| (gi, r)))
        .collect();
    let repetitions = jobs
        .par_iter()
        .map(|&(gi, rep)| {
            let (g, lambda) = &graphs[gi];
            run_one(cfg, g, gi, *lambda, rng::derive_seed(cfg.seed, gi as u64, rep as u64))
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries = graphs
        .iter()
        .enumerate()
        .map(|(gi, (g, lambda))| {
            let reps: Vec<&RepetitionResult> = repetitions.iter().filter(|r| r.grid_index == gi).collect();
            let count = reps.len() as f64;
            let mut evals: Vec<f64> = reps.iter().map(|r| r.evaluations as f64).collect();
            evals.sort_by(f64::total_cmp);
            let mean = evals.iter().sum::<f64>() / count;
            let var = if reps.len() > 1 {
                evals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            let avg = |f: &dyn Fn(&RepetitionResult) -> f64| reps.iter().map(|r| f(r)).sum::<f64>() / count;
            GridSummary {
                params: cfg.grid[gi],
                n: g.n(),
                m: g.m(),
                lambda: *lambda,
                repetitions: reps.len(),
                mean_evaluations: mean,
                median_evaluations: median(&evals),
                stddev_evaluations: var.sqrt(),
                mean_generations: avg(&|r| r.generations as f64),
                mean_repair_generations: avg(&|r| r.repair_generations as f64),
                mean_conflicts_introduced: avg(&|r| r.conflicts_introduced as f64),
                timeout_fraction: avg(&|r| (r.timeouts > 0) as u8 as f64),
                proper_fraction: avg(&|r| r.final_proper as u8 as f64),
            }
        })
        .collect();

    Ok(SweepResult {
        config: cfg.clone(),
        repetitions,
        summaries,
    })
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

impl ExponentFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameters("x and y lengths differ".into()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidParameters(format!("need >= 3 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| v.is_nan() || v <= 0.0 || v.is_infinite()) {
        return Err(Error::InvalidParameters("fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept) = least_squares(&lx, &ly)?;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (sse / lx.len() as f64).sqrt(),
    })
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(Error::InvalidParameters("degenerate grid: all x equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Reads a sweep CSV, averages `evaluations` per distinct `n` and fits the
/// exponent.
pub fn fit_csv(text: &str) -> Result<(Vec<(f64, f64)>, ExponentFit)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("CSV lacks column {name:?}")))
    };
    let (ni, ei) = (col("n")?, col("evaluations")?);
    let mut groups: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .ok_or_else(|| Error::Parse(format!("short CSV row {line:?}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{line:?}: {e}")))
        };
        let entry = groups.entry(parse(ni)? as u64).or_insert((0.0, 0));
        entry.0 += parse(ei)?;
        entry.1 += 1;
    }
    let points: Vec<(f64, f64)> = groups
        .into_iter()
        .map(|(n, (sum, count))| (n as f64, sum / count as f64))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let fit = fit_exponent(&xs, &ys)?;
    Ok((points, fit))
}

/// Human-readable table of grid summaries.
pub fn format_summaries(summaries: &[GridSummary]) -> String {
    let mut out = String::from("family               n        m   lambda   mean_evals      median     timeouts\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<18} {:>4} {:>8} {:>8} {:>12.1} {:>11.1} {:>12.3}",
            s.params.name(),
            s.n,
            s.m,
            s.lambda,
            s.mean_evaluations,
            s.median_evaluations,
            s.timeout_fraction
        );
    }
    out
}
