//! Randomized local search variants used to repair a coloring after an
//! edge insertion.
//!
//! All variants are elitist: a mutation is kept iff it does not increase the
//! number of conflicts. Evaluation accounting lives here: one evaluation per
//! RLS step, λ per (1+λ) generation and λ per island-model generation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::{Coloring, ColoringState, PrefixGraph};
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

/// Default per-insertion budget in generations.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Flip a uniformly random vertex.
    GenericRls,
    /// Flip a uniformly random conflicting vertex.
    TailoredRls,
    /// λ tailored offspring per generation, best one competes with the parent.
    OnePlusLambda,
    /// λ independent tailored RLS islands with complete migration topology.
    IslandModel,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::GenericRls => "generic-rls",
            Algorithm::TailoredRls => "tailored-rls",
            Algorithm::OnePlusLambda => "one-plus-lambda",
            Algorithm::IslandModel => "island-model",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "generic-rls" => Algorithm::GenericRls,
            "tailored-rls" => Algorithm::TailoredRls,
            "one-plus-lambda" => Algorithm::OnePlusLambda,
            "island-model" => Algorithm::IslandModel,
            other => return Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Offspring count or island count; ignored by the plain RLS variants.
    pub lambda: usize,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, lambda: usize, seed: u64) -> Result<Self> {
        let cfg = OptimizerConfig {
            algorithm,
            lambda,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::Config("lambda must be >= 1".into()));
        }
        Ok(())
    }

    /// Evaluations charged per generation.
    pub fn evaluations_per_generation(&self) -> u64 {
        match self.algorithm {
            Algorithm::GenericRls | Algorithm::TailoredRls => 1,
            Algorithm::OnePlusLambda | Algorithm::IslandModel => self.lambda as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Proper,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub generations: u64,
    pub evaluations: u64,
}

impl SolveOutcome {
    fn already_proper() -> Self {
        SolveOutcome {
            status: SolveStatus::Proper,
            generations: 0,
            evaluations: 0,
        }
    }
}

#[inline]
fn generic_raw<R: Rng + ?Sized>(prefix: &PrefixGraph, c: &mut Coloring, rng: &mut R) -> bool {
    let v = rng::index(rng, prefix.n());
    if c.flip_delta(prefix, v) <= 0 {
        c.apply_flip(prefix, v);
        true
    } else {
        false
    }
}

#[inline]
fn tailored_raw<R: Rng + ?Sized>(prefix: &PrefixGraph, c: &mut Coloring, rng: &mut R) -> bool {
    let v = c
        .random_conflicting(rng)
        .expect("tailored step requires a conflict");
    if c.flip_delta(prefix, v) <= 0 {
        c.apply_flip(prefix, v);
        true
    } else {
        false
    }
}

fn one_plus_lambda_raw<R: Rng + ?Sized>(
    prefix: &PrefixGraph,
    c: &mut Coloring,
    lambda: usize,
    rng: &mut R,
) -> bool {
    let mut best_vertex = usize::MAX;
    let mut best_delta = i64::MAX;
    let mut ties = 0u32;
    for _ in 0..lambda {
        let v = c
            .random_conflicting(rng)
            .expect("(1+lambda) step requires a conflict");
        let d = c.flip_delta(prefix, v);
        if d < best_delta {
            best_delta = d;
            best_vertex = v;
            ties = 1;
        } else if d == best_delta {
            // reservoir sampling: uniform among equally good offspring
            ties += 1;
            if rng::index(rng, ties as usize) == 0 {
                best_vertex = v;
            }
        }
    }
    if best_delta <= 0 {
        c.apply_flip(prefix, best_vertex);
        true
    } else {
        false
    }
}

/// One generic RLS step; returns whether the offspring was accepted.
pub fn generic_rls_step<R: Rng + ?Sized>(state: &mut ColoringState, rng: &mut R) -> bool {
    state.add_evaluations(1);
    let (prefix, c) = state.parts_mut();
    generic_raw(prefix, c, rng)
}

/// One tailored RLS step. Fails if the coloring has no conflict.
pub fn tailored_rls_step<R: Rng + ?Sized>(state: &mut ColoringState, rng: &mut R) -> Result<bool> {
    if state.is_proper() {
        return Err(Error::NoConflict);
    }
    state.add_evaluations(1);
    let (prefix, c) = state.parts_mut();
    Ok(tailored_raw(prefix, c, rng))
}

/// One generation of tailored (1+λ) RLS. Fails if the coloring has no conflict.
pub fn one_plus_lambda_step<R: Rng + ?Sized>(
    state: &mut ColoringState,
    lambda: usize,
    rng: &mut R,
) -> Result<bool> {
    if lambda == 0 {
        return Err(Error::Config("lambda must be >= 1".into()));
    }
    if state.is_proper() {
        return Err(Error::NoConflict);
    }
    state.add_evaluations(lambda as u64);
    let (prefix, c) = state.parts_mut();
    Ok(one_plus_lambda_raw(prefix, c, lambda, rng))
}

fn run_until_proper<R, F>(state: &mut ColoringState, budget: u64, per_gen: u64, rng: &mut R, mut step: F) -> SolveOutcome
where
    R: Rng + ?Sized,
    F: FnMut(&PrefixGraph, &mut Coloring, &mut R) -> bool,
{
    let (prefix, c) = state.parts_mut();
    let mut generations = 0;
    while !c.is_proper() && generations < budget {
        step(prefix, c, rng);
        generations += 1;
    }
    let status = if c.is_proper() {
        SolveStatus::Proper
    } else {
        SolveStatus::BudgetExhausted
    };
    let evaluations = generations * per_gen;
    state.add_evaluations(evaluations);
    SolveOutcome {
        status,
        generations,
        evaluations,
    }
}

/// Runs generic RLS until the coloring is proper or `budget` steps elapse.
pub fn generic_rls_solve<R: Rng + ?Sized>(state: &mut ColoringState, budget: u64, rng: &mut R) -> SolveOutcome {
    run_until_proper(state, budget, 1, rng, |p, c, r| generic_raw(p, c, r))
}

pub fn tailored_rls_solve<R: Rng + ?Sized>(state: &mut ColoringState, budget: u64, rng: &mut R) -> SolveOutcome {
    run_until_proper(state, budget, 1, rng, |p, c, r| tailored_raw(p, c, r))
}

pub fn one_plus_lambda_solve<R: Rng + ?Sized>(
    state: &mut ColoringState,
    lambda: usize,
    budget: u64,
    rng: &mut R,
) -> SolveOutcome {
    assert!(lambda >= 1, "lambda must be >= 1");
    run_until_proper(state, budget, lambda as u64, rng, |p, c, r| {
        one_plus_lambda_raw(p, c, lambda, r)
    })
}

/// Runs one island per generator in `streams`, all starting from `start`.
///
/// Every generation each island takes one tailored RLS step. After the
/// generation, if any island is proper, the lowest-indexed proper island is
/// copied to all islands. On budget exhaustion the islands are returned
/// as they are.
pub fn run_islands<R: Rng>(
    prefix: &PrefixGraph,
    start: &Coloring,
    streams: &mut [R],
    budget: u64,
) -> (SolveOutcome, Vec<Coloring>) {
    let lambda = streams.len();
    assert!(lambda >= 1, "island model needs at least one island");
    let mut islands = vec![start.clone(); lambda];
    if start.is_proper() {
        return (SolveOutcome::already_proper(), islands);
    }
    let mut generations = 0;
    while generations < budget {
        for (island, rng) in islands.iter_mut().zip(streams.iter_mut()) {
            tailored_raw(prefix, island, rng);
        }
        generations += 1;
        if let Some(winner) = islands.iter().position(Coloring::is_proper) {
            let best = islands[winner].clone();
            for island in &mut islands {
                island.clone_from(&best);
            }
            let outcome = SolveOutcome {
                status: SolveStatus::Proper,
                generations,
                evaluations: generations * lambda as u64,
            };
            return (outcome, islands);
        }
    }
    let outcome = SolveOutcome {
        status: SolveStatus::BudgetExhausted,
        generations,
        evaluations: generations * lambda as u64,
    };
    (outcome, islands)
}

/// Island model on `state`. On success the shared proper coloring is
/// written back; on budget exhaustion the island with the fewest conflicts
/// (lowest index on ties) is written back.
pub fn island_solve<R: Rng>(state: &mut ColoringState, streams: &mut [R], budget: u64) -> SolveOutcome {
    let (outcome, islands) = run_islands(state.prefix(), state.coloring(), streams, budget);
    if outcome.generations > 0 {
        let best = islands
            .into_iter()
            .enumerate()
            .min_by_key(|(i, c)| (c.conflict_count(), *i))
            .map(|(_, c)| c)
            .expect("at least one island");
        state.set_coloring(best);
    }
    state.add_evaluations(outcome.evaluations);
    outcome
}

/// An optimizer with its own seeded generators: stream 0 drives the plain
/// variants, streams `1..=λ` drive the islands.
#[derive(Clone, Debug)]
pub struct Optimizer {
    config: OptimizerConfig,
    main: SimRng,
    islands: Vec<SimRng>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let islands = match config.algorithm {
            Algorithm::IslandModel => (1..=config.lambda as u64)
                .map(|i| rng::stream(config.seed, i))
                .collect(),
            _ => Vec::new(),
        };
        Ok(Optimizer {
            config,
            main: rng::seeded(config.seed),
            islands,
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    /// The stream-0 generator, also used for the initial coloring.
    pub fn main_rng(&mut self) -> &mut SimRng {
        &mut self.main
    }

    pub fn solve(&mut self, state: &mut ColoringState, budget: u64) -> SolveOutcome {
        if state.is_proper() {
            return SolveOutcome::already_proper();
        }
        match self.config.algorithm {
            Algorithm::GenericRls => generic_rls_solve(state, budget, &mut self.main),
            Algorithm::TailoredRls => tailored_rls_solve(state, budget, &mut self.main),
            Algorithm::OnePlusLambda => one_plus_lambda_solve(state, self.config.lambda, budget, &mut self.main),
            Algorithm::IslandModel => island_solve(state, &mut self.islands, budget),
        }
    }
}
