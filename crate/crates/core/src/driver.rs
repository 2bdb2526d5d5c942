//! Incremental reoptimization: insert edges one at a time in a given order
//! and repair the coloring after every insertion.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coloring::ColoringState;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::optimizer::{Optimizer, OptimizerConfig, SolveStatus, DEFAULT_BUDGET};
use crate::traversal::EdgeOrder;

/// Exhaustive reachability search is restricted to this many vertices.
pub const ORACLE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverOptions {
    /// Per-insertion budget in generations.
    pub budget: u64,
    /// Keep inserting edges after a timeout instead of aborting the run.
    pub continue_on_timeout: bool,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions {
            budget: DEFAULT_BUDGET,
            continue_on_timeout: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertionRecord {
    pub edge: usize,
    pub conflict_introduced: bool,
    pub generations: u64,
    pub evaluations: u64,
    pub status: SolveStatus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTotals {
    pub evaluations: u64,
    pub generations: u64,
    pub timeouts: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub per_insertion: Vec<InsertionRecord>,
    pub totals: RunTotals,
    pub seed: u64,
    pub config: OptimizerConfig,
    pub options: DriverOptions,
    /// False if the run stopped early on a timeout.
    pub completed: bool,
}

impl RunStats {
    /// Generations spent on insertions that introduced a conflict.
    pub fn repair_generations(&self) -> u64 {
        self.per_insertion
            .iter()
            .filter(|r| r.conflict_introduced)
            .map(|r| r.generations)
            .sum()
    }

    pub fn conflicts_introduced(&self) -> usize {
        self.per_insertion.iter().filter(|r| r.conflict_introduced).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per insertion followed by a `total` summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,edge,conflict_introduced,generations,evaluations,status\n");
        for (i, r) in self.per_insertion.iter().enumerate() {
            let status = match r.status {
                SolveStatus::Proper => "proper",
                SolveStatus::BudgetExhausted => "budget-exhausted",
            };
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{status}",
                r.edge, r.conflict_introduced as u8, r.generations, r.evaluations
            );
        }
        let _ = writeln!(
            out,
            "total,,{},{},{},timeouts={}",
            self.conflicts_introduced(),
            self.totals.generations,
            self.totals.evaluations,
            self.totals.timeouts
        );
        out
    }
}

/// Inserts the edges of `g` in `order`, repairing the coloring after each
/// insertion with the configured optimizer.
///
/// An insertion that leaves the coloring proper costs one evaluation and no
/// generations. Otherwise the optimizer runs until the coloring is proper
/// or the per-insertion budget is spent. Returns the statistics and the
/// final state (the state at the timeout if the run aborted).
pub fn incremental_reoptimize(
    g: &Graph,
    order: &EdgeOrder,
    config: &OptimizerConfig,
    options: &DriverOptions,
) -> Result<(RunStats, ColoringState)> {
    order.validate(g)?;
    let mut optimizer = Optimizer::new(*config)?;
    let mut state = ColoringState::init_random_coloring(g.n(), optimizer.main_rng())?;
    let mut stats = RunStats {
        per_insertion: Vec::with_capacity(g.m()),
        totals: RunTotals::default(),
        seed: config.seed,
        config: *config,
        options: *options,
        completed: true,
    };
    for &e in &order.permutation {
        let (u, v) = g.edge(e);
        state.insert_edge(u, v)?;
        let record = if state.is_proper() {
            state.add_evaluations(1);
            InsertionRecord {
                edge: e,
                conflict_introduced: false,
                generations: 0,
                evaluations: 1,
                status: SolveStatus::Proper,
            }
        } else {
            let out = optimizer.solve(&mut state, options.budget);
            InsertionRecord {
                edge: e,
                conflict_introduced: true,
                generations: out.generations,
                evaluations: out.evaluations,
                status: out.status,
            }
        };
        stats.totals.evaluations += record.evaluations;
        stats.totals.generations += record.generations;
        stats.per_insertion.push(record);
        if record.status == SolveStatus::BudgetExhausted {
            stats.totals.timeouts += 1;
            if !options.continue_on_timeout {
                stats.completed = false;
                break;
            }
        }
    }
    Ok((stats, state))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolvabilityVerdict {
    pub reachable_proper: bool,
    pub states_explored: u64,
}

/// Decides whether a proper coloring of the current prefix is reachable
/// from the current coloring by single-vertex flips that never increase
/// the number of conflicts. Breadth-first search over all colorings.
pub fn solvability_oracle(state: &ColoringState) -> Result<SolvabilityVerdict> {
    let n = state.n();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    let prefix = state.prefix();
    let nbr: Vec<u32> = (0..n)
        .map(|v| prefix.neighbors(v).fold(0u32, |acc, w| acc | (1 << w)))
        .collect();
    let start: u32 = state
        .colors()
        .iter()
        .enumerate()
        .fold(0, |acc, (v, &c)| acc | ((c as u32) << v));
    let mut seen = vec![false; 1 << n];
    let mut queue = VecDeque::from([(start, state.conflict_count() as i64)]);
    seen[start as usize] = true;
    let mut explored = 0u64;
    while let Some((mask, conflicts)) = queue.pop_front() {
        explored += 1;
        if conflicts == 0 {
            return Ok(SolvabilityVerdict {
                reachable_proper: true,
                states_explored: explored,
            });
        }
        for (v, &adj) in nbr.iter().enumerate() {
            let same = if mask & (1 << v) != 0 {
                (mask & adj).count_ones()
            } else {
                (!mask & adj).count_ones()
            } as i64;
            let delta = adj.count_ones() as i64 - 2 * same;
            if delta > 0 {
                continue;
            }
            let next = mask ^ (1 << v);
            if !std::mem::replace(&mut seen[next as usize], true) {
                queue.push_back((next, conflicts + delta));
            }
        }
    }
    Ok(SolvabilityVerdict {
        reachable_proper: false,
        states_explored: explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamily;
    use crate::optimizer::Algorithm;
    use crate::traversal::{bfs_order, worst_case_order};
    use crate::rng::seeded;

    #[test]
    fn single_edge_run() {
        let g = Graph::generate(GraphFamily::Path { n: 2 }).unwrap();
        for algo in [
            Algorithm::GenericRls,
            Algorithm::TailoredRls,
            Algorithm::OnePlusLambda,
            Algorithm::IslandModel,
        ] {
            for seed in 0..20 {
                let order = bfs_order(&g, None, &mut seeded(seed)).unwrap();
                let cfg = OptimizerConfig::new(algo, 3, seed).unwrap();
                let (stats, state) =
                    incremental_reoptimize(&g, &order, &cfg, &DriverOptions::default()).unwrap();
                assert!(state.is_proper());
                assert!(stats.totals.evaluations <= 60, "{algo}: {:?}", stats.totals);
                assert_eq!(stats.totals.timeouts, 0);
            }
        }
    }

    #[test]
    fn cycle_closing_insertions_are_free() {
        let g = Graph::generate(GraphFamily::Toroid { side: 4 }).unwrap();
        let order = bfs_order(&g, Some(0), &mut seeded(3)).unwrap();
        let cfg = OptimizerConfig::new(Algorithm::GenericRls, 1, 3).unwrap();
        let (stats, _) = incremental_reoptimize(&g, &order, &cfg, &DriverOptions::default()).unwrap();
        let mut seen = vec![false; g.n()];
        for r in &stats.per_insertion {
            let (u, v) = g.edge(r.edge);
            if seen[u] && seen[v] {
                assert!(!r.conflict_introduced);
                assert_eq!((r.generations, r.evaluations), (0, 1));
            }
            seen[u] = true;
            seen[v] = true;
        }
    }

    #[test]
    fn aborts_on_timeout_unless_asked_to_continue() {
        let t = Graph::generate(GraphFamily::WorstCaseTree { n: 40 }).unwrap();
        let order = worst_case_order(&t).unwrap();
        let cfg = OptimizerConfig::new(Algorithm::GenericRls, 1, 8).unwrap();
        let opts = DriverOptions {
            budget: 2_000,
            continue_on_timeout: false,
        };
        let (stats, state) = incremental_reoptimize(&t, &order, &cfg, &opts).unwrap();
        assert_eq!(stats.totals.timeouts, 1);
        assert!(!stats.completed);
        assert!(!state.is_proper());
        assert!(stats.per_insertion.len() < t.m());

        let opts = DriverOptions {
            continue_on_timeout: true,
            ..opts
        };
        let (stats, _) = incremental_reoptimize(&t, &order, &cfg, &opts).unwrap();
        assert_eq!(stats.per_insertion.len(), t.m());
        assert!(stats.completed);
        assert!(stats.totals.timeouts >= 1);
    }

    #[test]
    fn csv_summary_row_matches_totals() {
        let g = Graph::generate(GraphFamily::Path { n: 12 }).unwrap();
        let order = bfs_order(&g, None, &mut seeded(1)).unwrap();
        let cfg = OptimizerConfig::new(Algorithm::TailoredRls, 1, 1).unwrap();
        let (stats, _) = incremental_reoptimize(&g, &order, &cfg, &DriverOptions::default()).unwrap();
        let csv = stats.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 1 + g.m() + 1);
        let evals: u64 = rows[1..=g.m()]
            .iter()
            .map(|r| r.split(',').nth(4).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(evals, stats.totals.evaluations);
        assert!(rows.last().unwrap().starts_with("total,"));
        let back: RunStats = serde_json::from_str(&stats.to_json().unwrap()).unwrap();
        assert_eq!(back, stats);
    }

    #[test]
    fn oracle_examples() {
        let mut proper = ColoringState::from_colors(vec![0, 1, 0]);
        proper.insert_edge(0, 1).unwrap();
        proper.insert_edge(1, 2).unwrap();
        let v = solvability_oracle(&proper).unwrap();
        assert_eq!(v, SolvabilityVerdict { reachable_proper: true, states_explored: 1 });

        // two height-1 trees colored inversely, then both joined to the root
        let mut stuck = ColoringState::from_colors(vec![0, 1, 0, 0, 0, 1, 1]);
        for (u, w) in [(1, 3), (1, 4), (2, 5), (2, 6), (0, 1), (0, 2)] {
            stuck.insert_edge(u, w).unwrap();
        }
        assert_eq!(stuck.conflict_count(), 1);
        assert!(!solvability_oracle(&stuck).unwrap().reachable_proper);

        let mut walk = ColoringState::from_colors(vec![0, 1, 0, 1, 1]);
        for v in 0..4 {
            walk.insert_edge(v, v + 1).unwrap();
        }
        assert_eq!(walk.conflict_count(), 1);
        assert!(solvability_oracle(&walk).unwrap().reachable_proper);

        let big = ColoringState::from_colors(vec![0; 21]);
        assert!(matches!(solvability_oracle(&big), Err(Error::TooLarge { .. })));
    }
}
