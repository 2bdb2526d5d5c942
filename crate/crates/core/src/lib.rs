//! Incremental reoptimization of 2-colorings on bipartite graphs.
//!
//! Edges of a static bipartite [`Graph`] are inserted one at a time in a
//! chosen [`EdgeOrder`]. After each insertion a randomized local search
//! (generic RLS, tailored RLS, tailored (1+λ) RLS, or a λ-island model)
//! repairs the coloring until it is proper again. The crate also ships the
//! random-walk hitting-time oracles used to check the optimizers, and a
//! sweep harness that fits growth exponents to the measured costs.

pub mod coloring;
pub mod driver;
pub mod error;
pub mod graph;
pub mod harness;
pub mod optimizer;
pub mod rng;
pub mod traversal;
pub mod walk;

pub use coloring::{ColoringState, FlipResult};
pub use driver::{incremental_reoptimize, solvability_oracle, DriverOptions, RunStats, SolvabilityVerdict};
pub use error::{Error, Result};
pub use graph::{Graph, GraphFamily, GraphMetrics, PathMode};
pub use optimizer::{Algorithm, OptimizerConfig, SolveOutcome, SolveStatus};
pub use traversal::{EdgeOrder, OrderKind};
