//! Exact-arithmetic engine for distributed signaling games played on top of
//! second-price auctions.
//!
//! A market instance has a ground set of items with a prior, a set of bidders
//! with per-item valuations, and a set of mediators that each observe a base
//! partition of the items. Every mediator reports a coarsening of its base
//! partition; the joint signal is the common refinement (meet) of the
//! reports, and each part of the joint signal is sold as one bundle at its
//! second-highest expected-value bid. All quantities are `BigRational`, so
//! every comparison and every reported number is exact.
//!
//! The crate is organized as:
//!
//! - [`rational`]: parsing, formatting, and decimal rendering of rationals.
//! - [`partition`]: canonical set partitions, refinement, meet, coarsening
//!   enumeration.
//! - [`instance`]: market instances, bundle bids, revenue.
//! - [`solvers`]: baselines, exhaustive search, and the greedy
//!   local-expert approximation.
//! - [`game`]: the finite-game view of an instance (mediators as players).
//! - [`mechanism`]: Shapley payments, the exact potential, best-response
//!   dynamics, equilibrium enumeration, efficiency ratios.
//! - [`generators`]: instance families, seeded random instances, and the
//!   reduction from maximum independent set.
//! - [`graph`]: small undirected graphs and an edge-list parser.

pub mod game;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod mechanism;
pub mod partition;
pub mod rational;
pub mod solvers;

pub use game::{DspGame, Game, GameError, TableGame};
pub use generators::{
    edge2, extract_independent_set, gen_dspn, gen_identity, gen_mis_reduction, gen_random, loc2,
    loc3, run_mis_pipeline, trim5, GenError, MisPipelineResult, RandomConfig, ReductionMap,
};
pub use graph::{brute_force_mis, Graph, GraphError};
pub use instance::{Instance, ModelError, StrategyProfile};
pub use mechanism::{
    anonymity_check, best_response, enumerate_equilibria, is_nash, poa_pos, potential, run_brd,
    shapley_permutation, shapley_subsets, BrdStep, DynamicsTrace, Equilibrium, MechanismError,
    PaymentRule, PaymentVector, PoaPos, RatioBound, PERMUTATION_PLAYER_CAP, SUBSET_PLAYER_CAP,
};
pub use partition::{meet, Partition, PartitionError};
pub use rational::{format_rational, parse_rational, to_decimal_string, Rational};
pub use solvers::{
    all_report, baseline_silent, expert_view, find_cover, is_local_expert,
    local_expert_auxiliary, local_expert_solve, phi, solve_exact, AuxiliaryResult, Caps,
    ExpertView, SolveError, SolveMethod, SolveResult, SolveStats,
};
