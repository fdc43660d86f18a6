//! Concave pro-rata games.
//!
//! Players put nonnegative amounts `x_i` into a pool that pays out `f(1ᵀx)`
//! for a concave `f` with `f(0) = 0`; each player receives the share
//! `x_i / 1ᵀx` of the payout. This crate computes the game's unique
//! symmetric equilibrium, best responses and iterated best-response
//! dynamics, the price of anarchy, batched-exchange clearing, and checks of
//! the curvature conditions the equilibrium results rely on.
//!
//! Trials of the Monte Carlo experiments run on rayon when the `parallel`
//! feature (on by default) is enabled; see [`exec::Execution`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod batch;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod io;
pub mod payoff;
pub mod search;
pub mod verify;

pub use analysis::{poa, poa_growth_check, PoaGrowth, PoaReport};
pub use batch::{clear, optimal_arbitrage, BatchInstance, BatchOutcome};
pub use dynamics::{simulate, GameConfig, Scenario, StrategyProfile, UpdateOrder};
pub use equilibrium::{best_response, solve_symmetric, EquilibriumResult};
pub use error::{GameError, Result};
pub use exec::Execution;
pub use payoff::{
    find_root_w, pro_rata_payoff, CfmmParams, Payoff, PayoffDiagnostics, PayoffFamily, Table,
};
