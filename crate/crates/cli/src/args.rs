use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(
    name = "prorata",
    version,
    about = "Equilibria, dynamics and batch clearing for concave pro-rata games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symmetric equilibrium for n players
    Equilibrium {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: Option<usize>,
        /// Skip closed forms and solve numerically
        #[arg(long)]
        numeric: bool,
    },
    /// Best response to the others' total contribution
    #[command(name = "bestresponse")]
    BestResponse {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Total contributed by the other players
        #[arg(long)]
        y: f64,
        /// Upper bound on the player's own action
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Iterated best-response play; emits the full trace
    Simulate {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        /// Per-round movement bound for the bounded scenario
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated per-player budgets for the budgeted scenario
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<f64>>,
        /// Comma-separated starting profile; drawn from U(0, w/n) when absent
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<f64>>,
    },
    /// Iterations to equilibrium over many seeded trials
    Study {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
        /// Player counts, e.g. `2..16` or `2,4,8`
        #[arg(long)]
        n_values: Option<IndexList>,
        /// Per-round movement bounds; switches to the bounded-update study at a single `--n`
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long)]
        n: Option<usize>,
        /// Emit per-n mean and standard deviation instead of per-trial rows
        #[arg(long)]
        summary: bool,
    },
    /// One unbudgeted whale against budget-limited fish
    Whale {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
        /// Fish counts, e.g. `1..20`
        #[arg(long)]
        n_fish: Option<IndexList>,
    },
    /// Price of anarchy sup f / f(q)
    Poa {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Player counts, e.g. `1..50`
        #[arg(long)]
        n: Option<IndexList>,
    },
    /// Clear a batch of signed trades read from CSV (trader_id, delta)
    Batch {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        input: PathBuf,
        /// Pool fee factor
        #[arg(long)]
        gamma: Option<f64>,
        /// Pool reserve of the tendered asset
        #[arg(long)]
        r1: Option<f64>,
        /// Pool reserve of the received asset
        #[arg(long)]
        r2: Option<f64>,
    },
    /// Check a payoff against the uniqueness conditions
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        condition: ConditionArg,
        /// Use a built-in counterexample instead of a family
        #[arg(long, value_enum)]
        counterexample: Option<CounterexampleArg>,
        /// Player count for the Rosen probe and counterexamples
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Upper end of the sampling range; defaults to the root of f
        #[arg(long)]
        domain: Option<f64>,
    },
    /// Regenerate the data behind a figure with its published parameters
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        dynamics: DynamicsArgs,
        /// Player count for the bounded-update sweep
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_fish: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        summary: bool,
    },
}

#[derive(Args, Debug, Default, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Exponent of the power payoff
    #[arg(long)]
    pub beta: Option<f64>,
    /// Linear cost of the power payoff, or fee factor of the pool
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// External price of the received asset
    #[arg(long)]
    pub price: Option<f64>,
    /// CSV of breakpoints (t, f) for a piecewise-linear payoff
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// TOML file with default settings; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub exec: Option<ExecArg>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct DynamicsArgs {
    /// Convergence threshold on strategies
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Power,
    Cfmm,
    Table,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Table,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ExecArg {
    Parallel,
    Sequential,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    Sequential,
    Simultaneous,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Unconstrained,
    Bounded,
    Budgeted,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionArg {
    Chord,
    LinearSegment,
    Rosen,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterexampleArg {
    /// min(t, 3n)
    CappedLinear,
    /// (4n)^2 - (4n - t)^2
    ShiftedParabola,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    #[value(alias = "fig-scenario1")]
    Scenario1,
    #[value(alias = "fig-scenario2-delta")]
    Scenario2Delta,
    #[value(alias = "fig-whale")]
    Whale,
    #[value(alias = "fig-poa-curve")]
    PoaCurve,
}

/// Positive integers written as `a..b` (inclusive) and comma-separated items.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(transparent)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad count {t:?}: {e}"))
            };
            match item.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
                    if a > b {
                        return Err(format!("empty range {item}"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(parse(item)?),
            }
        }
        if out.is_empty() {
            return Err("no values given".into());
        }
        Ok(IndexList(out))
    }
}
