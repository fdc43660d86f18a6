//! Settings from an optional TOML file, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use prorata::dynamics::UpdateOrder;
use prorata::payoff::{PayoffFamily, Table};
use prorata::Execution;

use crate::args::{
    CommonArgs, DynamicsArgs, ExecArg, FamilyArgs, FamilyKind, Format, IndexList, OrderArg,
    ScenarioArg,
};
use crate::CliError;

/// Every key a config file may carry. Keys a subcommand has no use for are ignored by it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<PayoffFamily>,
    pub n: Option<usize>,
    pub n_values: Option<IndexList>,
    pub n_fish: Option<IndexList>,
    pub max_fish: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub threshold: Option<f64>,
    pub max_iterations: Option<usize>,
    pub order: Option<OrderArg>,
    pub exec: Option<ExecArg>,
    pub scenario: Option<ScenarioArg>,
    pub delta: Option<f64>,
    pub deltas: Option<Vec<f64>>,
    pub budgets: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Options shared by every subcommand after merging flags over the file.
#[derive(Debug, Clone)]
pub struct Common {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub trials: Option<usize>,
    pub exec: Execution,
}

pub fn common(args: &CommonArgs, file: &FileConfig) -> Common {
    let exec = match args.exec.or(file.exec) {
        Some(ExecArg::Sequential) => Execution::Sequential,
        _ => Execution::Parallel,
    };
    Common {
        output: args.output.clone().or_else(|| file.output.clone()),
        format: args.format.or(file.format).unwrap_or_default(),
        seed: args.seed.or(file.seed).unwrap_or(0),
        trials: args.trials.or(file.trials),
        exec,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dynamics {
    pub threshold: f64,
    pub max_iterations: usize,
    pub order: UpdateOrder,
}

pub fn dynamics(args: &DynamicsArgs, file: &FileConfig) -> Dynamics {
    let order = match args.order.or(file.order) {
        Some(OrderArg::Simultaneous) => UpdateOrder::Simultaneous,
        _ => UpdateOrder::Sequential,
    };
    Dynamics {
        threshold: args.threshold.or(file.threshold).unwrap_or(0.1),
        max_iterations: args
            .max_iterations
            .or(file.max_iterations)
            .unwrap_or(10_000),
        order,
    }
}

#[derive(Debug, Deserialize)]
struct TablePoint {
    t: f64,
    f: f64,
}

fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Config(format!("cannot read table {}: {e}", path.display())))?;
    let points: Vec<TablePoint> = prorata::io::read_csv(file).map_err(CliError::from)?;
    Ok(Table::new(
        points.into_iter().map(|p| (p.t, p.f)).collect(),
    )?)
}

/// Family from flags, starting from the file's family when the kinds agree.
pub fn family(args: &FamilyArgs, file: &FileConfig) -> Result<PayoffFamily, CliError> {
    let file_kind = file.family.as_ref().map(|f| match f {
        PayoffFamily::Power { .. } => FamilyKind::Power,
        PayoffFamily::CfmmArbitrage { .. } => FamilyKind::Cfmm,
        PayoffFamily::Tabulated(_) => FamilyKind::Table,
    });
    let kind = match (args.family, file_kind) {
        (Some(k), _) => k,
        (None, Some(k)) => k,
        (None, None) if args.table.is_some() => FamilyKind::Table,
        (None, None) => {
            return Err(CliError::Config(
                "no payoff family given; pass --family or set it in --config".into(),
            ))
        }
    };
    let base = match &file.family {
        Some(f) if file_kind == Some(kind) => f.clone(),
        _ => match kind {
            FamilyKind::Power => PayoffFamily::default_power(),
            FamilyKind::Cfmm => PayoffFamily::default_cfmm(),
            FamilyKind::Table => {
                let path = args
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Config("--family table needs --table".into()))?;
                PayoffFamily::Tabulated(read_table(path)?)
            }
        },
    };
    let family = match base {
        PayoffFamily::Power { beta, gamma } => PayoffFamily::Power {
            beta: args.beta.unwrap_or(beta),
            gamma: args.gamma.unwrap_or(gamma),
        },
        PayoffFamily::CfmmArbitrage {
            gamma,
            r1,
            r2,
            price,
        } => PayoffFamily::CfmmArbitrage {
            gamma: args.gamma.unwrap_or(gamma),
            r1: args.r1.unwrap_or(r1),
            r2: args.r2.unwrap_or(r2),
            price: args.price.unwrap_or(price),
        },
        PayoffFamily::Tabulated(table) => match &args.table {
            Some(path) => PayoffFamily::Tabulated(read_table(path)?),
            None => PayoffFamily::Tabulated(table),
        },
    };
    family.validate()?;
    Ok(family)
}
