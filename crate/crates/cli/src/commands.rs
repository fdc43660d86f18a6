use std::fs;

use serde::Serialize;

use prorata::analysis::poa;
use prorata::batch::{clear, BatchInstance};
use prorata::dynamics::{
    bounded_update_study, convergence_study, init_uniform, simulate, whale_fish_experiment,
    GameConfig, Scenario, StrategyProfile, StudyOptions, WhaleFishOptions,
};
use prorata::equilibrium::{best_response, solve_symmetric, solve_symmetric_numeric, Boundary};
use prorata::exec::map_indexed;
use prorata::io::{self, BatchInputRow};
use prorata::payoff::{CfmmParams, Payoff, PayoffFamily};
use prorata::verify::{
    check_chord_condition, default_domain, detect_linear_segment_at_zero, probe_pairs, rosen_probe,
    CappedLinear, ShiftedParabola, DEFAULT_CHORD_SAMPLES,
};

use crate::args::{Command, ConditionArg, CounterexampleArg, Figure, IndexList, ScenarioArg};
use crate::config::{self, Common, Dynamics, FileConfig};
use crate::output::emit;
use crate::CliError;

const DEFAULT_TRIALS: usize = 100;
const DEFAULT_DELTAS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Serialize)]
struct EquilibriumRow {
    n: usize,
    q: f64,
    per_player: f64,
    equilibrium_payoff: f64,
    foc_residual: f64,
    method: &'static str,
    iterations: usize,
    w: f64,
    sup_f: f64,
    argmax: f64,
}

#[derive(Serialize)]
struct BestResponseRow {
    y: f64,
    budget: f64,
    x: f64,
    payoff: f64,
    boundary: &'static str,
}

fn need<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing {what}")))
}

fn study_options(d: &Dynamics, c: &Common) -> StudyOptions {
    StudyOptions {
        threshold: d.threshold,
        max_iterations: d.max_iterations,
        order: d.order,
        exec: c.exec,
    }
}

fn whale_options(d: &Dynamics, c: &Common) -> WhaleFishOptions {
    WhaleFishOptions {
        threshold: d.threshold,
        max_iterations: d.max_iterations,
        order: d.order,
        exec: c.exec,
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Equilibrium {
            family,
            common,
            n,
            numeric,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let f = config::family(&family, &file)?;
            let n = need(n.or(file.n), "player count (--n)")?;
            let eq = if numeric {
                solve_symmetric_numeric(&f, n)?
            } else {
                solve_symmetric(&f, n)?
            };
            emit(
                &[EquilibriumRow {
                    n,
                    q: eq.q,
                    per_player: eq.per_player,
                    equilibrium_payoff: eq.equilibrium_payoff,
                    foc_residual: eq.foc_residual,
                    method: eq.method.as_str(),
                    iterations: eq.iterations,
                    w: eq.diagnostics.w,
                    sup_f: eq.diagnostics.sup_f,
                    argmax: eq.diagnostics.argmax,
                }],
                &c,
            )
        }
        Command::BestResponse {
            family,
            common,
            y,
            budget,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let f = config::family(&family, &file)?;
            let budget = budget.unwrap_or(f64::INFINITY);
            let br = best_response(&f, y, budget)?;
            let boundary = match br.boundary {
                Boundary::Zero => "zero",
                Boundary::Budget => "budget",
                Boundary::Interior => "interior",
            };
            emit(
                &[BestResponseRow {
                    y,
                    budget,
                    x: br.x,
                    payoff: br.payoff,
                    boundary,
                }],
                &c,
            )
        }
        Command::Simulate {
            family,
            common,
            dynamics,
            n,
            scenario,
            delta,
            budgets,
            start,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let d = config::dynamics(&dynamics, &file);
            let f = config::family(&family, &file)?;
            let n = need(n.or(file.n), "player count (--n)")?;
            let delta = delta.or(file.delta);
            let budgets = budgets.or_else(|| file.budgets.clone());
            let scenario = match scenario.or(file.scenario) {
                Some(s) => s,
                None if budgets.is_some() => ScenarioArg::Budgeted,
                None if delta.is_some() => ScenarioArg::Bounded,
                None => ScenarioArg::Unconstrained,
            };
            let scenario = match scenario {
                ScenarioArg::Unconstrained => Scenario::Unconstrained,
                ScenarioArg::Bounded => Scenario::BoundedUpdate {
                    delta: need(delta, "update bound (--delta)")?,
                },
                ScenarioArg::Budgeted => Scenario::Budgeted {
                    budgets: need(budgets, "budgets (--budgets)")?,
                },
            };
            let mut cfg = GameConfig::new(f.clone(), n)
                .with_scenario(scenario)
                .with_seed(c.seed)
                .with_order(d.order);
            cfg.threshold = d.threshold;
            cfg.max_iterations = d.max_iterations;
            cfg.validate()?;
            let start = start.map(StrategyProfile::new).transpose()?;
            let trials = c.trials.unwrap_or(1);
            let traces = map_indexed(c.exec, trials, |trial| {
                let initial = match &start {
                    Some(s) => s.clone(),
                    None => init_uniform(&cfg, trial as u64)?,
                };
                let trace = simulate(&cfg, &initial)?;
                io::trace_rows(trial, &trace, &f)
            });
            let mut rows = Vec::new();
            for t in traces {
                rows.extend(t?);
            }
            emit(&rows, &c)
        }
        Command::Study {
            family,
            common,
            dynamics,
            n_values,
            deltas,
            n,
            summary,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let d = config::dynamics(&dynamics, &file);
            let f = config::family(&family, &file)?;
            let trials = c.trials.unwrap_or(DEFAULT_TRIALS);
            let opts = study_options(&d, &c);
            if let Some(deltas) = deltas.or_else(|| file.deltas.clone()) {
                let n = n.or(file.n).unwrap_or(10);
                let pts = bounded_update_study(&f, n, &deltas, trials, c.seed, &opts)?;
                return emit(&io::delta_summary_rows(&pts), &c);
            }
            let n_values = n_values
                .or_else(|| file.n_values.clone())
                .unwrap_or(IndexList((2..=16).collect()));
            let pts = convergence_study(&f, &n_values.0, trials, c.seed, &opts)?;
            if summary {
                emit(&io::study_summary_rows(&pts), &c)
            } else {
                emit(&io::study_rows(&pts), &c)
            }
        }
        Command::Whale {
            family,
            common,
            dynamics,
            n_fish,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let d = config::dynamics(&dynamics, &file);
            let f = config::family(&family, &file)?;
            let n_fish = n_fish
                .or_else(|| file.n_fish.clone())
                .unwrap_or(IndexList((1..=20).collect()));
            whale_rows(&f, &n_fish.0, &d, &c)
        }
        Command::Poa { family, common, n } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let f = config::family(&family, &file)?;
            let ns = n
                .or_else(|| file.n_values.clone())
                .or_else(|| file.n.map(|n| IndexList(vec![n])))
                .unwrap_or(IndexList((1..=50).collect()));
            poa_rows(&f, &ns.0, &c)
        }
        Command::Batch {
            common,
            input,
            gamma,
            r1,
            r2,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let pool = CfmmParams::new(
                gamma.unwrap_or(0.99),
                r1.unwrap_or(200.0),
                r2.unwrap_or(250.0),
            )?;
            let reader = fs::File::open(&input)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
            let inputs: Vec<BatchInputRow> = io::read_csv(reader)?;
            let instance = BatchInstance {
                deltas: inputs.iter().map(|r| r.delta).collect(),
                cfmm: pool,
            };
            let outcome = clear(&instance)?;
            emit(&io::batch_rows(&inputs, &outcome), &c)
        }
        Command::Verify {
            family,
            common,
            condition,
            counterexample,
            n,
            samples,
            domain,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let n = n.or(file.n).unwrap_or(2);
            let samples = samples.or(file.samples);
            let payoff: Box<dyn Payoff> = match counterexample {
                Some(CounterexampleArg::CappedLinear) => Box::new(CappedLinear {
                    cap: 3.0 * n as f64,
                }),
                Some(CounterexampleArg::ShiftedParabola) => Box::new(ShiftedParabola { n }),
                None => Box::new(config::family(&family, &file)?),
            };
            let report = match condition {
                ConditionArg::Chord => check_chord_condition(
                    &*payoff,
                    samples.unwrap_or(DEFAULT_CHORD_SAMPLES),
                    c.seed,
                    domain,
                )?,
                ConditionArg::LinearSegment => {
                    let domain = domain.unwrap_or_else(|| default_domain(&*payoff));
                    let pairs =
                        probe_pairs(domain, samples.unwrap_or(DEFAULT_CHORD_SAMPLES), c.seed);
                    detect_linear_segment_at_zero(&*payoff, &pairs)?
                }
                ConditionArg::Rosen => rosen_probe(&*payoff, n)?,
            };
            emit(&[io::verify_row(&report)], &c)
        }
        Command::Reproduce {
            figure,
            family,
            common,
            dynamics,
            n,
            max_fish,
            n_max,
            summary,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let c = config::common(&common, &file);
            let d = config::dynamics(&dynamics, &file);
            let f = config::family(&family, &file)?;
            let trials = c.trials.unwrap_or(DEFAULT_TRIALS);
            match figure {
                Figure::Scenario1 => {
                    let ns: Vec<usize> = (2..=16).collect();
                    let pts = convergence_study(&f, &ns, trials, c.seed, &study_options(&d, &c))?;
                    if summary {
                        emit(&io::study_summary_rows(&pts), &c)
                    } else {
                        emit(&io::study_rows(&pts), &c)
                    }
                }
                Figure::Scenario2Delta => {
                    let n = n.or(file.n).unwrap_or(10);
                    let deltas = file.deltas.clone().unwrap_or(DEFAULT_DELTAS.to_vec());
                    let pts = bounded_update_study(
                        &f,
                        n,
                        &deltas,
                        trials,
                        c.seed,
                        &study_options(&d, &c),
                    )?;
                    emit(&io::delta_summary_rows(&pts), &c)
                }
                Figure::Whale => {
                    let max_fish = max_fish.or(file.max_fish).unwrap_or(20);
                    let fish: Vec<usize> = (1..=max_fish).collect();
                    whale_rows(&f, &fish, &d, &c)
                }
                Figure::PoaCurve => {
                    let n_max = n_max.or(file.n_max).unwrap_or(50);
                    let ns: Vec<usize> = (1..=n_max).collect();
                    poa_rows(&f, &ns, &c)
                }
            }
        }
    }
}

fn whale_rows(
    f: &PayoffFamily,
    n_fish: &[usize],
    d: &Dynamics,
    c: &Common,
) -> Result<(), CliError> {
    let trials = c.trials.unwrap_or(DEFAULT_TRIALS);
    let opts = whale_options(d, c);
    let rows = n_fish
        .iter()
        .map(|&k| whale_fish_experiment(f, k, trials, c.seed, &opts).map(|r| io::whale_row(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    emit(&rows, c)
}

fn poa_rows(f: &PayoffFamily, ns: &[usize], c: &Common) -> Result<(), CliError> {
    let reports = map_indexed(c.exec, ns.len(), |i| poa(f, ns[i]))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    emit(&io::poa_rows(&reports), c)
}
