//! Iterated best-response play.
//!
//! Each round every player best-responds to the others' contributions,
//! optionally under a per-player budget or a bound on how far the action may
//! move in one round. Players update in index order against the latest
//! actions by default; [`UpdateOrder::Simultaneous`] updates everyone from
//! the previous round's profile instead.

use rand::Rng;

use crate::equilibrium::{equilibrium_diagnostics, solve_symmetric, BestResponder};
use crate::error::{GameError, Result};
use crate::exec::{map_indexed, trial_rng, Execution};
use crate::payoff::{pro_rata_payoff, PayoffFamily};

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Unconstrained,
    /// `|x_i^t - x_i^(t-1)| <= delta`
    BoundedUpdate {
        delta: f64,
    },
    /// `x_i^t in [0, budgets[i]]`; budgets may be infinite.
    Budgeted {
        budgets: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Gauss-Seidel: player i sees the round-t actions of players j < i.
    #[default]
    Sequential,
    /// Jacobi: every player responds to the round t-1 profile.
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingRule {
    /// Stop once `max_i |x_i - q/n| < threshold`.
    Equilibrium,
    /// Stop once no action moved by `threshold` or more during a round.
    Stationary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub n: usize,
    pub family: PayoffFamily,
    pub scenario: Scenario,
    pub threshold: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub trials: usize,
    pub order: UpdateOrder,
    /// `None` picks `Equilibrium` for unbudgeted play and `Stationary` for
    /// budgeted play, whose equilibrium has no closed form.
    pub stopping: Option<StoppingRule>,
}

impl GameConfig {
    pub fn new(family: PayoffFamily, n: usize) -> Self {
        Self {
            n,
            family,
            scenario: Scenario::Unconstrained,
            threshold: 0.1,
            max_iterations: 10_000,
            seed: 0,
            trials: 100,
            order: UpdateOrder::default(),
            stopping: None,
        }
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_order(mut self, order: UpdateOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GameError::InvalidParameter(msg));
        if self.n == 0 {
            return bad("player count must be at least 1".into());
        }
        if !(self.threshold > 0.0) {
            return bad(format!(
                "convergence threshold must be positive, got {}",
                self.threshold
            ));
        }
        match &self.scenario {
            Scenario::Unconstrained => {}
            Scenario::BoundedUpdate { delta } => {
                if !(*delta > 0.0) {
                    return bad(format!("update bound must be positive, got {delta}"));
                }
            }
            Scenario::Budgeted { budgets } => {
                if budgets.len() != self.n {
                    return bad(format!(
                        "expected {} budgets, got {}",
                        self.n,
                        budgets.len()
                    ));
                }
                if let Some(m) = budgets.iter().find(|m| !(**m >= 0.0)) {
                    return bad(format!("budgets must be nonnegative, got {m}"));
                }
            }
        }
        self.family.validate()
    }

    pub fn stopping_rule(&self) -> StoppingRule {
        self.stopping.unwrap_or(match self.scenario {
            Scenario::Budgeted { .. } => StoppingRule::Stationary,
            _ => StoppingRule::Equilibrium,
        })
    }
}

/// Nonnegative actions, one per player.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub actions: Vec<f64>,
}

impl StrategyProfile {
    pub fn new(actions: Vec<f64>) -> Result<Self> {
        if let Some(x) = actions.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(GameError::InvalidParameter(format!(
                "actions must be finite and nonnegative, got {x}"
            )));
        }
        Ok(Self { actions })
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.actions.iter().sum()
    }

    /// Sum of every action except player `i`'s.
    pub fn others(&self, i: usize) -> f64 {
        self.actions
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, x)| x)
            .sum()
    }

    pub fn payoffs(&self, family: &PayoffFamily) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|i| pro_rata_payoff(family, self.actions[i], self.others(i)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace {
    /// `profiles[0]` is the starting profile.
    pub profiles: Vec<StrategyProfile>,
    /// Round at which the stopping rule first held.
    pub converged_at: Option<usize>,
    pub stop: StopReason,
    pub final_payoffs: Vec<f64>,
    /// Symmetric equilibrium action `q/n`.
    pub target: f64,
}

impl DynamicsTrace {
    pub fn last(&self) -> &StrategyProfile {
        self.profiles
            .last()
            .expect("trace holds the initial profile")
    }

    pub fn iterations(&self) -> usize {
        self.profiles.len() - 1
    }
}

fn max_distance(profile: &StrategyProfile, target: f64) -> f64 {
    profile
        .actions
        .iter()
        .map(|x| (x - target).abs())
        .fold(0.0, f64::max)
}

fn max_change(a: &StrategyProfile, b: &StrategyProfile) -> f64 {
    a.actions
        .iter()
        .zip(&b.actions)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Runs best-response dynamics from `initial` until the stopping rule holds
/// or `max_iterations` rounds have been played.
pub fn simulate(config: &GameConfig, initial: &StrategyProfile) -> Result<DynamicsTrace> {
    config.validate()?;
    if initial.len() != config.n {
        return Err(GameError::InvalidParameter(format!(
            "initial profile has {} entries for {} players",
            initial.len(),
            config.n
        )));
    }
    let eq = solve_symmetric(&config.family, config.n)?;
    let responder = BestResponder::with_diagnostics(&config.family, eq.diagnostics);
    let target = eq.per_player;
    let rule = config.stopping_rule();

    let mut profiles = vec![initial.clone()];
    let mut converged_at = None;
    if rule == StoppingRule::Equilibrium && max_distance(initial, target) < config.threshold {
        converged_at = Some(0);
    }

    let mut round = 0;
    while converged_at.is_none() && round < config.max_iterations {
        round += 1;
        let prev = profiles.last().expect("nonempty");
        let mut next = prev.clone();
        for i in 0..config.n {
            let y = match config.order {
                UpdateOrder::Sequential => next.others(i),
                UpdateOrder::Simultaneous => prev.others(i),
            };
            let old = prev.actions[i];
            next.actions[i] = match &config.scenario {
                Scenario::Unconstrained => responder.respond(y, f64::INFINITY)?.x,
                Scenario::Budgeted { budgets } => responder.respond(y, budgets[i])?.x,
                Scenario::BoundedUpdate { delta } => {
                    let x = responder.respond(y, f64::INFINITY)?.x;
                    x.clamp((old - delta).max(0.0), old + delta)
                }
            };
        }
        let done = match rule {
            StoppingRule::Equilibrium => max_distance(&next, target) < config.threshold,
            StoppingRule::Stationary => max_change(&next, prev) < config.threshold,
        };
        profiles.push(next);
        if done {
            converged_at = Some(round);
        }
    }

    let final_payoffs = profiles.last().expect("nonempty").payoffs(&config.family)?;
    Ok(DynamicsTrace {
        profiles,
        stop: if converged_at.is_some() {
            StopReason::Converged
        } else {
            StopReason::IterationCap
        },
        converged_at,
        final_payoffs,
        target,
    })
}

/// Starting profile with each action drawn from `U(0, w/n)`, using the
/// generator of `trial`.
pub fn init_uniform(config: &GameConfig, trial: u64) -> Result<StrategyProfile> {
    let diag = equilibrium_diagnostics(&config.family)?;
    let upper = diag.w / config.n as f64;
    let mut rng = trial_rng(config.seed, trial);
    StrategyProfile::new((0..config.n).map(|_| rng.gen_range(0.0..upper)).collect())
}

/// Outcome of one seeded trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub iterations: Option<usize>,
}

/// Runs `config.trials` trials from uniform random starts.
pub fn run_trials(config: &GameConfig, exec: Execution) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    map_indexed(exec, config.trials, |trial| {
        let start = init_uniform(config, trial as u64)?;
        let trace = simulate(config, &start)?;
        Ok(TrialOutcome {
            trial,
            iterations: trace.converged_at,
        })
    })
    .into_iter()
    .collect()
}

/// Mean and spread of iterations-to-convergence over the converged trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSummary {
    pub mean: f64,
    pub std: f64,
    pub converged: usize,
    pub failed: usize,
}

impl IterationSummary {
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> Self {
        let done: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.iterations)
            .map(|i| i as f64)
            .collect();
        let (mean, std) = mean_std(&done);
        Self {
            mean,
            std,
            converged: done.len(),
            failed: outcomes.len() - done.len(),
        }
    }
}

/// Mean and population standard deviation; NaN for an empty slice.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyPoint<K> {
    pub key: K,
    pub outcomes: Vec<TrialOutcome>,
    pub summary: IterationSummary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub threshold: f64,
    pub max_iterations: usize,
    pub order: UpdateOrder,
    pub exec: Execution,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            max_iterations: 10_000,
            order: UpdateOrder::default(),
            exec: Execution::default(),
        }
    }
}

/// Iterations to reach equilibrium against the number of players,
/// unconstrained play from `U(0, w/n)` starts.
pub fn convergence_study(
    family: &PayoffFamily,
    n_values: &[usize],
    trials: usize,
    seed: u64,
    opts: &StudyOptions,
) -> Result<Vec<StudyPoint<usize>>> {
    n_values
        .iter()
        .map(|&n| {
            let mut config = GameConfig::new(family.clone(), n)
                .with_seed(seed)
                .with_order(opts.order);
            config.trials = trials;
            config.threshold = opts.threshold;
            config.max_iterations = opts.max_iterations;
            let outcomes = run_trials(&config, opts.exec)?;
            Ok(StudyPoint {
                key: n,
                summary: IterationSummary::from_outcomes(&outcomes),
                outcomes,
            })
        })
        .collect()
}

/// Iterations to reach equilibrium against the per-round update bound.
pub fn bounded_update_study(
    family: &PayoffFamily,
    n: usize,
    deltas: &[f64],
    trials: usize,
    seed: u64,
    opts: &StudyOptions,
) -> Result<Vec<StudyPoint<f64>>> {
    deltas
        .iter()
        .map(|&delta| {
            let mut config = GameConfig::new(family.clone(), n)
                .with_seed(seed)
                .with_order(opts.order)
                .with_scenario(Scenario::BoundedUpdate { delta });
            config.trials = trials;
            config.threshold = opts.threshold;
            config.max_iterations = opts.max_iterations;
            let outcomes = run_trials(&config, opts.exec)?;
            Ok(StudyPoint {
                key: delta,
                summary: IterationSummary::from_outcomes(&outcomes),
                outcomes,
            })
        })
        .collect()
}

/// One whale (player 0, no budget) against budget-limited fish.
#[derive(Debug, Clone, PartialEq)]
pub struct WhaleFishTrial {
    pub fish_budgets: Vec<f64>,
    pub trace: DynamicsTrace,
    pub whale_strategy: f64,
    pub whale_profit: f64,
    /// Fish whose unconstrained best response exceeds their budget but who
    /// do not play exactly their budget.
    pub unsaturated_fish: usize,
}

const REFINE_REL: f64 = 1e-12;
const REFINE_ROUNDS: usize = 1000;

/// Plays the whale/fish game from `initial` (whale first) until no action
/// moves by `threshold` in a round. The trace ends at that stop; the reported
/// whale numbers come from continuing to the fixed point.
pub fn whale_fish_trial(
    family: &PayoffFamily,
    fish_budgets: &[f64],
    initial: &StrategyProfile,
    threshold: f64,
    max_iterations: usize,
    order: UpdateOrder,
) -> Result<WhaleFishTrial> {
    let n = fish_budgets.len() + 1;
    let budgets: Vec<f64> = std::iter::once(f64::INFINITY)
        .chain(fish_budgets.iter().copied())
        .collect();
    let mut config = GameConfig::new(family.clone(), n)
        .with_order(order)
        .with_scenario(Scenario::Budgeted { budgets });
    config.threshold = threshold;
    config.max_iterations = max_iterations;
    config.stopping = Some(StoppingRule::Stationary);
    let trace = simulate(&config, initial)?;

    // Measure at the fixed point the threshold stop approximates, so the
    // saturation and exceedance properties are not blurred by the stop tolerance.
    let responder = BestResponder::new(family)?;
    config.threshold = REFINE_REL * responder.diagnostics().w.max(1.0);
    config.max_iterations = REFINE_ROUNDS;
    let refined = simulate(&config, trace.last())?;
    let last = refined.last();
    let mut unsaturated_fish = 0;
    for (k, &budget) in fish_budgets.iter().enumerate() {
        let i = k + 1;
        let free = responder.respond(last.others(i), f64::INFINITY)?.x;
        if budget < free && last.actions[i] != budget {
            unsaturated_fish += 1;
        }
    }
    Ok(WhaleFishTrial {
        fish_budgets: fish_budgets.to_vec(),
        whale_strategy: last.actions[0],
        whale_profit: refined.final_payoffs[0],
        unsaturated_fish,
        trace,
    })
}

/// Whale/fish results averaged over trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhaleFishReport {
    pub n_fish: usize,
    pub whale_strategy: f64,
    pub whale_profit: f64,
    /// Relative to the unconstrained equilibrium action `q/(n_fish + 1)`, in percent.
    pub pct_strategy_increase: f64,
    /// Relative to the equilibrium payoff `f(q)/(n_fish + 1)`, in percent.
    pub pct_profit_increase: f64,
    pub std_pct_strategy: f64,
    pub std_pct_profit: f64,
    pub converged_trials: usize,
    pub capped_trials: usize,
    pub unsaturated_fish: usize,
    /// Whale strategies below `q/(n_fish + 1)`.
    pub whale_below_equilibrium: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhaleFishOptions {
    pub threshold: f64,
    pub max_iterations: usize,
    pub order: UpdateOrder,
    pub exec: Execution,
}

impl Default for WhaleFishOptions {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            max_iterations: 10_000,
            order: UpdateOrder::default(),
            exec: Execution::default(),
        }
    }
}

/// Draws fish budgets from `U(0, q/n)`, fish starts from `U(0, M_i)` and the
/// whale's start from `U(0, w/n)`, `n = n_fish + 1`, and averages the whale's
/// outcome over `trials`.
pub fn whale_fish_experiment(
    family: &PayoffFamily,
    n_fish: usize,
    trials: usize,
    seed: u64,
    opts: &WhaleFishOptions,
) -> Result<WhaleFishReport> {
    let n = n_fish + 1;
    let eq = solve_symmetric(family, n)?;
    let base_strategy = eq.per_player;
    let base_profit = eq.equilibrium_payoff;
    let w = eq.diagnostics.w;

    let results: Vec<Result<WhaleFishTrial>> = map_indexed(opts.exec, trials, |trial| {
        let mut rng = trial_rng(seed, trial as u64);
        let budgets: Vec<f64> = (0..n_fish)
            .map(|_| rng.gen_range(0.0..base_strategy))
            .collect();
        let mut start = vec![rng.gen_range(0.0..w / n as f64)];
        start.extend(
            budgets
                .iter()
                .map(|&m| if m > 0.0 { rng.gen_range(0.0..m) } else { 0.0 }),
        );
        let start = StrategyProfile::new(start)?;
        whale_fish_trial(
            family,
            &budgets,
            &start,
            opts.threshold,
            opts.max_iterations,
            opts.order,
        )
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let pct_s: Vec<f64> = results
        .iter()
        .map(|r| 100.0 * (r.whale_strategy - base_strategy) / base_strategy)
        .collect();
    let pct_p: Vec<f64> = results
        .iter()
        .map(|r| 100.0 * (r.whale_profit - base_profit) / base_profit)
        .collect();
    let (pct_strategy_increase, std_pct_strategy) = mean_std(&pct_s);
    let (pct_profit_increase, std_pct_profit) = mean_std(&pct_p);
    let ws: Vec<f64> = results.iter().map(|r| r.whale_strategy).collect();
    let wp: Vec<f64> = results.iter().map(|r| r.whale_profit).collect();
    let converged_trials = results
        .iter()
        .filter(|r| r.trace.stop == StopReason::Converged)
        .count();

    Ok(WhaleFishReport {
        n_fish,
        whale_strategy: mean_std(&ws).0,
        whale_profit: mean_std(&wp).0,
        pct_strategy_increase,
        pct_profit_increase,
        std_pct_strategy,
        std_pct_profit,
        converged_trials,
        capped_trials: results.len() - converged_trials,
        unsaturated_fish: results.iter().map(|r| r.unsaturated_fish).sum(),
        // small slack for the stationarity stop
        whale_below_equilibrium: results
            .iter()
            .filter(|r| r.whale_strategy < base_strategy * (1.0 - 1e-9))
            .count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power() -> PayoffFamily {
        PayoffFamily::default_power()
    }

    fn cfmm() -> PayoffFamily {
        PayoffFamily::default_cfmm()
    }

    #[test]
    fn start_at_equilibrium_is_converged() {
        let cfg = GameConfig::new(power(), 4);
        let q = solve_symmetric(&power(), 4).unwrap().q;
        let trace = simulate(&cfg, &StrategyProfile::uniform(4, q / 4.0).unwrap()).unwrap();
        assert_eq!(trace.converged_at, Some(0));
        assert_eq!(trace.iterations(), 0);
    }

    #[test]
    fn single_player_jumps_to_argmax() {
        for f in [power(), cfmm()] {
            let cfg = GameConfig::new(f.clone(), 1);
            let d = equilibrium_diagnostics(&f).unwrap();
            let trace = simulate(&cfg, &StrategyProfile::new(vec![0.9 * d.w]).unwrap()).unwrap();
            assert_eq!(trace.converged_at, Some(1));
            assert_relative_eq!(trace.last().actions[0], d.argmax, max_relative = 1e-9);
        }
    }

    #[test]
    fn two_player_power_converges() {
        let cfg = GameConfig::new(power(), 2).with_seed(11);
        let start = init_uniform(&cfg, 0).unwrap();
        let trace = simulate(&cfg, &start).unwrap();
        assert!(trace.converged_at.is_some());
        for x in &trace.last().actions {
            assert!((x - 112.5).abs() < 0.1);
        }
    }

    #[test]
    fn init_uniform_bounds_and_determinism() {
        let cfg = GameConfig::new(power(), 4).with_seed(3);
        let a = init_uniform(&cfg, 5).unwrap();
        assert!(a.actions.iter().all(|&x| x > 0.0 && x < 100.0));
        assert_eq!(a, init_uniform(&cfg, 5).unwrap());
        assert_ne!(a, init_uniform(&cfg, 6).unwrap());
        let cfg = GameConfig::new(cfmm(), 2);
        let b = init_uniform(&cfg, 0).unwrap();
        assert!(b.actions.iter().all(|&x| x > 0.0 && x < 23.99));
    }

    #[test]
    fn bounded_update_respects_delta() {
        let delta = 0.7;
        let cfg = GameConfig::new(power(), 5).with_scenario(Scenario::BoundedUpdate { delta });
        let trace = simulate(&cfg, &init_uniform(&cfg, 0).unwrap()).unwrap();
        assert!(trace.converged_at.is_some());
        for pair in trace.profiles.windows(2) {
            for (a, b) in pair[0].actions.iter().zip(&pair[1].actions) {
                assert!((a - b).abs() <= delta + 1e-12);
                assert!(*b >= 0.0);
            }
        }
    }

    #[test]
    fn budgets_are_respected() {
        let budgets = vec![10.0, 20.0, 300.0];
        let cfg = GameConfig::new(power(), 3).with_scenario(Scenario::Budgeted {
            budgets: budgets.clone(),
        });
        let trace = simulate(&cfg, &StrategyProfile::new(vec![50.0, 50.0, 50.0]).unwrap()).unwrap();
        for p in &trace.profiles[1..] {
            for (x, m) in p.actions.iter().zip(&budgets) {
                assert!(*x <= *m);
            }
        }
        assert_eq!(trace.stop, StopReason::Converged);
    }

    #[test]
    fn simultaneous_updates_oscillate_for_many_players() {
        // The symmetric mode of the linearized Jacobi map has eigenvalue
        // (n-1) * BR'(y*) < -1 for n >= 4, so simultaneous play cycles.
        let mut cfg = GameConfig::new(power(), 6)
            .with_order(UpdateOrder::Simultaneous)
            .with_seed(2);
        cfg.max_iterations = 500;
        let trace = simulate(&cfg, &init_uniform(&cfg, 0).unwrap()).unwrap();
        assert_eq!(trace.stop, StopReason::IterationCap);
        let mut cfg = GameConfig::new(power(), 2).with_order(UpdateOrder::Simultaneous);
        cfg.max_iterations = 500;
        let trace = simulate(&cfg, &init_uniform(&cfg, 0).unwrap()).unwrap();
        assert_eq!(trace.stop, StopReason::Converged);
    }

    #[test]
    fn traces_are_deterministic() {
        let cfg = GameConfig::new(cfmm(), 6).with_seed(99);
        let a = simulate(&cfg, &init_uniform(&cfg, 3).unwrap()).unwrap();
        let b = simulate(&cfg, &init_uniform(&cfg, 3).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = GameConfig::new(power(), 2);
        cfg.threshold = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = GameConfig::new(power(), 2).with_scenario(Scenario::BoundedUpdate { delta: 0.0 });
        assert!(cfg.validate().is_err());
        let cfg =
            GameConfig::new(power(), 2).with_scenario(Scenario::Budgeted { budgets: vec![1.0] });
        assert!(cfg.validate().is_err());
        let cfg = GameConfig::new(power(), 2).with_scenario(Scenario::Budgeted {
            budgets: vec![1.0, -1.0],
        });
        assert!(cfg.validate().is_err());
        assert!(simulate(
            &GameConfig::new(power(), 2),
            &StrategyProfile::uniform(3, 1.0).unwrap()
        )
        .is_err());
        assert!(StrategyProfile::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn lone_whale_plays_argmax() {
        let r = whale_fish_experiment(&power(), 0, 5, 1, &WhaleFishOptions::default()).unwrap();
        assert!((r.whale_strategy - 100.0).abs() < 1e-6);
        assert!(r.pct_strategy_increase.abs() < 1e-6);
        assert!(r.pct_profit_increase.abs() < 1e-6);
    }

    #[test]
    fn broke_fish_leave_whale_alone() {
        let start = StrategyProfile::new(vec![10.0, 0.0, 0.0, 0.0]).unwrap();
        let t = whale_fish_trial(
            &power(),
            &[0.0, 0.0, 0.0],
            &start,
            0.1,
            1000,
            UpdateOrder::Sequential,
        )
        .unwrap();
        assert_relative_eq!(t.whale_strategy, 100.0, max_relative = 1e-9);
        assert_eq!(t.trace.last().actions[1..], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn fish_saturate_and_whale_overplays() {
        for f in [power(), cfmm()] {
            let r = whale_fish_experiment(&f, 5, 20, 4, &WhaleFishOptions::default()).unwrap();
            assert_eq!(r.unsaturated_fish, 0);
            assert_eq!(r.whale_below_equilibrium, 0);
            assert_eq!(r.capped_trials, 0);
            assert!(r.pct_strategy_increase > 0.0 && r.pct_profit_increase > 0.0);
        }
    }

    #[test]
    fn single_small_fish_can_leave_power_whale_below_share() {
        // power, two players: q/2 = 112.5 but the whale's reply to a tiny fish
        // sits near argmax f = 100
        let start = StrategyProfile::new(vec![50.0, 0.0]).unwrap();
        let t =
            whale_fish_trial(&power(), &[1.0], &start, 0.1, 1000, UpdateOrder::Sequential).unwrap();
        assert_eq!(t.trace.last().actions[1], 1.0);
        assert!(
            t.whale_strategy > 100.0 && t.whale_strategy < 112.5,
            "{}",
            t.whale_strategy
        );
    }

    #[test]
    fn study_summary_counts_failures() {
        let outcomes = [
            TrialOutcome {
                trial: 0,
                iterations: Some(2),
            },
            TrialOutcome {
                trial: 1,
                iterations: None,
            },
            TrialOutcome {
                trial: 2,
                iterations: Some(4),
            },
        ];
        let s = IterationSummary::from_outcomes(&outcomes);
        assert_eq!((s.converged, s.failed), (2, 1));
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.std, 1.0);
    }

    #[test]
    fn single_player_study() {
        let pts = convergence_study(&power(), &[1], 10, 0, &StudyOptions::default()).unwrap();
        assert!(pts[0].summary.mean <= 1.0);
    }
}
