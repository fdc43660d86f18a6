//! CSV schemas for experiment output.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::PoaReport;
use crate::batch::BatchOutcome;
use crate::dynamics::{DynamicsTrace, StudyPoint, WhaleFishReport};
use crate::error::Result;
use crate::verify::{ConditionReport, Witness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub trial: usize,
    /// Empty when the trial hit the iteration cap.
    pub iterations: Option<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummaryRow {
    pub n: usize,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub converged_trials: usize,
    pub failed_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSummaryRow {
    pub delta: f64,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub converged_trials: usize,
    pub failed_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub trial: usize,
    pub iteration: usize,
    pub player: usize,
    pub strategy: f64,
    pub payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoaRow {
    pub n: usize,
    pub eq_payoff: f64,
    pub fair_payoff: f64,
    pub poa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchInputRow {
    pub trader_id: String,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub trader_id: String,
    pub delta: f64,
    pub residual: f64,
    pub received_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhaleRow {
    pub n_fish: usize,
    pub whale_strategy: f64,
    pub whale_profit: f64,
    pub pct_strategy_increase: f64,
    pub pct_profit_increase: f64,
    pub std_pct_strategy: f64,
    pub std_pct_profit: f64,
    pub converged_trials: usize,
    pub capped_trials: usize,
}

/// One verification verdict. Witness columns depend on the condition:
/// chord `(alpha, t, f(alpha t), alpha f(t))`, linear segment
/// `(t, t', f(t)/t, f(t')/t')`, Rosen `(n, value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub condition: String,
    pub holds: bool,
    pub samples: usize,
    pub witness_a: Option<f64>,
    pub witness_b: Option<f64>,
    pub witness_c: Option<f64>,
    pub witness_d: Option<f64>,
    pub note: String,
}

pub fn write_csv<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| crate::GameError::Numeric(format!("write failed: {e}")))?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

/// Rows serialized to a string.
pub fn to_csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> crate::GameError {
    crate::GameError::InvalidParameter(format!("csv: {e}"))
}

pub fn study_rows(points: &[StudyPoint<usize>]) -> Vec<StudyRow> {
    points
        .iter()
        .flat_map(|p| {
            p.outcomes.iter().map(move |o| StudyRow {
                n: p.key,
                trial: o.trial,
                iterations: o.iterations,
                converged: o.iterations.is_some(),
            })
        })
        .collect()
}

pub fn study_summary_rows(points: &[StudyPoint<usize>]) -> Vec<StudySummaryRow> {
    points
        .iter()
        .map(|p| StudySummaryRow {
            n: p.key,
            mean_iterations: p.summary.mean,
            std_iterations: p.summary.std,
            converged_trials: p.summary.converged,
            failed_trials: p.summary.failed,
        })
        .collect()
}

pub fn delta_summary_rows(points: &[StudyPoint<f64>]) -> Vec<DeltaSummaryRow> {
    points
        .iter()
        .map(|p| DeltaSummaryRow {
            delta: p.key,
            mean_iterations: p.summary.mean,
            std_iterations: p.summary.std,
            converged_trials: p.summary.converged,
            failed_trials: p.summary.failed,
        })
        .collect()
}

pub fn trace_rows(
    trial: usize,
    trace: &DynamicsTrace,
    family: &crate::PayoffFamily,
) -> Result<Vec<TraceRow>> {
    let mut rows = Vec::new();
    for (iteration, profile) in trace.profiles.iter().enumerate() {
        let payoffs = profile.payoffs(family)?;
        for (player, (&strategy, payoff)) in profile.actions.iter().zip(payoffs).enumerate() {
            rows.push(TraceRow {
                trial,
                iteration,
                player,
                strategy,
                payoff,
            });
        }
    }
    Ok(rows)
}

pub fn poa_rows(reports: &[PoaReport]) -> Vec<PoaRow> {
    reports
        .iter()
        .map(|r| PoaRow {
            n: r.n,
            eq_payoff: r.equilibrium_payoff,
            fair_payoff: r.fair_optimal_payoff,
            poa: r.poa,
        })
        .collect()
}

pub fn batch_rows(inputs: &[BatchInputRow], outcome: &BatchOutcome) -> Vec<BatchRow> {
    inputs
        .iter()
        .zip(outcome.residuals.iter().zip(&outcome.per_trader_b))
        .map(|(input, (&residual, &received_b))| BatchRow {
            trader_id: input.trader_id.clone(),
            delta: input.delta,
            residual,
            received_b,
        })
        .collect()
}

pub fn whale_row(r: &WhaleFishReport) -> WhaleRow {
    WhaleRow {
        n_fish: r.n_fish,
        whale_strategy: r.whale_strategy,
        whale_profit: r.whale_profit,
        pct_strategy_increase: r.pct_strategy_increase,
        pct_profit_increase: r.pct_profit_increase,
        std_pct_strategy: r.std_pct_strategy,
        std_pct_profit: r.std_pct_profit,
        converged_trials: r.converged_trials,
        capped_trials: r.capped_trials,
    }
}

pub fn verify_row(r: &ConditionReport) -> VerifyRow {
    let (a, b, c, d) = match r.witness {
        None => (None, None, None, None),
        Some(Witness::Chord { alpha, t, lhs, rhs }) => (Some(alpha), Some(t), Some(lhs), Some(rhs)),
        Some(Witness::Segment {
            t,
            t_prime,
            ratio_t,
            ratio_t_prime,
        }) => (Some(t), Some(t_prime), Some(ratio_t), Some(ratio_t_prime)),
        Some(Witness::Rosen { n, value }) => (Some(n as f64), Some(value), None, None),
    };
    VerifyRow {
        condition: r.condition.as_str().to_string(),
        holds: r.holds,
        samples: r.samples,
        witness_a: a,
        witness_b: b,
        witness_c: c,
        witness_d: d,
        note: r.note.clone().unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn missing_iterations_are_blank() {
        let rows = vec![
            StudyRow {
                n: 2,
                trial: 0,
                iterations: Some(3),
                converged: true,
            },
            StudyRow {
                n: 2,
                trial: 1,
                iterations: None,
                converged: false,
            },
        ];
        let text = to_csv_string(&rows).unwrap();
        assert_eq!(
            text,
            "n,trial,iterations,converged\n2,0,3,true\n2,1,,false\n"
        );
        let back: Vec<StudyRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn batch_input_parses_with_spaces() {
        let rows: Vec<BatchInputRow> =
            read_csv("trader_id, delta\nalice, 10\nbob, -4\n".as_bytes()).unwrap();
        assert_eq!(
            rows[1],
            BatchInputRow {
                trader_id: "bob".into(),
                delta: -4.0
            }
        );
    }

    proptest! {
        #[test]
        fn poa_rows_round_trip(vals in prop::collection::vec((1usize..500, 0.0f64..1e6, 0.0f64..1e6, 1.0f64..1e3), 0..20)) {
            let rows: Vec<PoaRow> = vals.into_iter()
                .map(|(n, eq_payoff, fair_payoff, poa)| PoaRow { n, eq_payoff, fair_payoff, poa })
                .collect();
            let text = to_csv_string(&rows).unwrap();
            let back: Vec<PoaRow> = read_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(back, rows);
        }
    }
}
