//! Equilibrium payoff versus the best fair allocation, and the resulting
//! price of anarchy `sup f / f(q)`.

use crate::equilibrium::solve_symmetric;
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::payoff::PayoffFamily;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoaReport {
    pub n: usize,
    /// `f(q) / n`
    pub equilibrium_payoff: f64,
    /// `sup f / n`
    pub fair_optimal_payoff: f64,
    /// `sup f / f(q)`
    pub poa: f64,
    /// Closed form, where the family has one.
    pub closed_form_poa: Option<f64>,
}

/// `n (beta n / (n + beta - 1))^(beta / (1 - beta))` for `f(t) = t^beta - gamma t`.
pub fn power_poa(beta: f64, n: usize) -> f64 {
    let n = n as f64;
    n * (beta * n / (n + beta - 1.0)).powf(beta / (1.0 - beta))
}

pub fn poa(family: &PayoffFamily, n: usize) -> Result<PoaReport> {
    let eq = solve_symmetric(family, n)?;
    let sup_f = eq.diagnostics.sup_f;
    let nf = n as f64;
    let fq = eq.equilibrium_payoff * nf;
    let closed_form_poa = match family {
        PayoffFamily::Power { beta, .. } => Some(power_poa(*beta, n)),
        _ => None,
    };
    Ok(PoaReport {
        n,
        equilibrium_payoff: eq.equilibrium_payoff,
        fair_optimal_payoff: sup_f / nf,
        poa: sup_f / fq,
        closed_form_poa,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoaGrowth {
    /// `poa(n)` for `n = 1..=n_max`.
    pub rows: Vec<PoaReport>,
    pub nondecreasing: bool,
    /// Start of the range over which the ratio bound is taken.
    pub n0: usize,
    /// `min_{n0 <= n <= n_max} poa(n) / n`
    pub min_ratio: f64,
}

impl PoaGrowth {
    /// The linear-growth verdict on the tabulated range.
    pub fn linear_growth(&self) -> bool {
        self.nondecreasing && self.min_ratio > 0.0
    }
}

/// Tabulates the price of anarchy for `n = 1..=n_max` and reports whether it
/// is nondecreasing and how far `poa(n)/n` stays from zero for `n >= n0`.
pub fn poa_growth_check(
    family: &PayoffFamily,
    n_max: usize,
    n0: usize,
    exec: Execution,
) -> Result<PoaGrowth> {
    let rows = map_indexed(exec, n_max, |i| poa(family, i + 1))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    // allow rounding-level dips
    let nondecreasing = rows
        .windows(2)
        .all(|w| w[1].poa >= w[0].poa * (1.0 - 1e-12));
    let min_ratio = rows
        .iter()
        .filter(|r| r.n >= n0)
        .map(|r| r.poa / r.n as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(PoaGrowth {
        rows,
        nondecreasing,
        n0,
        min_ratio,
    })
}
