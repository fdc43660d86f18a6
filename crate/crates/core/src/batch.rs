//! Batched exchange clearing.
//!
//! Signed trade intents in asset A are netted into nonnegative residuals
//! with the same sum, the pooled residual is swapped through the pool's
//! forward exchange function, and the proceeds in asset B are split in
//! proportion to the residuals. Netting scales every positive order by the
//! same factor `1ᵀΔ / Σ max(Δ_i, 0)`; traders with negative intents end with
//! a zero residual and receive nothing in B.

use crate::error::{GameError, Result};
use crate::payoff::{pro_rata_payoff, CfmmParams, PayoffFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct BatchInstance {
    /// Positive entries tender A for B; negative entries want A.
    pub deltas: Vec<f64>,
    pub cfmm: CfmmParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub residuals: Vec<f64>,
    pub pool_input: f64,
    pub pool_output: f64,
    pub per_trader_b: Vec<f64>,
}

/// Sum that does not depend on the order of `values`.
fn order_free_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

pub fn clear(instance: &BatchInstance) -> Result<BatchOutcome> {
    instance.cfmm.validate()?;
    if let Some(d) = instance.deltas.iter().find(|d| !d.is_finite()) {
        return Err(GameError::InvalidParameter(format!(
            "trade amounts must be finite, got {d}"
        )));
    }
    let net = order_free_sum(instance.deltas.iter().copied());
    if !(net > 0.0) {
        return Err(GameError::NonPositiveNetDemand(net));
    }

    let residuals: Vec<f64> = if instance.deltas.iter().all(|&d| d >= 0.0) {
        instance.deltas.clone()
    } else {
        let positive = order_free_sum(instance.deltas.iter().map(|&d| d.max(0.0)));
        let scale = net / positive;
        instance
            .deltas
            .iter()
            .map(|&d| d.max(0.0) * scale)
            .collect()
    };
    let pool_input = order_free_sum(residuals.iter().copied());
    let pool_output = instance.cfmm.forward(pool_input);
    let per_trader_b = residuals
        .iter()
        .map(|r| r / pool_input * pool_output)
        .collect();

    Ok(BatchOutcome {
        residuals,
        pool_input,
        pool_output,
        per_trader_b,
    })
}

/// Profit of an arbitrageur who routes `x` through the batch alongside `y`
/// from others and sells the proceeds at external price `c`:
/// `x g(x + y) / (x + y) - c x`.
pub fn arbitrage_payoff(cfmm: &CfmmParams, price: f64, x: f64, y: f64) -> Result<f64> {
    cfmm.validate()?;
    if !(x >= 0.0 && y >= 0.0) {
        return Err(GameError::InvalidParameter(format!(
            "contributions must be nonnegative, got x={x} y={y}"
        )));
    }
    if !(price > 0.0) {
        return Err(GameError::InvalidParameter(format!(
            "price must be positive, got {price}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let total = x + y;
    Ok(x / total * cfmm.forward(total) - price * x)
}

/// The arbitrage payoff expressed as a pro-rata game payoff.
pub fn arbitrage_family(cfmm: &CfmmParams, price: f64) -> PayoffFamily {
    PayoffFamily::CfmmArbitrage {
        gamma: cfmm.gamma,
        r1: cfmm.r1,
        r2: cfmm.r2,
        price,
    }
}

/// Same quantity as [`arbitrage_payoff`], computed through the generic game payoff.
pub fn arbitrage_payoff_via_game(cfmm: &CfmmParams, price: f64, x: f64, y: f64) -> Result<f64> {
    pro_rata_payoff(&arbitrage_family(cfmm, price), x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbitrageSolution {
    pub t_star: f64,
    pub profit: f64,
    /// The optimum ran past the search cap and was clamped to it.
    pub capped: bool,
}

/// Inputs larger than this multiple of `R1 / gamma` are treated as unbounded.
pub const ARBITRAGE_CAP: f64 = 1e12;

/// Maximizes `g(t) - c t` over `t >= 0`. The optimum solves `g'(t) = c` when
/// `g'(0) > c` and is 0 otherwise.
pub fn optimal_arbitrage(cfmm: &CfmmParams, price: f64) -> Result<ArbitrageSolution> {
    cfmm.validate()?;
    if !(price > 0.0) {
        return Err(GameError::InvalidParameter(format!(
            "price must be positive, got {price}"
        )));
    }
    if cfmm.marginal_price() <= price {
        return Ok(ArbitrageSolution {
            t_star: 0.0,
            profit: 0.0,
            capped: false,
        });
    }
    let CfmmParams { gamma, r1, r2 } = *cfmm;
    // (R1 + gamma t)^2 = gamma R1 R2 / c
    let unclamped = ((gamma * r1 * r2 / price).sqrt() - r1) / gamma;
    let cap = ARBITRAGE_CAP * r1 / gamma;
    let capped = !(unclamped <= cap);
    let t_star = if capped { cap } else { unclamped };
    Ok(ArbitrageSolution {
        t_star,
        profit: cfmm.forward(t_star) - price * t_star,
        capped,
    })
}
