//! The symmetric equilibrium and single-player best responses.
//!
//! Every player plays `q/n` at the unique equilibrium, where `q` maximizes
//! `q^(n-1) f(q)` on `(0, w)`. The numeric path runs golden-section search on
//! the log objective `(n-1) ln q + ln f(q)`, which is strictly concave, and
//! then refines with a sign bisection on its slope when `f'` is analytic.

use crate::error::{GameError, Result};
use crate::payoff::{
    find_root_w, pro_rata_payoff, CfmmParams, Payoff, PayoffDiagnostics, PayoffFamily,
};
use crate::search::{golden_section_max, polish_with_slope, SearchTolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Positive root of the arbitrage game's first-order quadratic.
    ClosedFormQuadratic,
    /// `q = ((beta + n - 1) / (n gamma))^(1/(1-beta))`.
    ClosedFormPower,
    GoldenSection,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::ClosedFormQuadratic => "closed-form-quadratic",
            SolveMethod::ClosedFormPower => "closed-form-power",
            SolveMethod::GoldenSection => "golden-section",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub n: usize,
    /// Total contribution at equilibrium.
    pub q: f64,
    pub per_player: f64,
    /// `f(q) / n`
    pub equilibrium_payoff: f64,
    /// `|(n-1) f(q) + q f'(q)|`
    pub foc_residual: f64,
    pub method: SolveMethod,
    /// Golden-section iterations; 0 for closed forms.
    pub iterations: usize,
    pub diagnostics: PayoffDiagnostics,
}

fn no_equilibrium(err: GameError) -> GameError {
    match err {
        GameError::NoPositiveRegion => GameError::NoEquilibrium(
            "payoff is never positive; only the trivial profile is stable".into(),
        ),
        GameError::NoFiniteRoot { bound } => GameError::NoEquilibrium(format!(
            "payoff stays positive up to {bound}; players always gain by contributing more"
        )),
        other => other,
    }
}

fn check_players(n: usize) -> Result<()> {
    if n == 0 {
        Err(GameError::InvalidParameter(
            "player count must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// Diagnostics of `payoff`, with missing roots reported as `NoEquilibrium`.
pub fn equilibrium_diagnostics<P: Payoff + ?Sized>(payoff: &P) -> Result<PayoffDiagnostics> {
    find_root_w(payoff).map_err(no_equilibrium)
}

/// `q = ((beta + n - 1) / (n gamma))^(1 / (1 - beta))`.
pub fn power_equilibrium_q(beta: f64, gamma: f64, n: usize) -> f64 {
    let n = n as f64;
    ((beta + n - 1.0) / (n * gamma)).powf(1.0 / (1.0 - beta))
}

/// Larger root of
/// `c n gamma^2 q^2 + (gamma^2 R2 + 2 c n R1 gamma - gamma^2 n R2) q + (c n R1^2 - gamma n R1 R2) = 0`.
pub fn cfmm_equilibrium_q(cfmm: &CfmmParams, price: f64, n: usize) -> Result<f64> {
    let CfmmParams { gamma, r1, r2 } = *cfmm;
    let c = price;
    let n = n as f64;
    let a = c * n * gamma * gamma;
    let b = gamma * gamma * r2 + 2.0 * c * n * r1 * gamma - gamma * gamma * n * r2;
    let k = c * n * r1 * r1 - gamma * n * r1 * r2;
    let disc = b * b - 4.0 * a * k;
    if !(disc >= 0.0) {
        return Err(GameError::NoEquilibrium(format!(
            "quadratic has no real root (discriminant {disc})"
        )));
    }
    let sq = disc.sqrt();
    // cancellation-free form of (-b + sq) / 2a
    let root = if b >= 0.0 {
        2.0 * k / (-b - sq)
    } else {
        (-b + sq) / (2.0 * a)
    };
    if !(root > 0.0) {
        return Err(GameError::NoEquilibrium(format!(
            "quadratic's larger root {root} is not positive"
        )));
    }
    Ok(root)
}

/// `|(n-1) f(q) + q f'(q)|`
pub fn foc_residual<P: Payoff + ?Sized>(payoff: &P, n: usize, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(GameError::InvalidParameter(format!(
            "q must be positive, got {q}"
        )));
    }
    Ok(((n as f64 - 1.0) * payoff.eval(q)? + q * payoff.derivative(q)?).abs())
}

fn finish<P: Payoff + ?Sized>(
    payoff: &P,
    n: usize,
    q: f64,
    method: SolveMethod,
    iterations: usize,
    diagnostics: PayoffDiagnostics,
) -> Result<EquilibriumResult> {
    let fq = payoff.eval(q)?;
    Ok(EquilibriumResult {
        n,
        q,
        per_player: q / n as f64,
        equilibrium_payoff: fq / n as f64,
        foc_residual: foc_residual(payoff, n, q)?,
        method,
        iterations,
        diagnostics,
    })
}

/// The unique symmetric equilibrium, using a closed form when the family has one.
pub fn solve_symmetric(family: &PayoffFamily, n: usize) -> Result<EquilibriumResult> {
    check_players(n)?;
    family.validate()?;
    match family {
        PayoffFamily::Power { beta, gamma } => {
            let diagnostics = equilibrium_diagnostics(family)?;
            let q = power_equilibrium_q(*beta, *gamma, n);
            finish(family, n, q, SolveMethod::ClosedFormPower, 0, diagnostics)
        }
        PayoffFamily::CfmmArbitrage { .. } => {
            let (cfmm, price) = family.cfmm_params().expect("cfmm family");
            let diagnostics = equilibrium_diagnostics(family)?;
            let q = cfmm_equilibrium_q(&cfmm, price, n)?;
            finish(
                family,
                n,
                q,
                SolveMethod::ClosedFormQuadratic,
                0,
                diagnostics,
            )
        }
        PayoffFamily::Tabulated(_) => solve_symmetric_numeric(family, n),
    }
}

/// The symmetric equilibrium by golden-section search, for any payoff.
pub fn solve_symmetric_numeric<P: Payoff + ?Sized>(
    payoff: &P,
    n: usize,
) -> Result<EquilibriumResult> {
    check_players(n)?;
    let diagnostics = equilibrium_diagnostics(payoff)?;
    let (q, iterations) =
        maximize_log_objective(payoff, n, &diagnostics, &SearchTolerances::default())?;
    finish(
        payoff,
        n,
        q,
        SolveMethod::GoldenSection,
        iterations,
        diagnostics,
    )
}

fn maximize_log_objective<P: Payoff + ?Sized>(
    payoff: &P,
    n: usize,
    diag: &PayoffDiagnostics,
    tol: &SearchTolerances,
) -> Result<(f64, usize)> {
    let m = n as f64 - 1.0;
    // q >= argmax f, with equality only for n = 1
    let lo = 0.5 * diag.argmax;
    let hi = diag.w;
    let objective = |q: f64| -> Result<f64> {
        let fq = payoff.eval(q)?;
        Ok(if fq > 0.0 {
            m * q.ln() + fq.ln()
        } else {
            f64::NEG_INFINITY
        })
    };
    let best = golden_section_max(lo, hi, tol, objective)?;
    let mut q = best.x;
    if payoff.analytic_derivative(q).is_some() {
        let slope = |s: f64| -> Result<f64> {
            let fs = payoff.eval(s)?;
            if fs <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(m / s + payoff.derivative(s)? / fs)
        };
        if let Some(x) = polish_with_slope(lo, hi, (best.lo, best.hi), slope)? {
            q = x;
        }
    }
    Ok((q, best.iterations))
}

/// Where a best response sits in `[0, budget]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Zero,
    Budget,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponseResult {
    pub x: f64,
    pub payoff: f64,
    pub boundary: Boundary,
}

/// Best response of one player to others contributing `y` in total, with
/// the action restricted to `[0, budget]` (`budget` may be infinite).
pub fn best_response(family: &PayoffFamily, y: f64, budget: f64) -> Result<BestResponseResult> {
    BestResponder::new(family)?.respond(y, budget)
}

/// Best-response oracle that caches the payoff diagnostics between calls.
#[derive(Debug, Clone)]
pub struct BestResponder<'a> {
    family: &'a PayoffFamily,
    diag: PayoffDiagnostics,
    tol: SearchTolerances,
}

impl<'a> BestResponder<'a> {
    pub fn new(family: &'a PayoffFamily) -> Result<Self> {
        family.validate()?;
        let diag = equilibrium_diagnostics(family)?;
        Ok(Self::with_diagnostics(family, diag))
    }

    pub fn with_diagnostics(family: &'a PayoffFamily, diag: PayoffDiagnostics) -> Self {
        Self {
            family,
            diag,
            tol: SearchTolerances::default(),
        }
    }

    pub fn diagnostics(&self) -> &PayoffDiagnostics {
        &self.diag
    }

    pub fn respond(&self, y: f64, budget: f64) -> Result<BestResponseResult> {
        if !(y >= 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "others' total must be nonnegative, got {y}"
            )));
        }
        if !(budget >= 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "budget must be nonnegative, got {budget}"
            )));
        }
        let x = match self.family {
            PayoffFamily::CfmmArbitrage { .. } => {
                let (cfmm, price) = self.family.cfmm_params().expect("cfmm family");
                cfmm_unconstrained_response(&cfmm, price, y).clamp(0.0, budget)
            }
            _ => self.generic_response(y, budget)?,
        };
        let payoff = pro_rata_payoff(self.family, x, y)?;
        let boundary = if x == 0.0 {
            Boundary::Zero
        } else if x == budget {
            Boundary::Budget
        } else {
            Boundary::Interior
        };
        Ok(BestResponseResult {
            x,
            payoff,
            boundary,
        })
    }

    fn generic_response(&self, y: f64, budget: f64) -> Result<f64> {
        // f(x + y) <= 0 once x + y >= w, so nothing beyond w - y can help.
        let upper = budget.min(self.diag.w - y);
        if !(upper > 0.0) {
            return Ok(0.0);
        }
        let family = self.family;
        // d/dx [x f(s)/s] scaled by s > 0
        let slope = |x: f64| -> Result<f64> {
            let s = x + y;
            if s == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(y * family.eval(s)? / s + x * family.derivative(s)?)
        };
        // utility is concave in x: still rising at the budget means the budget binds
        if upper == budget && pro_rata_payoff(family, upper, y)? > 0.0 && slope(upper)? >= 0.0 {
            return Ok(budget);
        }
        let utility = |x: f64| pro_rata_payoff(family, x, y);
        let best = golden_section_max(0.0, upper, &self.tol, utility)?;
        if best.value <= 0.0 {
            return Ok(0.0);
        }
        let mut x = best.x;
        if family.analytic_derivative(upper).is_some() {
            if let Some(polished) = polish_with_slope(0.0, upper, (best.lo, best.hi), slope)? {
                x = polished;
            }
        }
        Ok(x)
    }
}

/// Unconstrained best response for the arbitrage payoff,
/// `(sqrt((gamma R1 R2 + gamma^2 R2 y) / c) - R1) / gamma - y`, floored at 0.
pub fn cfmm_unconstrained_response(cfmm: &CfmmParams, price: f64, y: f64) -> f64 {
    let CfmmParams { gamma, r1, r2 } = *cfmm;
    let x = (((gamma * r1 * r2 + gamma * gamma * r2 * y) / price).sqrt() - r1) / gamma - y;
    x.max(0.0)
}
