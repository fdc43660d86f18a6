//! Concave pool payoffs `f` with `f(0) = 0`.
//!
//! Three families are built in: the arbitrage payoff of a constant-product
//! market maker, `f(t) = g(t) - c t` with `g(t) = gamma R2 t / (R1 + gamma t)`,
//! the power payoff `f(t) = t^beta - gamma t`, and piecewise-linear tables.
//! Anything else can take part in the numeric routines by implementing
//! [`Payoff`].

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::search::{golden_section_max, polish_with_slope, SearchTolerances};

/// Relative step of the central finite difference used when no analytic
/// derivative exists.
pub const FD_STEP_REL: f64 = 1e-6;

/// A pool payoff function on `[0, domain]`.
pub trait Payoff: Send + Sync {
    /// `f(t)`. Must return exactly 0 at `t = 0`.
    fn eval(&self, t: f64) -> Result<f64>;

    /// Closed-form `f'(t)`, if the payoff has one.
    fn analytic_derivative(&self, _t: f64) -> Option<f64> {
        None
    }

    /// Largest admissible input, `f64::INFINITY` when unbounded.
    fn domain_max(&self) -> f64 {
        f64::INFINITY
    }

    /// A representative input scale used to seed bracket searches.
    fn scale_hint(&self) -> f64 {
        1.0
    }

    /// `f'(t)`: analytic when available, finite differences otherwise.
    fn derivative(&self, t: f64) -> Result<f64> {
        match self.analytic_derivative(t) {
            Some(d) => Ok(d),
            None => numeric_derivative(self, t, FD_STEP_REL),
        }
    }
}

/// Finite-difference derivative with step `step_rel * max(1, t)`: central in
/// the interior, one-sided at the ends of the domain.
pub fn numeric_derivative<P: Payoff + ?Sized>(payoff: &P, t: f64, step_rel: f64) -> Result<f64> {
    let h = step_rel * t.abs().max(1.0);
    let max = payoff.domain_max();
    let lo = t - h;
    let hi = t + h;
    if lo >= 0.0 && hi <= max {
        Ok((payoff.eval(hi)? - payoff.eval(lo)?) / (2.0 * h))
    } else if hi <= max {
        Ok((payoff.eval(hi)? - payoff.eval(t)?) / h)
    } else if lo >= 0.0 {
        Ok((payoff.eval(t)? - payoff.eval(lo)?) / h)
    } else {
        Err(GameError::DomainExceeded { t: hi, max })
    }
}

/// Forward exchange function of a two-asset constant-product pool with a
/// fee: amount of the received asset returned for `t` of the tendered one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfmmParams {
    /// Fee multiplier in (0, 1].
    pub gamma: f64,
    /// Reserve of the tendered asset.
    pub r1: f64,
    /// Reserve of the received asset.
    pub r2: f64,
}

impl CfmmParams {
    pub fn new(gamma: f64, r1: f64, r2: f64) -> Result<Self> {
        let p = Self { gamma, r1, r2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(GameError::InvalidParameter(format!(
                "cfmm gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.r1 > 0.0 && self.r1.is_finite()) || !(self.r2 > 0.0 && self.r2.is_finite()) {
            return Err(GameError::InvalidParameter(format!(
                "cfmm reserves must be positive, got r1={} r2={}",
                self.r1, self.r2
            )));
        }
        Ok(())
    }

    /// g(t)
    pub fn forward(&self, t: f64) -> f64 {
        self.gamma * self.r2 * t / (self.r1 + self.gamma * t)
    }

    /// g'(t)
    pub fn forward_derivative(&self, t: f64) -> f64 {
        let denom = self.r1 + self.gamma * t;
        self.gamma * self.r1 * self.r2 / (denom * denom)
    }

    /// Marginal price at zero trade, g'(0) = gamma R2 / R1.
    pub fn marginal_price(&self) -> f64 {
        self.gamma * self.r2 / self.r1
    }
}

/// Piecewise-linear payoff through `(0, 0)` and strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    points: Vec<(f64, f64)>,
}

impl TryFrom<TableRepr> for Table {
    type Error = GameError;

    fn try_from(r: TableRepr) -> Result<Self> {
        Table::new(r.points)
    }
}

impl From<Table> for TableRepr {
    fn from(t: Table) -> Self {
        TableRepr {
            points: t.points().collect(),
        }
    }
}

impl Table {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(GameError::InvalidParameter(
                "table needs at least two points".into(),
            ));
        }
        if points[0] != (0.0, 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "table must start at (0, 0), got {:?}",
                points[0]
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(GameError::InvalidParameter(
                "table entries must be finite".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(GameError::InvalidParameter(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    /// Tabulates `f` on `0 = t_0 < t_1 < ... < t_k`.
    pub fn sample<F: Fn(f64) -> f64>(abscissae: &[f64], f: F) -> Result<Self> {
        Self::new(
            abscissae
                .iter()
                .map(|&t| (t, if t == 0.0 { 0.0 } else { f(t) }))
                .collect(),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn max_abscissa(&self) -> f64 {
        *self.xs.last().expect("validated table is nonempty")
    }

    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let max = self.max_abscissa();
        if !(t >= 0.0 && t <= max) {
            return Err(GameError::DomainExceeded { t, max });
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        // first index with xs[i] >= t; i >= 1 because t > 0 = xs[0]
        let i = self.xs.partition_point(|&x| x < t);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        Ok(y0 + (t - x0) * (y1 - y0) / (x1 - x0))
    }
}

/// The built-in payoff families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PayoffFamily {
    /// `f(t) = g(t) - price * t` for a constant-product forward exchange `g`.
    #[serde(rename = "cfmm")]
    CfmmArbitrage {
        gamma: f64,
        r1: f64,
        r2: f64,
        /// External market price `c` of the received asset.
        price: f64,
    },
    /// `f(t) = t^beta - gamma t`.
    #[serde(rename = "power")]
    Power { beta: f64, gamma: f64 },
    #[serde(rename = "table")]
    Tabulated(Table),
}

impl PayoffFamily {
    pub fn cfmm(gamma: f64, r1: f64, r2: f64, price: f64) -> Result<Self> {
        let f = PayoffFamily::CfmmArbitrage {
            gamma,
            r1,
            r2,
            price,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn power(beta: f64, gamma: f64) -> Result<Self> {
        let f = PayoffFamily::Power { beta, gamma };
        f.validate()?;
        Ok(f)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        Ok(PayoffFamily::Tabulated(Table::new(points)?))
    }

    /// The arbitrage parameters used in the numerical experiments:
    /// gamma = 0.99, R1 = 200, R2 = 250, c = 1.
    pub fn default_cfmm() -> Self {
        PayoffFamily::CfmmArbitrage {
            gamma: 0.99,
            r1: 200.0,
            r2: 250.0,
            price: 1.0,
        }
    }

    /// beta = 0.5, gamma = 0.05.
    pub fn default_power() -> Self {
        PayoffFamily::Power {
            beta: 0.5,
            gamma: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PayoffFamily::CfmmArbitrage {
                gamma,
                r1,
                r2,
                price,
            } => {
                CfmmParams {
                    gamma: *gamma,
                    r1: *r1,
                    r2: *r2,
                }
                .validate()?;
                if !(*price > 0.0 && price.is_finite()) {
                    return Err(GameError::InvalidParameter(format!(
                        "external price must be positive, got {price}"
                    )));
                }
                Ok(())
            }
            PayoffFamily::Power { beta, gamma } => {
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(GameError::InvalidParameter(format!(
                        "power beta must lie in (0, 1), got {beta}"
                    )));
                }
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return Err(GameError::InvalidParameter(format!(
                        "power gamma must be positive, got {gamma}"
                    )));
                }
                Ok(())
            }
            PayoffFamily::Tabulated(_) => Ok(()),
        }
    }

    pub fn cfmm_params(&self) -> Option<(CfmmParams, f64)> {
        match *self {
            PayoffFamily::CfmmArbitrage {
                gamma,
                r1,
                r2,
                price,
            } => Some((CfmmParams { gamma, r1, r2 }, price)),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PayoffFamily::CfmmArbitrage { .. } => "cfmm",
            PayoffFamily::Power { .. } => "power",
            PayoffFamily::Tabulated(_) => "table",
        }
    }
}

fn check_nonnegative(t: f64, max: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(GameError::DomainExceeded { t, max })
    }
}

impl Payoff for PayoffFamily {
    fn eval(&self, t: f64) -> Result<f64> {
        match self {
            PayoffFamily::CfmmArbitrage {
                gamma,
                r1,
                r2,
                price,
            } => {
                check_nonnegative(t, f64::INFINITY)?;
                Ok(gamma * r2 * t / (r1 + gamma * t) - price * t)
            }
            PayoffFamily::Power { beta, gamma } => {
                check_nonnegative(t, f64::INFINITY)?;
                Ok(t.powf(*beta) - gamma * t)
            }
            PayoffFamily::Tabulated(table) => table.interpolate(t),
        }
    }

    fn analytic_derivative(&self, t: f64) -> Option<f64> {
        match self {
            PayoffFamily::CfmmArbitrage {
                gamma,
                r1,
                r2,
                price,
            } => {
                let denom = r1 + gamma * t;
                Some(gamma * r1 * r2 / (denom * denom) - price)
            }
            PayoffFamily::Power { beta, gamma } => Some(beta * t.powf(beta - 1.0) - gamma),
            PayoffFamily::Tabulated(_) => None,
        }
    }

    fn domain_max(&self) -> f64 {
        match self {
            PayoffFamily::Tabulated(table) => table.max_abscissa(),
            _ => f64::INFINITY,
        }
    }

    fn scale_hint(&self) -> f64 {
        match self {
            PayoffFamily::CfmmArbitrage { gamma, r1, .. } => r1 / gamma,
            PayoffFamily::Power { beta, gamma } => (beta / gamma).powf(1.0 / (1.0 - beta)),
            PayoffFamily::Tabulated(table) => 0.5 * table.max_abscissa(),
        }
    }
}

/// Payoff of a player contributing `x` while the others contribute `y` in
/// total: `x f(x + y) / (x + y)`, and 0 when `x = 0`.
pub fn pro_rata_payoff<P: Payoff + ?Sized>(payoff: &P, x: f64, y: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let total = x + y;
    Ok(x * payoff.eval(total)? / total)
}

/// Tolerances for root and maximum location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffTolerances {
    /// Relative width at which the bisection for `w` stops.
    pub bracket_rel: f64,
    /// Give up once a bracket exceeds this multiple of its starting point.
    pub expansion_cap: f64,
    pub search: SearchTolerances,
}

impl Default for PayoffTolerances {
    fn default() -> Self {
        Self {
            bracket_rel: 1e-10,
            expansion_cap: 1e12,
            search: SearchTolerances::default(),
        }
    }
}

/// Where `f` is positive and where it peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffDiagnostics {
    /// Positive root, `f(w) = 0`.
    pub w: f64,
    /// `sup f`, attained at `argmax`.
    pub sup_f: f64,
    pub argmax: f64,
    /// A point with `0 < z < w` and `f(z) > 0`.
    pub positivity_witness: f64,
}

/// Locates the positive root `w` and the maximizer of `f`.
pub fn find_root_w<P: Payoff + ?Sized>(payoff: &P) -> Result<PayoffDiagnostics> {
    find_root_w_with(payoff, &PayoffTolerances::default())
}

pub fn find_root_w_with<P: Payoff + ?Sized>(
    payoff: &P,
    tol: &PayoffTolerances,
) -> Result<PayoffDiagnostics> {
    let domain = payoff.domain_max();
    let start = payoff.scale_hint().min(domain);
    if !(start > 0.0 && start.is_finite()) {
        return Err(GameError::Numeric(format!("bad scale hint {start}")));
    }

    // Concavity and f(0) = 0 make {f > 0} an interval (0, w), so if f(start)
    // is not positive the positive region, if any, lies below `start`.
    let mut z = start;
    let mut fz = payoff.eval(z)?;
    let mut halvings = 0;
    while fz <= 0.0 {
        halvings += 1;
        if halvings > 1100 || z < f64::MIN_POSITIVE {
            return Err(GameError::NoPositiveRegion);
        }
        z *= 0.5;
        fz = payoff.eval(z)?;
    }

    // Climb while f keeps increasing.
    let climb_cap = tol.expansion_cap * z;
    let mut t = z;
    let mut ft = fz;
    loop {
        let next = 2.0 * t;
        if next > domain {
            break;
        }
        let fnext = payoff.eval(next)?;
        if fnext <= ft {
            break;
        }
        t = next;
        ft = fnext;
        if t > climb_cap {
            return Err(GameError::NoFiniteRoot { bound: t });
        }
    }
    let lo = 0.5 * t;
    let hi = (2.0 * t).min(domain);
    let peak = golden_section_max(lo, hi, &tol.search, |s| payoff.eval(s))?;
    let mut argmax = peak.x;
    if payoff.analytic_derivative(argmax).is_some() {
        let slope = |s: f64| Ok(payoff.analytic_derivative(s).unwrap_or(f64::NAN));
        if let Some(x) = polish_with_slope(lo, hi, (peak.lo, peak.hi), slope)? {
            argmax = x;
        }
    }
    let mut sup_f = payoff.eval(argmax)?;
    // a polished point may lose to the golden one only by rounding
    if peak.value > sup_f + 1e-12 * sup_f.abs() {
        argmax = peak.x;
        sup_f = peak.value;
    }
    if sup_f <= 0.0 {
        return Err(GameError::NoPositiveRegion);
    }

    // Expand from the peak until f turns nonpositive.
    let root_cap = tol.expansion_cap * argmax;
    let mut lo = argmax;
    let mut hi = 2.0 * argmax;
    loop {
        if hi > domain {
            if payoff.eval(domain)? > 0.0 {
                return Err(GameError::NoFiniteRoot { bound: domain });
            }
            hi = domain;
            break;
        }
        if payoff.eval(hi)? <= 0.0 {
            break;
        }
        if hi > root_cap {
            return Err(GameError::NoFiniteRoot { bound: hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol.bracket_rel * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if payoff.eval(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = 0.5 * (lo + hi);

    Ok(PayoffDiagnostics {
        w,
        sup_f,
        argmax,
        positivity_witness: argmax,
    })
}
