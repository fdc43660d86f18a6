//! One-dimensional search primitives: golden-section maximization of a
//! unimodal function, bisection on a decreasing function, and a
//! derivative-sign polish used after golden section when the slope of the
//! objective is available.

use crate::error::{GameError, Result};

/// 1/phi
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Stopping rules shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchTolerances {
    pub max_iterations: usize,
    /// Absolute floor on the final bracket width.
    pub abs_floor: f64,
}

impl Default for SearchTolerances {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            abs_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn width_floor(tol: &SearchTolerances, x: f64) -> f64 {
    tol.abs_floor.max(4.0 * f64::EPSILON * x.abs())
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// NaN values are treated as negative infinity so objectives such as
/// `log f` may be evaluated outside the region where `f > 0`.
pub fn golden_section_max<F>(lo: f64, hi: f64, tol: &SearchTolerances, mut f: F) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(GameError::Numeric(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c)?);
    let mut fd = sanitize(f(d)?);
    let mut iterations = 0;

    while iterations < tol.max_iterations && (b - a) > width_floor(tol, 0.5 * (a + b)) {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d)?);
        }
    }

    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    // The endpoints are never evaluated above; check them so that monotone
    // objectives report the boundary exactly.
    let f_lo = sanitize(f(lo)?);
    let f_hi = sanitize(f(hi)?);
    let mut best = (x, value);
    if f_lo > best.1 {
        best = (lo, f_lo);
    }
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    Ok(Maximum {
        x: best.0,
        value: best.1,
        iterations,
        lo: a,
        hi: b,
    })
}

/// Root of a nonincreasing function on `[lo, hi]` by bisection.
///
/// Requires `f(lo) >= 0 >= f(hi)`; returns the midpoint of the final bracket.
pub fn bisect_decreasing<F>(
    mut lo: f64,
    mut hi: f64,
    max_iterations: usize,
    mut f: F,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v.is_nan() {
            return Err(GameError::Numeric(format!("slope is NaN at {mid}")));
        }
        if v > 0.0 {
            lo = mid;
        } else if v < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Refines a golden-section maximizer by bisecting on the sign of the
/// objective's slope (positive left of the maximum, negative right of it).
///
/// `bracket` is widened geometrically, never past `[limit_lo, limit_hi]`,
/// until it straddles the sign change. If the slope does not change sign
/// inside the limits the maximizer sits on a boundary and `None` is returned.
pub fn polish_with_slope<S>(
    limit_lo: f64,
    limit_hi: f64,
    bracket: (f64, f64),
    mut slope: S,
) -> Result<Option<f64>>
where
    S: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = bracket;
    let mut step = (b - a).max(f64::EPSILON * a.abs().max(b.abs()).max(1.0));
    while slope(a)? < 0.0 {
        if a <= limit_lo {
            return Ok(None);
        }
        a = (a - step).max(limit_lo);
        step *= 2.0;
    }
    let mut step = (b - a).max(f64::EPSILON * b.abs().max(1.0));
    while slope(b)? > 0.0 {
        if b >= limit_hi {
            return Ok(None);
        }
        b = (b + step).min(limit_hi);
        step *= 2.0;
    }
    bisect_decreasing(a, b, 400, slope).map(Some)
}
