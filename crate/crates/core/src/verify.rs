//! Sampling checks of the curvature conditions behind the equilibrium results.
//!
//! * Chord condition: `f(a t) > a f(t)` for `a in (0, 1)`, `t > 0`; the chord
//!   from the origin lies strictly below `f`.
//! * Linear segment at zero: `f(t)/t = f(t')/t'` for some `0 < t < t'`. For
//!   concave `f` with `f(0) = 0` this happens exactly when `f` is linear on
//!   `[0, t]`, so it is the negation of the chord condition.
//! * Rosen probe: the monotonicity inequality of the pseudo-gradient at the
//!   pair `x = 1/2`, `y = 1` (all players), which pro-rata games can violate.

use rand::Rng;

use crate::error::Result;
use crate::exec::trial_rng;
use crate::payoff::{find_root_w, numeric_derivative, Payoff, FD_STEP_REL};

/// Strict inequalities must clear `STRICT_MARGIN * |f(t)|`.
pub const STRICT_MARGIN: f64 = 1e-12;
/// Chord weights are drawn from `[ALPHA_MIN, 1 - ALPHA_MIN]`; the gap vanishes at both ends.
pub const ALPHA_MIN: f64 = 1e-3;
/// Relative tolerance for the equal-ratio test.
pub const EQUAL_RATIO_TOL: f64 = 1e-10;
pub const DEFAULT_CHORD_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    ChordStrict,
    LinearSegmentAtZero,
    RosenMonotoneProbe,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::ChordStrict => "chord",
            Condition::LinearSegmentAtZero => "linear-segment",
            Condition::RosenMonotoneProbe => "rosen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// `lhs = f(alpha t)`, `rhs = alpha f(t)`.
    Chord {
        alpha: f64,
        t: f64,
        lhs: f64,
        rhs: f64,
    },
    /// Equal ratios `f(t)/t` and `f(t')/t'`.
    Segment {
        t: f64,
        t_prime: f64,
        ratio_t: f64,
        ratio_t_prime: f64,
    },
    /// Value of the probe expression for `n` players.
    Rosen { n: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub note: Option<String>,
}

/// Upper end of the sampling range: `w` if it exists, the table domain otherwise.
pub fn default_domain<P: Payoff + ?Sized>(payoff: &P) -> f64 {
    match find_root_w(payoff) {
        Ok(d) => d.w,
        Err(_) => {
            let max = payoff.domain_max();
            if max.is_finite() {
                max
            } else {
                payoff.scale_hint()
            }
        }
    }
}

/// Half the draws uniform on `(0, domain)`, half log-uniform down to
/// `1e-6 * domain`. Closer to the origin the chord gap of a smooth strictly
/// concave payoff falls below rounding noise.
fn sample_t<R: Rng>(rng: &mut R, domain: f64, k: usize) -> f64 {
    let t = if k.is_multiple_of(2) {
        domain * rng.gen_range(0.0..1.0f64)
    } else {
        domain * 10f64.powf(-6.0 * rng.gen_range(0.0..1.0f64))
    };
    if t > 0.0 {
        t
    } else {
        0.5 * domain
    }
}

/// Does `f(alpha t) > alpha f(t)` clear the strictness margin?
pub fn chord_strict_at<P: Payoff + ?Sized>(
    payoff: &P,
    alpha: f64,
    t: f64,
) -> Result<(bool, f64, f64)> {
    let lhs = payoff.eval(alpha * t)?;
    let ft = payoff.eval(t)?;
    let rhs = alpha * ft;
    Ok((lhs > rhs + STRICT_MARGIN * ft.abs(), lhs, rhs))
}

pub fn check_chord_condition<P: Payoff + ?Sized>(
    payoff: &P,
    samples: usize,
    seed: u64,
    domain: Option<f64>,
) -> Result<ConditionReport> {
    let domain = domain.unwrap_or_else(|| default_domain(payoff));
    let mut rng = trial_rng(seed, 0);
    for k in 0..samples {
        let t = sample_t(&mut rng, domain, k);
        let alpha = rng.gen_range(ALPHA_MIN..=1.0 - ALPHA_MIN);
        let (ok, lhs, rhs) = chord_strict_at(payoff, alpha, t)?;
        if !ok {
            return Ok(ConditionReport {
                condition: Condition::ChordStrict,
                holds: false,
                witness: Some(Witness::Chord { alpha, t, lhs, rhs }),
                samples: k + 1,
                note: None,
            });
        }
    }
    Ok(ConditionReport {
        condition: Condition::ChordStrict,
        holds: true,
        witness: None,
        samples,
        note: None,
    })
}

/// Random pairs `t < t'` on `(0, domain]` spanning many scales.
pub fn probe_pairs(domain: f64, samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = trial_rng(seed, 1);
    (0..samples)
        .map(|k| {
            let t_prime = sample_t(&mut rng, domain, k);
            let t = t_prime * rng.gen_range(0.01..0.99f64);
            (t, t_prime)
        })
        .collect()
}

/// Looks for `t < t'` with `f(t)/t = f(t')/t'` among `pairs`. A hit is
/// cross-checked by testing `f(s) = (f(t)/t) s` on points of `(0, t)`.
pub fn detect_linear_segment_at_zero<P: Payoff + ?Sized>(
    payoff: &P,
    pairs: &[(f64, f64)],
) -> Result<ConditionReport> {
    for &(a, b) in pairs {
        let (t, t_prime) = if a < b { (a, b) } else { (b, a) };
        if !(t > 0.0) || t == t_prime {
            continue;
        }
        let ratio_t = payoff.eval(t)? / t;
        let ratio_t_prime = payoff.eval(t_prime)? / t_prime;
        if (ratio_t - ratio_t_prime).abs() <= EQUAL_RATIO_TOL * ratio_t_prime.abs() {
            let collinear = (1..=8)
                .map(|k| t * k as f64 / 9.0)
                .try_fold(true, |acc, s| {
                    let fs = payoff.eval(s)?;
                    Ok::<bool, crate::GameError>(
                        acc && (fs - ratio_t * s).abs()
                            <= EQUAL_RATIO_TOL * (ratio_t * s).abs().max(f64::MIN_POSITIVE),
                    )
                })?;
            return Ok(ConditionReport {
                condition: Condition::LinearSegmentAtZero,
                holds: true,
                witness: Some(Witness::Segment {
                    t,
                    t_prime,
                    ratio_t,
                    ratio_t_prime,
                }),
                samples: pairs.len(),
                note: (!collinear)
                    .then(|| "equal ratios found but f is not linear on (0, t)".to_string()),
            });
        }
    }
    Ok(ConditionReport {
        condition: Condition::LinearSegmentAtZero,
        holds: false,
        witness: None,
        samples: pairs.len(),
        note: None,
    })
}

/// `(1/n)(f'(n) - f'(n/2)) + (1 - 1/n)(f(n) - 2 f(n/2))`; the monotonicity
/// inequality at this pair fails (`holds = false`) when the value is `<= 0`,
/// up to the strictness margin.
pub fn rosen_probe<P: Payoff + ?Sized>(payoff: &P, n: usize) -> Result<ConditionReport> {
    if n < 2 {
        return Err(crate::GameError::InvalidParameter(format!(
            "probe needs n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    let half = 0.5 * nf;
    let analytic = payoff
        .analytic_derivative(nf)
        .zip(payoff.analytic_derivative(half));
    let (d_full, d_half, note) = match analytic {
        Some((a, b)) => (a, b, None),
        None => (
            numeric_derivative(payoff, nf, FD_STEP_REL)?,
            numeric_derivative(payoff, half, FD_STEP_REL)?,
            Some("derivative by finite differences".to_string()),
        ),
    };
    let (f_full, f_half) = (payoff.eval(nf)?, payoff.eval(half)?);
    let value = (d_full - d_half) / nf + (1.0 - 1.0 / nf) * (f_full - 2.0 * f_half);
    let scale = (d_full.abs() + d_half.abs()) / nf + f_full.abs() + 2.0 * f_half.abs();
    // finite differences carry roughly eps / step relative error
    let rel = if note.is_some() { 1e-7 } else { STRICT_MARGIN };
    Ok(ConditionReport {
        condition: Condition::RosenMonotoneProbe,
        holds: value > rel * scale,
        witness: Some(Witness::Rosen { n, value }),
        samples: 1,
        note,
    })
}

/// Re-evaluates a witness and returns whether it still shows the reported verdict.
pub fn replay_witness<P: Payoff + ?Sized>(payoff: &P, report: &ConditionReport) -> Result<bool> {
    match report.witness {
        None => Ok(true),
        Some(Witness::Chord { alpha, t, .. }) => {
            Ok(chord_strict_at(payoff, alpha, t)?.0 == report.holds)
        }
        Some(Witness::Segment { t, t_prime, .. }) => {
            let again = detect_linear_segment_at_zero(payoff, &[(t, t_prime)])?;
            Ok(again.holds == report.holds)
        }
        Some(Witness::Rosen { n, .. }) => Ok(rosen_probe(payoff, n)?.holds == report.holds),
    }
}

/// `f(t) = min(t, cap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CappedLinear {
    pub cap: f64,
}

impl Payoff for CappedLinear {
    fn eval(&self, t: f64) -> Result<f64> {
        Ok(t.min(self.cap))
    }

    fn analytic_derivative(&self, t: f64) -> Option<f64> {
        Some(if t < self.cap { 1.0 } else { 0.0 })
    }

    fn scale_hint(&self) -> f64 {
        self.cap
    }
}

/// `f(t) = (4n)^2 - (4n - t)^2`, strictly concave and differentiable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedParabola {
    pub n: usize,
}

impl Payoff for ShiftedParabola {
    fn eval(&self, t: f64) -> Result<f64> {
        let c = 4.0 * self.n as f64;
        Ok(c * c - (c - t) * (c - t))
    }

    fn analytic_derivative(&self, t: f64) -> Option<f64> {
        Some(8.0 * self.n as f64 - 2.0 * t)
    }

    fn scale_hint(&self) -> f64 {
        4.0 * self.n as f64
    }
}
