//! First-order integrations in the target radius `y`: the Abel equation for `z(y)` and the
//! `w`-equation.

use serde::Serialize;

use super::direct::IntegrationError;
use super::dopri::{Advance, Stepper};
use crate::equations::{abel_rhs_with, w_rhs_with, AbelState, SignVariant, WForm, WState};
use crate::metric::ModelPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub z_cap: f64,
    pub z_zero_tol: f64,
}

impl Default for AbelConfig {
    fn default() -> Self {
        AbelConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            z_cap: 1e12,
            z_zero_tol: 1e-14,
        }
    }
}

impl AbelConfig {
    fn validate(&self) -> Result<(), IntegrationError> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.z_cap > 0.0
            && self.z_cap.is_finite()
            && self.z_zero_tol >= 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(IntegrationError::InvalidConfig(format!(
                "invalid Abel integration config {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbelSource {
    /// Obtained from a direct-equation trajectory via `z = 1/(r y')`.
    Transformed,
    Integrated(SignVariant),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum AbelOutcome {
    Completed,
    ZeroReached {
        y: f64,
    },
    /// `|z|` reached the cap; `sign` is the sign of `z` there.
    Blowup {
        y: f64,
        sign: f64,
    },
    StepUnderflow {
        y: f64,
    },
}

/// Sampled `z(y)`. Integrated trajectories are ordered along the direction of integration;
/// transformed ones by increasing `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelTrajectory {
    pub samples: Vec<AbelState>,
    pub source: AbelSource,
    pub outcome: Option<AbelOutcome>,
}

impl AbelTrajectory {
    pub fn variant(&self) -> Option<SignVariant> {
        match self.source {
            AbelSource::Integrated(v) => Some(v),
            AbelSource::Transformed => None,
        }
    }
}

fn check_range(y_from: f64, y_to: f64) -> Result<(), IntegrationError> {
    let ok = y_from.is_finite() && y_to.is_finite() && y_from != y_to;
    if ok {
        Ok(())
    } else {
        Err(IntegrationError::InvalidInitial(format!(
            "bad y-range [{y_from}, {y_to}]"
        )))
    }
}

/// Integrate the chosen Abel variant from `(y_from, z0)` towards `y_to`, stopping when `z`
/// reaches zero or blows up: `|z| >= z_cap` or `|y dz/dy| >= z_cap max(1, |z|)`.
pub fn integrate_abel(
    pair: &ModelPair,
    v: SignVariant,
    cfg: &AbelConfig,
    z0: f64,
    y_from: f64,
    y_to: f64,
) -> Result<AbelTrajectory, IntegrationError> {
    cfg.validate()?;
    check_range(y_from, y_to)?;
    if !(y_from > 0.0 && y_to > 0.0) {
        return Err(IntegrationError::InvalidInitial(format!(
            "y-range [{y_from}, {y_to}] must lie in (0, inf)"
        )));
    }
    if !(z0.is_finite() && z0 != 0.0) {
        return Err(IntegrationError::InvalidInitial(format!(
            "need finite nonzero z0, got {z0}"
        )));
    }
    let n = pair.n;
    let p = &pair.target;
    let sys = |y: f64, u: &[f64; 1]| [abel_rhs_with(n, v, u[0], p.gg_unchecked(y))];
    let mut stepper = Stepper::new(
        &sys,
        y_from,
        [z0],
        y_to,
        cfg.rel_tol,
        cfg.abs_tol,
        1e-14 * (y_to - y_from).abs(),
        cfg.max_steps,
    );
    let mut samples = vec![AbelState { y: y_from, z: z0 }];
    let sign0 = z0.signum();
    let outcome = loop {
        match stepper.advance(y_to) {
            Advance::Step(seg) => {
                let z_at = |th: f64| seg.at_theta(th)[0];
                let y_at = |th: f64| seg.t0 + th * seg.h;
                // |z| at the cap, or |d ln z / d ln y| at the cap: cubic blow-up
                // z ~ (y - y*)^(-1/2) reaches the step floor long before |z| does
                let hit_cap = |th: f64| {
                    let (y, z) = (y_at(th), z_at(th));
                    let rate = (sys(y, &[z])[0] * y).abs();
                    z.abs() >= cfg.z_cap || !(rate < cfg.z_cap * z.abs().max(1.0))
                };
                let z1 = z_at(1.0);
                let zero = sign0 * z1 <= cfg.z_zero_tol;
                let cap = hit_cap(1.0);
                if zero || cap {
                    let hit_zero = |th: f64| sign0 * z_at(th) <= cfg.z_zero_tol;
                    let th_zero = if zero {
                        bisect(hit_zero)
                    } else {
                        f64::INFINITY
                    };
                    let th_cap = if cap { bisect(hit_cap) } else { f64::INFINITY };
                    let th = th_zero.min(th_cap);
                    let ev = AbelState {
                        y: y_at(th),
                        z: z_at(th),
                    };
                    samples.push(ev);
                    break if th_zero <= th_cap {
                        AbelOutcome::ZeroReached { y: ev.y }
                    } else {
                        AbelOutcome::Blowup {
                            y: ev.y,
                            sign: ev.z.signum(),
                        }
                    };
                }
                samples.push(AbelState {
                    y: stepper.t(),
                    z: z1,
                });
                if stepper.t() == y_to {
                    break AbelOutcome::Completed;
                }
            }
            Advance::Underflow | Advance::MaxSteps => {
                break AbelOutcome::StepUnderflow { y: stepper.t() };
            }
        }
    };
    Ok(AbelTrajectory {
        samples,
        source: AbelSource::Integrated(v),
        outcome: Some(outcome),
    })
}

fn bisect<F: Fn(f64) -> bool>(hit: F) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if hit(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum WOutcome {
    Completed,
    /// `w` went negative, so `z = w^{-1/2}` ceases to exist.
    BecameNegative {
        y: f64,
    },
    StepUnderflow {
        y: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WTrajectory {
    pub form: WForm,
    pub samples: Vec<WState>,
    pub outcome: WOutcome,
}

/// Integrate the chosen `w`-equation from `(y_from, w0)` towards `y_to`. `y_from = 0` is
/// allowed (`w(0+) = 0` is the natural start).
pub fn integrate_w(
    pair: &ModelPair,
    form: WForm,
    cfg: &AbelConfig,
    w0: f64,
    y_from: f64,
    y_to: f64,
) -> Result<WTrajectory, IntegrationError> {
    cfg.validate()?;
    check_range(y_from, y_to)?;
    if !(y_from >= 0.0 && y_to >= 0.0) {
        return Err(IntegrationError::InvalidInitial(format!(
            "y-range [{y_from}, {y_to}] must lie in [0, inf)"
        )));
    }
    if !(w0.is_finite() && w0 >= 0.0) {
        return Err(IntegrationError::InvalidInitial(format!(
            "need finite w0 >= 0, got {w0}"
        )));
    }
    let n = pair.n;
    let p = &pair.target;
    let sys = |y: f64, u: &[f64; 1]| [w_rhs_with(n, form, u[0], p.gg_unchecked(y))];
    let mut stepper = Stepper::new(
        &sys,
        y_from,
        [w0],
        y_to,
        cfg.rel_tol,
        cfg.abs_tol,
        1e-14 * (y_to - y_from).abs(),
        cfg.max_steps,
    );
    let mut samples = vec![WState { y: y_from, w: w0 }];
    let outcome = loop {
        match stepper.advance(y_to) {
            Advance::Step(seg) => {
                let w1 = seg.end()[0];
                if w1 < 0.0 {
                    let th = bisect(|th| seg.at_theta(th)[0] < 0.0);
                    let y = seg.t0 + th * seg.h;
                    samples.push(WState {
                        y,
                        w: seg.at_theta(th)[0],
                    });
                    break WOutcome::BecameNegative { y };
                }
                samples.push(WState {
                    y: stepper.t(),
                    w: w1,
                });
                if stepper.t() == y_to {
                    break WOutcome::Completed;
                }
            }
            Advance::Underflow | Advance::MaxSteps => {
                break WOutcome::StepUnderflow { y: stepper.t() };
            }
        }
    };
    Ok(WTrajectory {
        form,
        samples,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_builtin, Family};

    fn pair(n: i64, f: Family) -> ModelPair {
        ModelPair::new(n, make_builtin(f).unwrap()).unwrap()
    }

    #[test]
    fn euclidean_n2_corrected_is_reciprocal() {
        let t = integrate_abel(
            &pair(2, Family::Euclidean),
            SignVariant::Corrected,
            &AbelConfig::default(),
            1.0,
            1.0,
            10.0,
        )
        .unwrap();
        assert_eq!(t.outcome, Some(AbelOutcome::Completed));
        for s in &t.samples {
            assert!((s.z - 1.0 / s.y).abs() <= 1e-8, "{s:?}");
        }
        assert_eq!(t.samples.last().unwrap().y, 10.0);
    }

    #[test]
    fn printed_variant_with_positive_bracket_decreases_downward() {
        // n=3 euclidean, z0 = -0.1 at y=1: (n-2) + (n-1) z gg = 1 - 0.2 y > 0 on (0, 1]
        let t = integrate_abel(
            &pair(3, Family::Euclidean),
            SignVariant::AsPrinted,
            &AbelConfig::default(),
            -0.1,
            1.0,
            0.01,
        )
        .unwrap();
        assert!(t.samples.windows(2).all(|w| w[1].z < w[0].z));
    }

    #[test]
    fn blowup_is_reported_with_sign() {
        // euclidean n=3 corrected: z' = z^2 - 2 z^3 y > 0 for z < 0, so z runs off to -inf
        // when integrating downward
        let t = integrate_abel(
            &pair(3, Family::Euclidean),
            SignVariant::Corrected,
            &AbelConfig::default(),
            -10.0,
            1.0,
            0.5,
        )
        .unwrap();
        match t.outcome {
            Some(AbelOutcome::Blowup { sign, .. }) => assert_eq!(sign, -1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = pair(3, Family::Hyperbolic);
        let c = AbelConfig::default();
        assert!(integrate_abel(&p, SignVariant::Corrected, &c, 0.0, 1.0, 2.0).is_err());
        assert!(integrate_abel(&p, SignVariant::Corrected, &c, 1.0, 0.0, 2.0).is_err());
        assert!(integrate_w(&p, WForm::Printed, &c, -1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn printed_w_goes_negative_for_n2() {
        // n=2: w' = -2 g g' < 0 for y > 0
        let t = integrate_w(
            &pair(2, Family::Hyperbolic),
            WForm::Printed,
            &AbelConfig::default(),
            0.0,
            0.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(t.outcome, WOutcome::BecameNegative { .. }));
    }
}
