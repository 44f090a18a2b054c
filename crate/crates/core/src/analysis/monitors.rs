//! Invariant monitors along sampled `z(y)` and `w(y)` trajectories.

use serde::Serialize;

use crate::equations::{SignVariant, WState};
use crate::integrator::AbelTrajectory;
use crate::metric::{Dimension, MetricProfile};

pub const LEMMA1_TOLERANCE: f64 = -1e-9;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const WBOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub variant: SignVariant,
    /// Minimum of `(n-2) + s (n-1) z g g'(y)`, `s` the cubic sign of the variant.
    pub min_value: f64,
    pub min_at_y: f64,
    pub first_violation_y: Option<f64>,
    pub samples: usize,
    pub pass: bool,
}

/// The bracket `(n-2) + (n-1) z g g'` multiplying `z^2` in `dz/dy`, taken with the variant's sign.
pub fn lemma1_monitor(
    n: Dimension,
    p: &MetricProfile,
    a: &AbelTrajectory,
    variant: SignVariant,
) -> Lemma1Report {
    let sign = match variant {
        SignVariant::AsPrinted => 1.0,
        SignVariant::Corrected => -1.0,
    };
    let mut min_value = f64::INFINITY;
    let mut min_at_y = f64::NAN;
    let mut first_violation_y = None;
    for s in &a.samples {
        let v = (n.as_f64() - 2.0) + sign * n.sphere_dim() * s.z * p.gg_unchecked(s.y.abs());
        if v < min_value || v.is_nan() {
            min_value = v;
            min_at_y = s.y;
        }
        if first_violation_y.is_none() && !(v >= LEMMA1_TOLERANCE) {
            first_violation_y = Some(s.y);
        }
    }
    Lemma1Report {
        variant,
        min_value,
        min_at_y,
        first_violation_y,
        samples: a.samples.len(),
        pass: first_violation_y.is_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub z_monotone_nondecreasing: bool,
    pub first_decrease_y: Option<f64>,
    pub min_y: f64,
    pub z_at_min_y: f64,
    pub heading_to_minus_infinity: bool,
}

/// Monotonicity of `z` in `y` and a divergence heuristic at the small-`y` end: `z <= -1e6`
/// there and at least ten times its value one decade of `y` higher.
pub fn corollary_monitor(a: &AbelTrajectory) -> CorollaryReport {
    let mut pts: Vec<(f64, f64)> = a.samples.iter().map(|s| (s.y, s.z)).collect();
    pts.sort_by(|l, r| l.0.total_cmp(&r.0));
    let first_decrease_y = pts.windows(2).find_map(|w| {
        let slack = MONOTONE_SLACK * w[0].1.abs().max(w[1].1.abs()).max(1.0);
        (w[1].1 < w[0].1 - slack).then_some(w[1].0)
    });
    let (min_y, z_at_min_y) = pts.first().copied().unwrap_or((f64::NAN, f64::NAN));
    let decade_up = pts.iter().find(|(y, _)| *y >= 10.0 * min_y);
    let heading_to_minus_infinity =
        z_at_min_y <= -1e6 && decade_up.is_some_and(|&(_, z)| z_at_min_y.abs() >= 10.0 * z.abs());
    CorollaryReport {
        z_monotone_nondecreasing: first_decrease_y.is_none(),
        first_decrease_y,
        min_y,
        z_at_min_y,
        heading_to_minus_infinity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WBoundReport {
    /// Maximum of `sqrt(w) - (n-2) y`.
    pub max_excess: f64,
    pub max_at_y: f64,
    pub pass: bool,
    /// For `n = 2` the bound forces `w = 0`.
    pub degenerate: bool,
}

pub fn wbound_monitor(n: Dimension, ws: &[WState]) -> WBoundReport {
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_at_y = f64::NAN;
    for s in ws {
        let e = s.w.max(0.0).sqrt() - (n.as_f64() - 2.0) * s.y;
        if e > max_excess || e.is_nan() {
            max_excess = e;
            max_at_y = s.y;
        }
    }
    WBoundReport {
        max_excess,
        max_at_y,
        pass: max_excess <= WBOUND_TOLERANCE,
        degenerate: n.get() == 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::AbelState;
    use crate::integrator::AbelSource;
    use crate::metric::{make_builtin, Family};
    use crate::numeric::logspace;

    fn traj(samples: Vec<AbelState>) -> AbelTrajectory {
        AbelTrajectory {
            samples,
            source: AbelSource::Transformed,
            outcome: None,
        }
    }

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn reciprocal_heads_to_minus_infinity() {
        let t = traj(
            logspace(1e-6, 1.0, 200)
                .into_iter()
                .map(|y| AbelState { y, z: -1.0 / y })
                .collect(),
        );
        let c = corollary_monitor(&t);
        assert!(c.z_monotone_nondecreasing);
        assert!(c.heading_to_minus_infinity);
        assert_eq!(c.min_y, 1e-6);
    }

    #[test]
    fn constant_z_is_monotone_not_divergent() {
        let t = traj(
            (1..10)
                .map(|i| AbelState {
                    y: i as f64,
                    z: -3.0,
                })
                .collect(),
        );
        let c = corollary_monitor(&t);
        assert!(c.z_monotone_nondecreasing && !c.heading_to_minus_infinity);
    }

    #[test]
    fn lemma_bracket_signs() {
        let h = make_builtin(Family::Hyperbolic).unwrap();
        let pos = traj(vec![
            AbelState { y: 1.0, z: 2.0 },
            AbelState { y: 2.0, z: 0.5 },
        ]);
        assert!(lemma1_monitor(dim(2), &h, &pos, SignVariant::AsPrinted).pass);
        // g g'(0) = 0 for the hyperbolic profile
        let zero = traj(vec![AbelState { y: 0.0, z: -1.0 }]);
        let r = lemma1_monitor(dim(2), &h, &zero, SignVariant::AsPrinted);
        assert_eq!(r.min_value, 0.0);
        assert!(r.pass);
        let neg = traj(vec![AbelState { y: 1.0, z: -1.0 }]);
        let r = lemma1_monitor(dim(2), &h, &neg, SignVariant::AsPrinted);
        assert_eq!(r.first_violation_y, Some(1.0));
        assert!(lemma1_monitor(dim(2), &h, &neg, SignVariant::Corrected).pass);
    }

    #[test]
    fn wbound_cases() {
        let ws: Vec<WState> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&y| WState { y, w: y * y })
            .collect();
        let r = wbound_monitor(dim(4), &ws);
        assert!(r.pass && !r.degenerate);
        assert_eq!(r.max_excess, -0.5);
        let r2 = wbound_monitor(dim(2), &ws);
        assert!(!r2.pass && r2.degenerate);
    }
}
