//! Every equation form along the reduction chain, as right-hand sides and residuals.
//!
//! Writing the map as `(r, θ) -> (y(r), θ)` gives the direct equation
//!
//! ```text
//! y'' + (n-1) y'/r - (n-1) g(y) g'(y) / r^2 = 0
//! ```
//!
//! Inverting to `r(y)`, taking `x = ln r` and `z = x' = r'(y)/r(y)` turns it into a first-order
//! equation of Abel type in `z(y)`. Two sign conventions for the cubic term are carried side by
//! side (see [`SignVariant`]); which one the direct equation actually implies is decided
//! numerically by [`crate::analysis::adjudicate_sign`]. With `Z = 1/z` and `w = Z^2` one more
//! substitution gives the `w`-equation, again in two selectable forms.

use serde::Serialize;
use thiserror::Error;

use crate::integrator::{AbelSource, AbelTrajectory, Trajectory};
use crate::metric::{Dimension, MetricError, MetricProfile};
use crate::numeric::three_point_derivative;

/// Stable identifier of the direct second-order equation.
pub const DIRECT_ID: &str = "direct";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("the direct equation is singular at r = {0}; need r > 0")]
    SingularRadius(f64),
    #[error("independent variable y = {0} must be positive")]
    NonPositiveY(f64),
    #[error("w = {0} is negative")]
    NegativeW(f64),
    #[error("z = 0 has no reciprocal")]
    ZeroZ,
    #[error("need at least 3 samples for central differences, got {0}")]
    TooFewSamples(usize),
    #[error("y is not strictly monotone: y' = 0 at r = {r}")]
    MonotonicityViolation { r: f64 },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// State of the direct equation at source radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectState {
    pub r: f64,
    pub y: f64,
    pub yp: f64,
}

/// Which sign the cubic term of the Abel equation carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVariant {
    /// `z' - (n-2) z^2 - (n-1) z^3 g g' = 0`
    AsPrinted,
    /// `z' - (n-2) z^2 + (n-1) z^3 g g' = 0`, the form obtained from `x'' - (n-2)x'^2 + (n-1)x'^3 g g' = 0`
    Corrected,
}

impl SignVariant {
    pub const ALL: [SignVariant; 2] = [SignVariant::AsPrinted, SignVariant::Corrected];

    pub fn id(self) -> &'static str {
        match self {
            SignVariant::AsPrinted => "abel_as_printed",
            SignVariant::Corrected => "abel_corrected",
        }
    }

    /// Sign in front of `(n-1) z^3 g g'` on the right-hand side `z' = (n-2) z^2 ± ...`.
    fn cubic_sign(self) -> f64 {
        match self {
            SignVariant::AsPrinted => 1.0,
            SignVariant::Corrected => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            SignVariant::AsPrinted => SignVariant::Corrected,
            SignVariant::Corrected => SignVariant::AsPrinted,
        }
    }
}

/// Point `(y, z)` of a solution of the Abel equation, `z = d(ln r)/dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelState {
    pub y: f64,
    pub z: f64,
}

/// Point `(y, w)` with `w = z^-2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WState {
    pub y: f64,
    pub w: f64,
}

/// Form of the `w`-equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WForm {
    /// `w' = 2(n-2) sqrt(w) - 2(n-1) g g'`
    Printed,
    /// `w' = 2(n-2) sqrt(w) + 2(n-1) g g'`
    Alternative,
}

impl WForm {
    pub fn id(self) -> &'static str {
        match self {
            WForm::Printed => "w_printed",
            WForm::Alternative => "w_alternative",
        }
    }
}

/// Right-hand side `(dy/dr, dy'/dr)` of the direct equation.
pub fn direct_rhs(
    n: Dimension,
    p: &MetricProfile,
    s: DirectState,
) -> Result<(f64, f64), EquationError> {
    if !(s.r > 0.0) {
        return Err(EquationError::SingularRadius(s.r));
    }
    let gg = p.eval_gg(s.y)?;
    let m = n.sphere_dim();
    Ok((s.yp, -m * s.yp / s.r + m * gg / (s.r * s.r)))
}

/// `dz/dy` of the chosen Abel variant.
pub fn abel_rhs(
    n: Dimension,
    p: &MetricProfile,
    v: SignVariant,
    a: AbelState,
) -> Result<f64, EquationError> {
    if !(a.y > 0.0) {
        return Err(EquationError::NonPositiveY(a.y));
    }
    let gg = p.eval_gg(a.y)?;
    Ok(abel_rhs_with(n, v, a.z, gg))
}

pub(crate) fn abel_rhs_with(n: Dimension, v: SignVariant, z: f64, gg: f64) -> f64 {
    let z2 = z * z;
    (n.as_f64() - 2.0) * z2 + v.cubic_sign() * n.sphere_dim() * z2 * z * gg
}

/// Left-hand side of the chosen Abel variant for a given derivative `dz/dy`.
pub fn abel_residual_at(
    n: Dimension,
    p: &MetricProfile,
    v: SignVariant,
    a: AbelState,
    dz: f64,
) -> Result<f64, EquationError> {
    Ok(dz - abel_rhs(n, p, v, a)?)
}

/// Left-hand side of the direct equation at every interior sample, with `y''` taken from a
/// three-point difference of the neighbouring `y'` samples.
pub fn residual_direct(
    n: Dimension,
    p: &MetricProfile,
    samples: &[DirectState],
) -> Result<Vec<f64>, EquationError> {
    if samples.len() < 3 {
        return Err(EquationError::TooFewSamples(samples.len()));
    }
    let rs: Vec<f64> = samples.iter().map(|s| s.r).collect();
    let yps: Vec<f64> = samples.iter().map(|s| s.yp).collect();
    let ypp = three_point_derivative(&rs, &yps);
    samples[1..samples.len() - 1]
        .iter()
        .zip(ypp)
        .map(|(s, ypp)| {
            let (_, rhs) = direct_rhs(n, p, *s)?;
            Ok(ypp - rhs)
        })
        .collect()
}

/// Residual of the chosen Abel variant at every interior sample, `dz/dy` by central differences.
pub fn residual_abel(
    n: Dimension,
    p: &MetricProfile,
    v: SignVariant,
    samples: &[AbelState],
) -> Result<Vec<f64>, EquationError> {
    if samples.len() < 3 {
        return Err(EquationError::TooFewSamples(samples.len()));
    }
    if let Some(bad) = samples.iter().find(|a| !(a.y > 0.0)) {
        return Err(EquationError::NonPositiveY(bad.y));
    }
    let ys: Vec<f64> = samples.iter().map(|a| a.y).collect();
    let zs: Vec<f64> = samples.iter().map(|a| a.z).collect();
    let dz = three_point_derivative(&ys, &zs);
    samples[1..samples.len() - 1]
        .iter()
        .zip(dz)
        .map(|(a, dz)| abel_residual_at(n, p, v, *a, dz))
        .collect()
}

/// `z = r'(y)/r(y) = 1/(y'(r) r)` for every sample, ordered by increasing `y`.
pub fn transform_samples(samples: &[DirectState]) -> Result<Vec<AbelState>, EquationError> {
    let mut out = samples
        .iter()
        .map(|s| {
            if s.yp == 0.0 {
                Err(EquationError::MonotonicityViolation { r: s.r })
            } else {
                Ok(AbelState {
                    y: s.y,
                    z: 1.0 / (s.yp * s.r),
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.len() > 1 && out[0].y > out[out.len() - 1].y {
        out.reverse();
    }
    Ok(out)
}

/// Regard `r` as a function of `y` along a monotone trajectory and return `z(y)`.
pub fn transform_direct_to_abel(t: &Trajectory) -> Result<AbelTrajectory, EquationError> {
    Ok(AbelTrajectory {
        samples: transform_samples(&t.samples)?,
        source: AbelSource::Transformed,
        outcome: None,
    })
}

/// `dw/dy` in the chosen form.
pub fn w_rhs(
    n: Dimension,
    p: &MetricProfile,
    form: WForm,
    ws: WState,
) -> Result<f64, EquationError> {
    if ws.w < 0.0 {
        return Err(EquationError::NegativeW(ws.w));
    }
    let gg = p.eval_gg(ws.y)?;
    Ok(w_rhs_with(n, form, ws.w, gg))
}

pub(crate) fn w_rhs_with(n: Dimension, form: WForm, w: f64, gg: f64) -> f64 {
    let sign = match form {
        WForm::Printed => -1.0,
        WForm::Alternative => 1.0,
    };
    2.0 * (n.as_f64() - 2.0) * w.max(0.0).sqrt() + sign * 2.0 * n.sphere_dim() * gg
}

/// `w = 1/z^2`.
pub fn z_to_w(a: AbelState) -> Result<WState, EquationError> {
    if a.z == 0.0 {
        return Err(EquationError::ZeroZ);
    }
    Ok(WState {
        y: a.y,
        w: 1.0 / (a.z * a.z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_builtin, Family};
    use crate::numeric::logspace;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn euclid() -> MetricProfile {
        make_builtin(Family::Euclidean).unwrap()
    }

    fn hyper() -> MetricProfile {
        make_builtin(Family::Hyperbolic).unwrap()
    }

    #[test]
    fn identity_is_direct_equilibrium() {
        let s = DirectState {
            r: 1.0,
            y: 1.0,
            yp: 1.0,
        };
        assert_eq!(direct_rhs(dim(2), &euclid(), s).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn direct_rhs_hyperbolic_value() {
        // -0.25 + sinh(1)cosh(1)/4, 40-digit oracle 0.2033575509808773459585267478501577131108
        let s = DirectState {
            r: 2.0,
            y: 1.0,
            yp: 0.5,
        };
        let (a, b) = direct_rhs(dim(2), &hyper(), s).unwrap();
        assert_eq!(a, 0.5);
        assert!((b - 0.203_357_550_980_877_35).abs() < 1e-15);
    }

    #[test]
    fn direct_rhs_near_target_puncture() {
        let c = 0.7;
        let s = DirectState {
            r: 1.0,
            y: 1e-300,
            yp: c,
        };
        let (_, b) = direct_rhs(dim(3), &hyper(), s).unwrap();
        assert!((b + 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn direct_rhs_rejects_origin() {
        let s = DirectState {
            r: 0.0,
            y: 1.0,
            yp: 1.0,
        };
        assert_eq!(
            direct_rhs(dim(3), &hyper(), s),
            Err(EquationError::SingularRadius(0.0))
        );
    }

    #[test]
    fn abel_variants_on_identity() {
        let a = AbelState { y: 1.0, z: 1.0 };
        assert_eq!(
            abel_rhs(dim(2), &euclid(), SignVariant::Corrected, a).unwrap(),
            -1.0
        );
        assert_eq!(
            abel_rhs(dim(2), &euclid(), SignVariant::AsPrinted, a).unwrap(),
            1.0
        );
    }

    #[test]
    fn abel_zero_is_equilibrium() {
        for v in SignVariant::ALL {
            for p in [euclid(), hyper()] {
                let a = AbelState { y: 2.5, z: 0.0 };
                assert_eq!(abel_rhs(dim(3), &p, v, a).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn residual_abel_closed_form_identity() {
        let ys = logspace(0.5, 4.0, 2001);
        let samples: Vec<AbelState> = ys.iter().map(|&y| AbelState { y, z: 1.0 / y }).collect();
        let corrected = residual_abel(dim(2), &euclid(), SignVariant::Corrected, &samples).unwrap();
        let printed = residual_abel(dim(2), &euclid(), SignVariant::AsPrinted, &samples).unwrap();
        for (i, (c, p)) in corrected.iter().zip(&printed).enumerate() {
            let y = ys[i + 1];
            assert!(c.abs() < 1e-5 / (y * y), "corrected residual {c} at {y}");
            assert!((p + 2.0 / (y * y)).abs() < 1e-5 / (y * y));
        }
    }

    #[test]
    fn residual_direct_constant_map() {
        // first two terms vanish; the left-hand side is -(n-1) gg(y)/r^2
        let samples: Vec<DirectState> = [1.0, 1.5, 2.0]
            .iter()
            .map(|&r| DirectState { r, y: 1.0, yp: 0.0 })
            .collect();
        let res = residual_direct(dim(3), &hyper(), &samples).unwrap();
        let gg1 = 1.0f64.sinh() * 1.0f64.cosh();
        assert_eq!(res.len(), 1);
        assert!((res[0] + 2.0 * gg1 / 2.25).abs() < 1e-14);
    }

    #[test]
    fn residual_direct_identity_vanishes() {
        let samples: Vec<DirectState> = logspace(0.1, 10.0, 50)
            .into_iter()
            .map(|r| DirectState { r, y: r, yp: 1.0 })
            .collect();
        let res = residual_direct(dim(4), &euclid(), &samples).unwrap();
        assert!(res.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn residuals_need_three_samples() {
        let two = [AbelState { y: 1.0, z: 1.0 }, AbelState { y: 2.0, z: 0.5 }];
        assert_eq!(
            residual_abel(dim(3), &euclid(), SignVariant::Corrected, &two),
            Err(EquationError::TooFewSamples(2))
        );
        assert_eq!(
            residual_direct(dim(3), &euclid(), &[]),
            Err(EquationError::TooFewSamples(0))
        );
    }

    #[test]
    fn transform_identity_and_decreasing() {
        let inc: Vec<DirectState> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&r| DirectState { r, y: r, yp: 1.0 })
            .collect();
        for a in transform_samples(&inc).unwrap() {
            assert!((a.z - 1.0 / a.y).abs() < 1e-15);
        }
        let dec: Vec<DirectState> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&r| DirectState {
                r,
                y: 1.0 / r,
                yp: -1.0 / (r * r),
            })
            .collect();
        let out = transform_samples(&dec).unwrap();
        assert!(out.iter().all(|a| a.z < 0.0));
        assert!(out.windows(2).all(|w| w[1].y > w[0].y));
    }

    #[test]
    fn transform_rejects_flat_point() {
        let s = [DirectState {
            r: 1.0,
            y: 1.0,
            yp: 0.0,
        }];
        assert_eq!(
            transform_samples(&s),
            Err(EquationError::MonotonicityViolation { r: 1.0 })
        );
    }

    #[test]
    fn w_equation_forms() {
        let ws = WState { y: 0.0, w: 0.0 };
        assert_eq!(w_rhs(dim(3), &hyper(), WForm::Printed, ws).unwrap(), 0.0);
        let ws = WState { y: 1.3, w: 5.0 };
        let gg = hyper().eval_gg(1.3).unwrap();
        assert_eq!(
            w_rhs(dim(2), &hyper(), WForm::Printed, ws).unwrap(),
            -2.0 * gg
        );
        assert_eq!(
            w_rhs(dim(2), &hyper(), WForm::Alternative, ws).unwrap(),
            2.0 * gg
        );
        assert_eq!(
            w_rhs(dim(3), &hyper(), WForm::Printed, WState { y: 1.0, w: -1.0 }),
            Err(EquationError::NegativeW(-1.0))
        );
    }

    #[test]
    fn reciprocal_square() {
        assert_eq!(z_to_w(AbelState { y: 1.0, z: -0.5 }).unwrap().w, 4.0);
        assert_eq!(
            z_to_w(AbelState { y: 1.0, z: 0.0 }),
            Err(EquationError::ZeroZ)
        );
    }

    #[test]
    fn variants_differ_by_cubic_term() {
        let p = hyper();
        for n in 2..=5 {
            for &(y, z) in &[(0.3, 2.0), (1.5, -0.7), (4.0, 0.01)] {
                let a = AbelState { y, z };
                let d = abel_rhs(dim(n), &p, SignVariant::AsPrinted, a).unwrap()
                    - abel_rhs(dim(n), &p, SignVariant::Corrected, a).unwrap();
                let expect = 2.0 * (n as f64 - 1.0) * z * z * z * p.eval_gg(y).unwrap();
                assert!((d - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            }
        }
    }
}
