//! Rotationally symmetric model spaces.
//!
//! A target model space is `S^{n-1} x [0, inf)` with metric `g(r)^2 dθ^2 + dr^2`. Everything
//! downstream only needs the warping function `g`, its slope, and the product `g·g'` together
//! with that product's derivative; this module evaluates them, preferring closed forms and
//! falling back to finite differences.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{derivative, logspace};

/// Radius up to which polynomial profiles are checked for nonnegativity.
pub const PROBE_RADIUS: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("profile evaluated at negative radius r = {0}")]
    NegativeRadius(f64),
    #[error("invalid {family} profile: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },
    #[error("dimension n = {0} is below 2")]
    DimensionTooSmall(i64),
    #[error("unknown profile family `{0}`")]
    UnknownFamily(String),
}

/// The built-in warping-function families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `g(r) = r`
    Euclidean,
    /// `g(r) = sinh r`
    Hyperbolic,
    /// `g(r) = sinh(a r) / a`, curvature `-a^2`
    ScaledHyperbolic { a: f64 },
    /// `g(r) = r^k`
    Power { k: f64 },
    /// `g(r) = sum_i c_i r^i`
    Polynomial { coefficients: Vec<f64> },
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::Euclidean => "euclidean",
            Family::Hyperbolic => "hyperbolic",
            Family::ScaledHyperbolic { .. } => "scaled_hyperbolic",
            Family::Power { .. } => "power",
            Family::Polynomial { .. } => "polynomial",
        }
    }
}

/// Warping function `g` of a target metric, with whatever closed forms its family provides.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricProfile {
    name: String,
    family: Family,
    closed_forms: bool,
}

/// Build a profile from a built-in family, validating its parameters.
pub fn make_builtin(family: Family) -> Result<MetricProfile, MetricError> {
    let name = match &family {
        Family::Euclidean | Family::Hyperbolic => family.id().to_string(),
        Family::ScaledHyperbolic { a } => {
            if !(a.is_finite() && *a > 0.0) {
                return Err(MetricError::InvalidParameter {
                    family: "scaled_hyperbolic",
                    reason: format!("a must be positive and finite, got {a}"),
                });
            }
            format!("scaled_hyperbolic(a={a})")
        }
        Family::Power { k } => {
            if !(k.is_finite() && *k > 0.0) {
                return Err(MetricError::InvalidParameter {
                    family: "power",
                    reason: format!("k must be positive and finite, got {k}"),
                });
            }
            format!("power(k={k})")
        }
        Family::Polynomial { coefficients } => {
            validate_polynomial(coefficients)?;
            format!("polynomial({coefficients:?})")
        }
    };
    Ok(MetricProfile {
        name,
        family,
        closed_forms: true,
    })
}

fn validate_polynomial(coefficients: &[f64]) -> Result<(), MetricError> {
    let invalid = |reason: String| MetricError::InvalidParameter {
        family: "polynomial",
        reason,
    };
    if coefficients.is_empty() {
        return Err(invalid("no coefficients".into()));
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(invalid("coefficients must be finite".into()));
    }
    let probe = std::iter::once(0.0).chain(logspace(1e-6, PROBE_RADIUS, 4001));
    for r in probe {
        let g = horner(coefficients, r);
        if g < 0.0 {
            return Err(invalid(format!("g({r}) = {g} is negative")));
        }
    }
    Ok(())
}

fn horner(coefficients: &[f64], r: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

fn horner_derivative(coefficients: &[f64], r: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, c)| acc * r + i as f64 * c)
}

impl MetricProfile {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn has_closed_forms(&self) -> bool {
        self.closed_forms
    }

    /// The same `g` with every closed-form derivative dropped, so all derived
    /// quantities go through finite differences.
    pub fn numerical_only(&self) -> Self {
        MetricProfile {
            name: format!("{} [numerical]", self.name),
            family: self.family.clone(),
            closed_forms: false,
        }
    }

    /// `g(r)` without the domain check. Callers guarantee `r >= 0`.
    pub(crate) fn g_unchecked(&self, r: f64) -> f64 {
        match &self.family {
            Family::Euclidean => r,
            Family::Hyperbolic => r.sinh(),
            Family::ScaledHyperbolic { a } => (a * r).sinh() / a,
            Family::Power { k } => r.powf(*k),
            Family::Polynomial { coefficients } => horner(coefficients, r),
        }
    }

    pub fn g_prime_closed(&self, r: f64) -> Option<f64> {
        if !self.closed_forms {
            return None;
        }
        Some(match &self.family {
            Family::Euclidean => 1.0,
            Family::Hyperbolic => r.cosh(),
            Family::ScaledHyperbolic { a } => (a * r).cosh(),
            Family::Power { k } => k * r.powf(k - 1.0),
            Family::Polynomial { coefficients } => horner_derivative(coefficients, r),
        })
    }

    pub fn gg_closed(&self, r: f64) -> Option<f64> {
        if !self.closed_forms {
            return None;
        }
        match &self.family {
            Family::Euclidean => Some(r),
            Family::Hyperbolic => Some(r.sinh() * r.cosh()),
            Family::ScaledHyperbolic { a } => Some((a * r).sinh() * (a * r).cosh() / a),
            Family::Power { k } => Some(k * r.powf(2.0 * k - 1.0)),
            Family::Polynomial { .. } => None,
        }
    }

    pub fn gg_prime_closed(&self, r: f64) -> Option<f64> {
        if !self.closed_forms {
            return None;
        }
        match &self.family {
            Family::Euclidean => Some(1.0),
            Family::Hyperbolic => Some((2.0 * r).cosh()),
            Family::ScaledHyperbolic { a } => Some((2.0 * a * r).cosh()),
            Family::Power { k } => Some(k * (2.0 * k - 1.0) * r.powf(2.0 * k - 2.0)),
            Family::Polynomial { .. } => None,
        }
    }

    pub fn eval_g(&self, r: f64) -> Result<f64, MetricError> {
        check_radius(r)?;
        Ok(self.g_unchecked(r))
    }

    pub fn eval_g_prime(&self, r: f64) -> Result<f64, MetricError> {
        check_radius(r)?;
        Ok(self
            .g_prime_closed(r)
            .unwrap_or_else(|| derivative(|s| self.g_unchecked(s), r)))
    }

    /// `g(r) g'(r)`: closed form, else product with the closed slope, else product with a
    /// finite-difference slope.
    pub fn eval_gg(&self, r: f64) -> Result<f64, MetricError> {
        check_radius(r)?;
        Ok(self.gg_unchecked(r))
    }

    pub(crate) fn gg_unchecked(&self, r: f64) -> f64 {
        if let Some(v) = self.gg_closed(r) {
            return v;
        }
        let g = self.g_unchecked(r);
        let gp = self
            .g_prime_closed(r)
            .unwrap_or_else(|| derivative(|s| self.g_unchecked(s), r));
        g * gp
    }

    /// `(g g')'(r)`: closed form, else a finite difference of [`eval_gg`](Self::eval_gg)
    /// (one-sided near `r = 0`).
    pub fn eval_gg_prime(&self, r: f64) -> Result<f64, MetricError> {
        check_radius(r)?;
        Ok(self
            .gg_prime_closed(r)
            .unwrap_or_else(|| derivative(|s| self.gg_unchecked(s), r)))
    }
}

fn check_radius(r: f64) -> Result<(), MetricError> {
    if r < 0.0 || r.is_nan() {
        Err(MetricError::NegativeRadius(r))
    } else {
        Ok(())
    }
}

/// Dimension of both model spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: i64) -> Result<Self, MetricError> {
        if n < 2 || n > u32::MAX as i64 {
            return Err(MetricError::DimensionTooSmall(n));
        }
        Ok(Dimension(n as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `n - 1`
    pub fn sphere_dim(self) -> f64 {
        self.as_f64() - 1.0
    }
}

/// Euclidean source `(R^n, dr^2 + r^2 dθ^2)` paired with a target profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    pub n: Dimension,
    pub target: MetricProfile,
}

impl ModelPair {
    pub fn new(n: i64, target: MetricProfile) -> Result<Self, MetricError> {
        Ok(ModelPair {
            n: Dimension::new(n)?,
            target,
        })
    }
}

/// Profile block of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl ProfileSpec {
    pub fn to_profile(&self) -> Result<MetricProfile, MetricError> {
        let param = |family: &'static str| -> Result<f64, MetricError> {
            match self.params.as_slice() {
                [v] => Ok(*v),
                other => Err(MetricError::InvalidParameter {
                    family,
                    reason: format!("expected exactly one parameter, got {}", other.len()),
                }),
            }
        };
        let family = match self.family.as_str() {
            "euclidean" => Family::Euclidean,
            "hyperbolic" => Family::Hyperbolic,
            "scaled_hyperbolic" => Family::ScaledHyperbolic {
                a: param("scaled_hyperbolic")?,
            },
            "power" => Family::Power { k: param("power")? },
            "polynomial" => Family::Polynomial {
                coefficients: self.coefficients.clone(),
            },
            other => return Err(MetricError::UnknownFamily(other.to_string())),
        };
        make_builtin(family)
    }
}
