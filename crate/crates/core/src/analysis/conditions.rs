//! Hypothesis checks on a target profile over a finite log-spaced grid.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::metric::ModelPair;
use crate::numeric::logspace;

/// Tolerance on the grid minimum of `(g g')'` for the monotonicity condition.
pub const C2_TOLERANCE: f64 = -1e-9;
/// The sup condition is strict; a grid estimate must clear the threshold by this margin.
pub const C3_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl Default for ConditionGrid {
    fn default() -> Self {
        ConditionGrid {
            r_min: 1e-4,
            r_max: 50.0,
            count: 2000,
        }
    }
}

impl ConditionGrid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_min.is_finite() && self.r_max.is_finite())
            || !(self.r_min > 0.0 && self.r_max > self.r_min)
        {
            return Err(format!(
                "need 0 < r_min < r_max, got r_min = {}, r_max = {}",
                self.r_min, self.r_max
            ));
        }
        if self.count < 2 {
            return Err(format!("need count >= 2, got {}", self.count));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        logspace(self.r_min, self.r_max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupLocation {
    Interior,
    RMin,
    RMax,
}

/// The checks `g(0) g'(0) >= 0`, `g g'(y) > 0` for `y > 0` and the sup condition, without the
/// monotonicity of `g g'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemarkReport {
    pub c1_pass: bool,
    pub gg_min: f64,
    pub gg_positive_pass: bool,
    pub c3_pass: bool,
    pub overall: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n: u32,
    pub profile: String,
    pub c1_value: f64,
    pub c1_pass: bool,
    pub c2_min: f64,
    pub c2_min_at: f64,
    pub c2_pass: bool,
    pub c3_sup: f64,
    pub c3_sup_at: f64,
    pub c3_sup_location: SupLocation,
    /// The sup is attained at a grid end and the values are still growing towards it.
    pub c3_boundary_divergent: bool,
    pub c3_threshold: f64,
    pub c3_threshold_num: u64,
    pub c3_threshold_den: u64,
    pub c3_margin: f64,
    pub c3_pass: bool,
    pub overall: bool,
    pub grid: ConditionGrid,
    pub remark: RemarkReport,
}

/// `(n-2)^2 / (n-1)` as an unreduced fraction and its value.
pub fn c3_threshold(n: u32) -> (u64, u64, f64) {
    let num = u64::from(n - 2).pow(2);
    let den = u64::from(n - 1);
    (num, den, num as f64 / den as f64)
}

pub fn check_conditions(
    pair: &ModelPair,
    grid: &ConditionGrid,
) -> Result<ConditionReport, AnalysisError> {
    grid.validate().map_err(AnalysisError::InvalidGrid)?;
    let p = &pair.target;
    let rs = grid.points();

    let c1_value = p.eval_gg(0.0)?;
    let c1_pass = c1_value >= 0.0;

    let mut c2_min = f64::INFINITY;
    let mut c2_min_at = rs[0];
    let mut gg_min = f64::INFINITY;
    let mut ratios = Vec::with_capacity(rs.len());
    for &r in &rs {
        let d = p.eval_gg_prime(r)?;
        if d < c2_min || d.is_nan() {
            c2_min = d;
            c2_min_at = r;
        }
        let gg = p.eval_gg(r)?;
        gg_min = gg_min.min(gg);
        ratios.push(gg / r);
    }
    let c2_pass = c2_min >= C2_TOLERANCE;

    let (imax, &c3_sup) = ratios
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| {
            if *cur.1 > *best.1 {
                cur
            } else {
                best
            }
        });
    let last = ratios.len() - 1;
    let (c3_sup_location, c3_boundary_divergent) = if imax == last {
        (SupLocation::RMax, ratios[last] > ratios[last - 1])
    } else if imax == 0 {
        (SupLocation::RMin, ratios[0] > ratios[1])
    } else {
        (SupLocation::Interior, false)
    };
    let (num, den, c3_threshold) = c3_threshold(pair.n.get());
    let c3_pass = c3_sup > c3_threshold + C3_MARGIN;
    let gg_positive_pass = gg_min > 0.0;

    Ok(ConditionReport {
        n: pair.n.get(),
        profile: p.name().to_string(),
        c1_value,
        c1_pass,
        c2_min,
        c2_min_at,
        c2_pass,
        c3_sup,
        c3_sup_at: rs[imax],
        c3_sup_location,
        c3_boundary_divergent,
        c3_threshold,
        c3_threshold_num: num,
        c3_threshold_den: den,
        c3_margin: c3_sup - c3_threshold,
        c3_pass,
        overall: c1_pass && c2_pass && c3_pass,
        grid: *grid,
        remark: RemarkReport {
            c1_pass,
            gg_min,
            gg_positive_pass,
            c3_pass,
            overall: c1_pass && gg_positive_pass && c3_pass,
        },
    })
}
