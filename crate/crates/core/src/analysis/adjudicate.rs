//! Decide numerically which Abel sign variant the direct equation implies.

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::equations::{residual_abel, transform_samples, AbelState, SignVariant};
use crate::integrator::{
    integrate_direct, series_start, Direction, IntegrationConfig, Trajectory, VerdictTag,
};
use crate::metric::ModelPair;
use crate::numeric::logspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdjudicationConfig {
    /// Shooting parameter of the origin-regular seed.
    pub c: f64,
    pub r_start: f64,
    pub r_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Abel samples per decade of `y` on the coarsest level.
    pub per_decade: usize,
    /// Number of grid levels; each halves the spacing of the previous one.
    pub levels: usize,
}

impl Default for AdjudicationConfig {
    fn default() -> Self {
        AdjudicationConfig {
            c: 1.0,
            r_start: 0.1,
            r_end: 50.0,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            per_decade: 4000,
            levels: 3,
        }
    }
}

impl AdjudicationConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let ok = self.c > 0.0
            && self.c.is_finite()
            && self.r_start > 0.0
            && self.r_end > self.r_start
            && self.r_end.is_finite()
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.per_decade >= 2
            && self.levels >= 2;
        if ok {
            Ok(())
        } else {
            Err(AnalysisError::InvalidConfig(format!(
                "invalid adjudication config {self:?}"
            )))
        }
    }
}

/// Sup-residuals of both variants on nested grids in `y`, all measured on the nodes of the
/// coarsest grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub y_min: f64,
    pub y_max: f64,
    pub counts: Vec<usize>,
    pub variants: Vec<VariantEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantEvidence {
    pub variant: SignVariant,
    /// One sup-residual per level, coarsest first.
    pub sup_residuals: Vec<f64>,
    /// `sup[k] / sup[k+1]`.
    pub ratios: Vec<f64>,
    /// `(y, residual)` on the coarsest level, thinned for reporting.
    pub curve: Vec<(f64, f64)>,
}

impl RefinementStudy {
    pub fn evidence(&self, v: SignVariant) -> &VariantEvidence {
        self.variants
            .iter()
            .find(|e| e.variant == v)
            .expect("both variants are always evaluated")
    }
}

/// `z(y)` at log-spaced `y` read off the dense output of a monotone direct trajectory.
pub fn abel_samples(
    t: &Trajectory,
    y_min: f64,
    y_max: f64,
    count: usize,
) -> Result<Vec<AbelState>, AnalysisError> {
    let ys = logspace(y_min, y_max, count);
    let states = t.resample_in_y(&ys).ok_or_else(|| {
        AnalysisError::InvalidConfig(format!(
            "y-range [{y_min}, {y_max}] is not covered by the trajectory"
        ))
    })?;
    Ok(transform_samples(&states)?)
}

const CURVE_POINTS: usize = 200;

/// Evaluate both variants' residuals on `levels` nested grids over `[y_min, y_max]`.
pub fn refinement_study(
    pair: &ModelPair,
    t: &Trajectory,
    (y_min, y_max): (f64, f64),
    base_count: usize,
    levels: usize,
) -> Result<RefinementStudy, AnalysisError> {
    let mut counts = Vec::with_capacity(levels);
    let mut count = base_count;
    for _ in 0..levels {
        counts.push(count);
        count = 2 * count - 1;
    }
    let grids = counts
        .iter()
        .map(|&m| abel_samples(t, y_min, y_max, m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut variants = Vec::new();
    for v in SignVariant::ALL {
        let mut sups = Vec::with_capacity(levels);
        let mut curve = Vec::new();
        for (k, samples) in grids.iter().enumerate() {
            let res = residual_abel(pair.n, &pair.target, v, samples)?;
            // interior node j of level k is sample j + 1; coarse node i sits at sample i * 2^k
            let stride = 1usize << k;
            let at_coarse = (1..base_count - 1).map(|i| res[i * stride - 1]);
            let sup = at_coarse.fold(0.0f64, |m, r| {
                if r.abs() > m || r.is_nan() {
                    r.abs()
                } else {
                    m
                }
            });
            sups.push(sup);
            if k == 0 {
                let step = (res.len() / CURVE_POINTS).max(1);
                curve = res
                    .iter()
                    .enumerate()
                    .step_by(step)
                    .map(|(j, r)| (samples[j + 1].y, *r))
                    .collect();
            }
        }
        let ratios = sups.windows(2).map(|w| w[0] / w[1]).collect();
        variants.push(VariantEvidence {
            variant: v,
            sup_residuals: sups,
            ratios,
            curve,
        });
    }
    Ok(RefinementStudy {
        y_min,
        y_max,
        counts,
        variants,
    })
}

/// Samples per decade over `[y_min, y_max]`, at least three points.
pub fn count_for_density(y_min: f64, y_max: f64, per_decade: usize) -> usize {
    let decades = (y_max / y_min).log10();
    ((decades * per_decade as f64).ceil() as usize + 1).max(3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adjudication {
    pub selected: SignVariant,
    pub n: u32,
    pub profile: String,
    /// How the direct trajectory was seeded: `series` or `explicit`.
    pub seed: &'static str,
    pub trajectory_verdict: VerdictTag,
    pub study: RefinementStudy,
}

/// A variant converges when every refinement cuts its sup-residual at least in half.
const CONVERGENCE_RATIO: f64 = 2.0;

/// Shoot a direct trajectory, transform it to `z(y)` and select the variant whose residual
/// vanishes under grid refinement.
pub fn adjudicate_sign(
    pair: &ModelPair,
    cfg: &AdjudicationConfig,
) -> Result<Adjudication, AnalysisError> {
    cfg.validate()?;
    let icfg = IntegrationConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        far_field_decades: 0.0,
        ..IntegrationConfig::window(cfg.r_start, cfg.r_end)
    };
    let (seed, init) = match series_start(pair, cfg.c, cfg.r_start) {
        Ok(s) => ("series", (s.y0, s.yp0)),
        Err(_) => ("explicit", (cfg.c * cfg.r_start, cfg.c)),
    };
    let t = integrate_direct(pair, &icfg, init, Direction::Forward)?;
    let (y_min, y_max) = monotone_range(&t)?;
    let base = count_for_density(y_min, y_max, cfg.per_decade);
    let study = refinement_study(pair, &t, (y_min, y_max), base, cfg.levels)?;
    let converging: Vec<SignVariant> = study
        .variants
        .iter()
        .filter(|e| e.ratios.iter().all(|&r| r >= CONVERGENCE_RATIO))
        .map(|e| e.variant)
        .collect();
    log::info!(
        "adjudication n={} {}: {:?}",
        pair.n.get(),
        pair.target.name(),
        study
            .variants
            .iter()
            .map(|e| (e.variant.id(), &e.sup_residuals))
            .collect::<Vec<_>>()
    );
    match converging.as_slice() {
        [v] => Ok(Adjudication {
            selected: *v,
            n: pair.n.get(),
            profile: pair.target.name().to_string(),
            seed,
            trajectory_verdict: t.verdict.tag(),
            study,
        }),
        _ => Err(AnalysisError::Inconclusive(format!(
            "{} variants converge under refinement (sup-residuals {:?})",
            converging.len(),
            study
                .variants
                .iter()
                .map(|e| (e.variant.id(), e.sup_residuals.clone()))
                .collect::<Vec<_>>()
        ))),
    }
}

/// Range of `y` strictly inside the sampled part of a trajectory, where `y` is positive and
/// strictly monotone.
pub fn monotone_range(t: &Trajectory) -> Result<(f64, f64), AnalysisError> {
    let a = t.samples[0].y;
    let b = t.last().y;
    let (lo, hi) = (a.min(b), a.max(b));
    if !(lo > 0.0 && hi > lo * (1.0 + 1e-6)) || t.samples.len() < 3 {
        return Err(AnalysisError::InvalidConfig(format!(
            "trajectory covers no usable y-range ({lo}, {hi}); verdict {:?}",
            t.verdict
        )));
    }
    let pad = 1e-9 * (hi - lo);
    Ok((lo + pad, hi - pad))
}
