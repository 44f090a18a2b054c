//! Parameter sweeps of shooting solutions over both boundary regimes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::integrator::{
    decay_seed, integrate_direct, series_start, Direction, IntegrationConfig, IntegrationError,
    Trajectory, Verdict, VerdictTag,
};
use crate::metric::ModelPair;
use crate::numeric::logspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootingError {
    #[error("invalid c grid: {0}")]
    InvalidGrid(String),
    #[error("shot at c = {c} failed: {source}")]
    Shot {
        c: f64,
        #[source]
        source: IntegrationError,
    },
    #[error("verdict is {0} at both ends of the bracket")]
    SameVerdict(VerdictTag),
    #[error("degenerate bracket [{lo}, {hi}]")]
    DegenerateBracket { lo: f64, hi: f64 },
}

/// Which boundary behaviour a shot tries to realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `y(0) = 0`, `y -> inf` as `r -> inf`, `y' > 0`: regular start at the origin, shot forward.
    OriginRegular,
    /// `y -> inf` as `r -> 0+`, `y -> 0` as `r -> inf`, `y' < 0`: decaying seed at `r_end`,
    /// shot backward.
    InfinityDecay,
}

impl Regime {
    pub fn id(self) -> &'static str {
        match self {
            Regime::OriginRegular => "origin_regular",
            Regime::InfinityDecay => "infinity_decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CGrid {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl CGrid {
    pub fn validate(&self) -> Result<(), ShootingError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max > self.min)
        {
            return Err(ShootingError::InvalidGrid(format!(
                "need 0 < min < max, got min = {}, max = {}",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(ShootingError::InvalidGrid(format!(
                "need count >= 2, got {}",
                self.count
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        logspace(self.min, self.max, self.count)
    }

    /// Grid with every interval halved; its even-indexed points are this grid's points.
    pub fn refined(&self) -> CGrid {
        CGrid {
            count: 2 * self.count - 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub pair: ModelPair,
    pub regime: Regime,
    pub c_grid: CGrid,
    pub cfg: IntegrationConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub verdict: VerdictTag,
    pub r_event: Option<f64>,
    pub final_y: f64,
    pub final_yp: f64,
    /// Event located beyond the integration window during far-field continuation.
    pub beyond_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
    pub summary: BTreeMap<VerdictTag, usize>,
    pub any_diffeo_candidate: bool,
}

impl SweepReport {
    pub fn count(&self, tag: VerdictTag) -> usize {
        self.summary.get(&tag).copied().unwrap_or(0)
    }
}

/// One shot of the given regime with parameter `c`.
pub fn shoot(
    pair: &ModelPair,
    regime: Regime,
    c: f64,
    cfg: &IntegrationConfig,
) -> Result<Trajectory, IntegrationError> {
    match regime {
        Regime::OriginRegular => {
            let seed = series_start(pair, c, cfg.r_start)?;
            integrate_direct(pair, cfg, (seed.y0, seed.yp0), Direction::Forward)
        }
        Regime::InfinityDecay => {
            let seed = decay_seed(pair, c, cfg.r_end)?;
            integrate_direct(pair, cfg, (seed.y0, seed.yp0), Direction::Backward)
        }
    }
}

fn row(c: f64, t: &Trajectory) -> SweepRow {
    let last = t.last();
    SweepRow {
        c,
        verdict: t.verdict.tag(),
        r_event: t.verdict.r_event(),
        final_y: last.y,
        final_yp: last.yp,
        beyond_window: t
            .stats
            .far_field
            .is_some_and(|f| f.decided_verdict && t.verdict != Verdict::DiffeoCandidate),
    }
}

/// Shoot every `c` of the grid in parallel; rows come back ordered by `c`.
pub fn run_sweep(s: &SweepSpec) -> Result<SweepReport, ShootingError> {
    s.c_grid.validate()?;
    s.cfg.validate().map_err(|source| ShootingError::Shot {
        c: s.c_grid.min,
        source,
    })?;
    let rows = s
        .c_grid
        .values()
        .into_par_iter()
        .map(|c| {
            shoot(&s.pair, s.regime, c, &s.cfg)
                .map(|t| row(c, &t))
                .map_err(|source| ShootingError::Shot { c, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut summary: BTreeMap<VerdictTag, usize> =
        VerdictTag::ALL.iter().map(|&t| (t, 0)).collect();
    for r in &rows {
        *summary.entry(r.verdict).or_default() += 1;
    }
    log::info!(
        "sweep {} n={} {}: {:?}",
        s.regime.id(),
        s.pair.n.get(),
        s.pair.target.name(),
        summary
    );
    Ok(SweepReport {
        regime: s.regime,
        any_diffeo_candidate: summary[&VerdictTag::DiffeoCandidate] > 0,
        rows,
        summary,
    })
}

/// Verdict transition located between two shooting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boundary {
    pub c_star: f64,
    /// Bracket `[c_lo, c_hi]` with relative width at most `1e-10`.
    pub c_lo: f64,
    pub c_hi: f64,
    pub verdict_lo: VerdictTag,
    pub verdict_hi: VerdictTag,
    pub iterations: usize,
}

/// Bisect in `ln c` between parameters with different verdict tags.
pub fn bisect_boundary(s: &SweepSpec, lo: f64, hi: f64) -> Result<Boundary, ShootingError> {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    if !(lo > 0.0 && hi.is_finite() && lo < hi) {
        return Err(ShootingError::DegenerateBracket { lo, hi });
    }
    let verdict = |c: f64| {
        shoot(&s.pair, s.regime, c, &s.cfg)
            .map(|t| t.verdict.tag())
            .map_err(|source| ShootingError::Shot { c, source })
    };
    let v_lo = verdict(lo)?;
    let v_hi = verdict(hi)?;
    if v_lo == v_hi {
        return Err(ShootingError::SameVerdict(v_lo));
    }
    let mut iterations = 0;
    while hi - lo > 1e-10 * lo {
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        if mid <= lo || mid >= hi {
            break;
        }
        let v = verdict(mid)?;
        // keep the bracket on the transition adjacent to the low end
        if v == v_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(Boundary {
        c_star: (0.5 * (lo.ln() + hi.ln())).exp(),
        c_lo: lo,
        c_hi: hi,
        verdict_lo: v_lo,
        verdict_hi: verdict(hi)?,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_builtin, Family};

    fn spec(n: i64, f: Family, regime: Regime, grid: CGrid) -> SweepSpec {
        SweepSpec {
            pair: ModelPair::new(n, make_builtin(f).unwrap()).unwrap(),
            regime,
            c_grid: grid,
            cfg: IntegrationConfig::window(0.01, 50.0),
        }
    }

    #[test]
    fn euclidean_sweep_is_all_candidates() {
        let s = spec(
            3,
            Family::Euclidean,
            Regime::OriginRegular,
            CGrid {
                count: 7,
                min: 1e-3,
                max: 1e3,
            },
        );
        // absolute tolerance far below the smallest solution scale
        let s = SweepSpec {
            cfg: IntegrationConfig {
                abs_tol: 1e-30,
                ..s.cfg
            },
            ..s
        };
        let rep = run_sweep(&s).unwrap();
        assert_eq!(rep.rows.len(), 7);
        assert!(rep
            .rows
            .iter()
            .all(|r| r.verdict == VerdictTag::DiffeoCandidate));
        for r in &rep.rows {
            assert!((r.final_y - 50.0 * r.c).abs() <= 1e-8 * 50.0 * r.c);
        }
        assert_eq!(rep.summary.values().sum::<usize>(), 7);
    }

    #[test]
    fn grid_validation() {
        for g in [
            CGrid {
                count: 1,
                min: 1.0,
                max: 2.0,
            },
            CGrid {
                count: 5,
                min: 0.0,
                max: 2.0,
            },
            CGrid {
                count: 5,
                min: 2.0,
                max: 2.0,
            },
        ] {
            assert!(g.validate().is_err());
        }
    }

    #[test]
    fn bisect_rejects_same_verdict_and_degenerate() {
        let s = spec(
            3,
            Family::Euclidean,
            Regime::OriginRegular,
            CGrid {
                count: 2,
                min: 1.0,
                max: 2.0,
            },
        );
        assert!(matches!(
            bisect_boundary(&s, 0.1, 10.0),
            Err(ShootingError::SameVerdict(VerdictTag::DiffeoCandidate))
        ));
        assert!(matches!(
            bisect_boundary(&s, 1.0, 1.0),
            Err(ShootingError::DegenerateBracket { .. })
        ));
    }

    #[test]
    fn sweep_rejects_missing_regular_branch() {
        let s = spec(
            3,
            Family::Power { k: 2.0 },
            Regime::OriginRegular,
            CGrid {
                count: 3,
                min: 1.0,
                max: 2.0,
            },
        );
        assert!(matches!(run_sweep(&s), Err(ShootingError::Shot { .. })));
    }
}
