//! Command execution and artifact writing.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{CliError, Command, RunConfig};
use crate::analysis::{
    adjudicate_sign, check_conditions, corollary_monitor, lemma1_monitor, wbound_monitor,
    CorollaryReport, Lemma1Report, WBoundReport,
};
use crate::equations::{transform_direct_to_abel, z_to_w, SignVariant, WForm, WState};
use crate::integrator::{
    integrate_direct, integrate_w, AbelConfig, Trajectory, VerdictTag, WOutcome,
};
use crate::shooting::{run_sweep, shoot, Regime, SweepReport, SweepSpec};

/// 17 significant digits.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| CliError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub(super) fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = &cfg.output_dir;
    match cfg.command {
        Command::CheckConditions => {
            let report = check_conditions(&cfg.pair, &cfg.conditions)
                .map_err(|e| CliError::numerical("check-conditions", e))?;
            Ok(vec![write_file(dir, "conditions.json", &json(&report))?])
        }
        Command::Integrate => {
            let t = integrate_direct(
                &cfg.pair,
                &cfg.integration,
                cfg.integrate_init,
                cfg.integrate_direction,
            )?;
            let mut meta = trajectory_meta(cfg, &t);
            let _ = writeln!(meta, "y0={}", format_num(cfg.integrate_init.0));
            let _ = writeln!(meta, "yp0={}", format_num(cfg.integrate_init.1));
            write_trajectory(dir, &t, &meta)
        }
        Command::Shoot => {
            let t = shoot(&cfg.pair, cfg.shoot_regime, cfg.shoot_c, &cfg.integration)
                .map_err(|e| CliError::numerical("shoot", e))?;
            let mut meta = trajectory_meta(cfg, &t);
            let _ = writeln!(meta, "regime={}", cfg.shoot_regime.id());
            let _ = writeln!(meta, "c={}", format_num(cfg.shoot_c));
            write_trajectory(dir, &t, &meta)
        }
        Command::Sweep => {
            let spec = SweepSpec {
                pair: cfg.pair.clone(),
                regime: cfg.sweep_regime,
                c_grid: cfg.sweep_grid,
                cfg: cfg.integration,
            };
            let report = run_sweep(&spec)?;
            let csv = write_file(dir, "sweep.csv", &sweep_csv(&report))?;
            let summary = SweepSummary::new(cfg, &report);
            let js = write_file(dir, "sweep_summary.json", &json(&summary))?;
            Ok(vec![csv, js])
        }
        Command::AdjudicateSign => {
            let a = adjudicate_sign(&cfg.pair, &cfg.adjudication)
                .map_err(|e| CliError::numerical("adjudicate-sign", e))?;
            Ok(vec![write_file(dir, "adjudication.json", &json(&a))?])
        }
        Command::Monitors => {
            let report = monitors(cfg)?;
            Ok(vec![write_file(dir, "monitors.json", &json(&report))?])
        }
    }
}

fn trajectory_meta(cfg: &RunConfig, t: &Trajectory) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "command={}", cfg.command.name());
    let _ = writeln!(m, "n={}", cfg.pair.n.get());
    let _ = writeln!(m, "profile={}", cfg.pair.target.name());
    let _ = writeln!(
        m,
        "direction={}",
        serde_json::to_value(t.direction)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    );
    let _ = writeln!(m, "verdict={}", t.verdict.tag());
    let _ = writeln!(
        m,
        "r_event={}",
        t.verdict.r_event().map(format_num).unwrap_or_default()
    );
    let _ = writeln!(m, "accepted_steps={}", t.stats.accepted_steps);
    let _ = writeln!(m, "rejected_steps={}", t.stats.rejected_steps);
    let _ = writeln!(m, "final_r={}", format_num(t.stats.final_r));
    if let Some(ff) = t.stats.far_field {
        let _ = writeln!(m, "far_field_horizon_r={}", format_num(ff.horizon_r));
        let _ = writeln!(m, "far_field_reached_r={}", format_num(ff.reached_r));
        let _ = writeln!(m, "far_field_decided_verdict={}", ff.decided_verdict);
    }
    m
}

fn write_trajectory(dir: &Path, t: &Trajectory, meta: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut csv = String::from("r,y,yp\n");
    for s in &t.samples {
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_num(s.r),
            format_num(s.y),
            format_num(s.yp)
        );
    }
    Ok(vec![
        write_file(dir, "trajectory.csv", &csv)?,
        write_file(dir, "trajectory.meta", meta)?,
    ])
}

fn sweep_csv(report: &SweepReport) -> String {
    let mut csv = String::from("c,verdict,r_event,final_y,final_yp\n");
    for r in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            format_num(r.c),
            r.verdict,
            r.r_event.map(format_num).unwrap_or_default(),
            format_num(r.final_y),
            format_num(r.final_yp)
        );
    }
    csv
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    regime: Regime,
    n: u32,
    profile: String,
    rows: usize,
    counts: std::collections::BTreeMap<VerdictTag, usize>,
    any_diffeo_candidate: bool,
    events_beyond_window: usize,
    r_start: f64,
    r_end: f64,
    far_field_decades: f64,
    note: &'static str,
}

impl SweepSummary {
    fn new(cfg: &RunConfig, report: &SweepReport) -> Self {
        SweepSummary {
            regime: report.regime,
            n: cfg.pair.n.get(),
            profile: cfg.pair.target.name().to_string(),
            rows: report.rows.len(),
            counts: report.summary.clone(),
            any_diffeo_candidate: report.any_diffeo_candidate,
            events_beyond_window: report.rows.iter().filter(|r| r.beyond_window).count(),
            r_start: cfg.integration.r_start,
            r_end: cfg.integration.r_end,
            far_field_decades: cfg.integration.far_field_decades,
            note: "sweep evidence covers one shooting parameter per regime; a diffeo_candidate \
                   is not an existence proof and its absence is not a nonexistence proof",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorsReport {
    pub n: u32,
    pub profile: String,
    pub regime: Regime,
    pub c: f64,
    pub trajectory_verdict: VerdictTag,
    pub samples: usize,
    pub lemma1: Lemma1Report,
    /// The same bracket under the other sign variant.
    pub lemma1_other_variant: Lemma1Report,
    pub corollary: CorollaryReport,
    pub w_form: WForm,
    /// `w = z^-2` along the shot.
    pub wbound_from_trajectory: WBoundReport,
    /// `w` integrated from `w(0) = 0` over the `y`-range of the shot.
    pub wbound_integrated: Option<WBoundReport>,
    pub w_integrated_outcome: Option<WOutcome>,
}

fn monitors(cfg: &RunConfig) -> Result<MonitorsReport, CliError> {
    let pair = &cfg.pair;
    let t = shoot(pair, cfg.monitors_regime, cfg.monitors_c, &cfg.integration)
        .map_err(|e| CliError::numerical("monitors", e))?;
    let abel = transform_direct_to_abel(&t).map_err(|e| CliError::numerical("monitors", e))?;
    let v: SignVariant = cfg.monitors_variant;
    let ws: Vec<WState> = abel
        .samples
        .iter()
        .filter_map(|a| z_to_w(*a).ok())
        .collect();
    let y_top = abel
        .samples
        .iter()
        .map(|a| a.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let integrated = if y_top > 0.0 && y_top.is_finite() {
        Some(
            integrate_w(
                pair,
                cfg.monitors_w_form,
                &AbelConfig::default(),
                0.0,
                0.0,
                y_top,
            )
            .map_err(|e| CliError::numerical("monitors", e))?,
        )
    } else {
        None
    };
    Ok(MonitorsReport {
        n: pair.n.get(),
        profile: pair.target.name().to_string(),
        regime: cfg.monitors_regime,
        c: cfg.monitors_c,
        trajectory_verdict: t.verdict.tag(),
        samples: abel.samples.len(),
        lemma1: lemma1_monitor(pair.n, &pair.target, &abel, v),
        lemma1_other_variant: lemma1_monitor(pair.n, &pair.target, &abel, v.other()),
        corollary: corollary_monitor(&abel),
        w_form: cfg.monitors_w_form,
        wbound_from_trajectory: wbound_monitor(pair.n, &ws),
        wbound_integrated: integrated
            .as_ref()
            .map(|w| wbound_monitor(pair.n, &w.samples)),
        w_integrated_outcome: integrated.map(|w| w.outcome),
    })
}
