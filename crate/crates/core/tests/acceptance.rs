//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::time::Instant;

use harmap::analysis::{
    adjudicate_sign, check_conditions, corollary_monitor, count_for_density, lemma1_monitor,
    refinement_study, AdjudicationConfig, ConditionGrid, SupLocation,
};
use harmap::equations::{abel_residual_at, transform_direct_to_abel, AbelState, SignVariant};
use harmap::integrator::dopri::{Advance, Stepper};
use harmap::integrator::{
    integrate_direct, series_start, Direction, IntegrationConfig, Trajectory, VerdictTag,
};
use harmap::metric::{make_builtin, Family, ModelPair};
use harmap::shooting::{run_sweep, CGrid, Regime, SweepReport, SweepSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn pair(n: i64, f: Family) -> ModelPair {
    ModelPair::new(n, make_builtin(f).unwrap()).unwrap()
}

fn builtins() -> Vec<Family> {
    vec![
        Family::Euclidean,
        Family::Hyperbolic,
        Family::ScaledHyperbolic { a: 2.0 },
        Family::Power { k: 1.0 },
        Family::Power { k: 2.0 },
        Family::Polynomial {
            coefficients: vec![0.0, 1.0, 0.0, 0.5],
        },
    ]
}

fn identity_trajectory(n: i64) -> Trajectory {
    let p = pair(n, Family::Euclidean);
    let seed = series_start(&p, 1.0, 0.1).unwrap();
    let cfg = IntegrationConfig::window(0.1, 10.0);
    integrate_direct(&p, &cfg, (seed.y0, seed.yp0), Direction::Forward).unwrap()
}

fn identity_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut verdicts_ok = true;
    for n in 2..=5 {
        let t = identity_trajectory(n);
        worst = worst.max((t.last().y - 10.0).abs());
        verdicts_ok &= t.verdict.tag() == VerdictTag::DiffeoCandidate;
    }
    Outcome {
        pass: worst <= 1e-8 && verdicts_ok,
        detail: format!("max |y(10) - 10| = {worst:.3e}, all DiffeoCandidate: {verdicts_ok}"),
    }
}

fn transform_chain() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    let per_decade = AdjudicationConfig::default().per_decade;
    let mut check = |label: String, p: &ModelPair, t: &Trajectory, range: (f64, f64)| {
        let base = count_for_density(range.0, range.1, per_decade);
        let study = refinement_study(p, t, range, base, 2).unwrap();
        let good = study.evidence(SignVariant::Corrected);
        let bad = study.evidence(SignVariant::AsPrinted);
        let ok =
            good.sup_residuals[0] <= 1e-4 && good.ratios[0] >= 4.0 && bad.sup_residuals[0] > 1e-1;
        pass &= ok;
        lines.push(format!(
            "{label}: sup {:.3e} ratio {:.7} rejected sup {:.3e}{}",
            good.sup_residuals[0],
            good.ratios[0],
            bad.sup_residuals[0],
            if ok { "" } else { " <- fails" }
        ));
    };
    for n in 2..=5 {
        let p = pair(n, Family::Euclidean);
        let t = identity_trajectory(n);
        let pad = 1e-9 * 9.9;
        check(format!("euclidean n={n}"), &p, &t, (0.1 + pad, 10.0 - pad));
    }
    let p = pair(3, Family::Hyperbolic);
    let a = adjudicate_sign(&p, &AdjudicationConfig::default()).unwrap();
    let adj = AdjudicationConfig::default();
    let icfg = IntegrationConfig {
        rel_tol: adj.rel_tol,
        abs_tol: adj.abs_tol,
        far_field_decades: 0.0,
        ..IntegrationConfig::window(adj.r_start, adj.r_end)
    };
    let seed = series_start(&p, adj.c, adj.r_start).unwrap();
    let t = integrate_direct(&p, &icfg, (seed.y0, seed.yp0), Direction::Forward).unwrap();
    check(
        format!("hyperbolic n=3 ({:?})", a.trajectory_verdict),
        &p,
        &t,
        (a.study.y_min, a.study.y_max),
    );
    Outcome {
        pass,
        detail: lines.join("; "),
    }
}

fn sign_adjudication() -> Outcome {
    let mut selected = Vec::new();
    let mut errors = Vec::new();
    for f in builtins() {
        for n in 2..=5 {
            let p = pair(n, f.clone());
            match adjudicate_sign(&p, &AdjudicationConfig::default()) {
                Ok(a) => selected.push(a.selected),
                Err(e) => errors.push(format!("{} n={n}: {e}", p.target.name())),
            }
        }
    }
    let stable = errors.is_empty() && selected.windows(2).all(|w| w[0] == w[1]);

    let p = pair(2, Family::Euclidean);
    let mut closed_form_err = 0.0f64;
    for y in [0.05, 0.3, 1.0, 2.5, 7.0, 40.0] {
        let a = AbelState { y, z: 1.0 / y };
        let dz = -1.0 / (y * y);
        let corr = abel_residual_at(p.n, &p.target, SignVariant::Corrected, a, dz).unwrap();
        let prin = abel_residual_at(p.n, &p.target, SignVariant::AsPrinted, a, dz).unwrap();
        closed_form_err = closed_form_err
            .max(corr.abs())
            .max((prin + 2.0 / (y * y)).abs());
    }
    Outcome {
        pass: stable && closed_form_err <= 1e-10,
        detail: format!(
            "{} runs, selected {:?}, errors {:?}; closed-form max error {closed_form_err:.1e}",
            selected.len(),
            selected.first(),
            errors
        ),
    }
}

fn condition_ground_truth() -> Outcome {
    let grid = ConditionGrid::default();
    let mut fails = Vec::new();
    for n in 2..=5 {
        let r = check_conditions(&pair(n, Family::Hyperbolic), &grid).unwrap();
        if !(r.overall && r.c3_boundary_divergent && r.c3_sup_location == SupLocation::RMax) {
            fails.push(format!(
                "hyperbolic n={n} overall={} divergent={}",
                r.overall, r.c3_boundary_divergent
            ));
        }
        let e = check_conditions(&pair(n, Family::Euclidean), &grid).unwrap();
        let want_overall = n == 2;
        if e.overall != want_overall || (n > 2 && e.c3_pass) {
            fails.push(format!(
                "euclidean n={n}: sup {} vs threshold {}, c3_pass={}",
                e.c3_sup, e.c3_threshold, e.c3_pass
            ));
        }
    }
    let expected = [(2, 0.0), (3, 1.0), (4, 4.0 / 3.0), (5, 9.0 / 4.0)];
    for (n, want) in expected {
        let got = harmap::analysis::c3_threshold(n).2;
        if got != want {
            fails.push(format!("threshold n={n}: {got} != {want}"));
        }
    }
    Outcome {
        pass: fails.is_empty(),
        detail: if fails.is_empty() {
            "all ground-truth checks hold".into()
        } else {
            fails.join("; ")
        },
    }
}

fn sweep(n: i64, regime: Regime) -> SweepReport {
    let c_grid = match regime {
        Regime::OriginRegular => CGrid {
            count: 61,
            min: 1e-3,
            max: 1e3,
        },
        Regime::InfinityDecay => CGrid {
            count: 41,
            min: 1e-4,
            max: 1.0,
        },
    };
    run_sweep(&SweepSpec {
        pair: pair(n, Family::Hyperbolic),
        regime,
        c_grid,
        cfg: IntegrationConfig::window(0.01, 50.0),
    })
    .unwrap()
}

fn nonexistence_sweeps(decay: &mut Vec<(i64, SweepReport)>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        for (regime, total) in [(Regime::OriginRegular, 61), (Regime::InfinityDecay, 41)] {
            let rep = sweep(n, regime);
            // frozen tallies: every shot blows up, inside the window or in the far field
            let frozen = rep.count(VerdictTag::FiniteBlowup) == total;
            pass &= !rep.any_diffeo_candidate && frozen;
            parts.push(format!(
                "n={n} {}: FB {} DC {}",
                regime.id(),
                rep.count(VerdictTag::FiniteBlowup),
                rep.count(VerdictTag::DiffeoCandidate)
            ));
            if regime == Regime::InfinityDecay {
                decay.push((n, rep));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn monitors(decay: &[(i64, SweepReport)]) -> Outcome {
    let cfg = IntegrationConfig::window(0.01, 50.0);
    let mut shots = 0;
    let mut corollary_fail = Vec::new();
    let mut lemma_fail = Vec::new();
    for (n, rep) in decay {
        let p = pair(*n, Family::Hyperbolic);
        for row in &rep.rows {
            let t = harmap::shooting::shoot(&p, Regime::InfinityDecay, row.c, &cfg).unwrap();
            let a = transform_direct_to_abel(&t).unwrap();
            shots += 1;
            let c = corollary_monitor(&a);
            if !c.z_monotone_nondecreasing {
                corollary_fail.push(format!("n={n} c={:.3e} y={:?}", row.c, c.first_decrease_y));
            }
            let l = lemma1_monitor(p.n, &p.target, &a, SignVariant::AsPrinted);
            if !l.pass {
                lemma_fail.push(format!(
                    "n={n} c={:.3e} min {:.3e} at y={:.4e}, first below at y={:.4e}",
                    row.c,
                    l.min_value,
                    l.min_at_y,
                    l.first_violation_y.unwrap_or(f64::NAN)
                ));
            }
        }
    }
    let summarize = |v: &[String]| match v.first() {
        Some(first) => format!("{} violations, first {first}", v.len()),
        None => "none".into(),
    };
    Outcome {
        pass: corollary_fail.is_empty() && lemma_fail.is_empty(),
        detail: format!(
            "{shots} shots; corollary violations: {}; printed-variant bracket violations: {}",
            summarize(&corollary_fail),
            summarize(&lemma_fail)
        ),
    }
}

/// `y = r + eps r^2` solves the direct equation plus the forcing it leaves behind.
fn integrator_order() -> Outcome {
    let p = pair(3, Family::Hyperbolic);
    let m = p.n.sphere_dim();
    let eps = 0.1;
    let exact = |r: f64| (r + eps * r * r, 1.0 + 2.0 * eps * r);
    let forcing = |r: f64| {
        let (y, yp) = exact(r);
        2.0 * eps + m * yp / r - m * p.target.eval_gg(y).unwrap() / (r * r)
    };
    let sys = |r: f64, u: &[f64; 2]| {
        let gg = p.target.eval_gg(u[0]).unwrap();
        [u[1], -m * u[1] / r + m * gg / (r * r) + forcing(r)]
    };
    let (r0, r1) = (1.0, 3.0);
    let (y0, yp0) = exact(r0);
    let mut pts = Vec::new();
    for tol in [1e-5, 1e-6, 1e-7, 1e-8] {
        let mut st = Stepper::new(&sys, r0, [y0, yp0], r1, tol, tol, 1e-12, 100_000);
        while st.t() < r1 {
            match st.advance(r1) {
                Advance::Step(_) => {}
                other => panic!("manufactured run stopped: {other:?}"),
            }
        }
        let err = (st.state()[0] - exact(r1).0).abs();
        pts.push(((st.accepted as f64).ln(), err.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let order = -slope;
    Outcome {
        pass: order >= 4.0,
        detail: format!(
            "observed order {order:.2} from (steps, error) = {:?}",
            pts.iter()
                .map(|p| (p.0.exp().round() as usize, format!("{:.2e}", p.1.exp())))
                .collect::<Vec<_>>()
        ),
    }
}

const CLI_RUNS: &[&[&str]] = &[
    &["--command", "check-conditions"],
    &[
        "--command",
        "integrate",
        "--pair.profile.family",
        "euclidean",
        "--integrate.y0",
        "0.01",
        "--integrate.yp0",
        "1",
        "--integration.r_end",
        "10",
    ],
    &["--command", "shoot", "--shoot.c", "0.5"],
    &[
        "--command",
        "sweep",
        "--pair.n",
        "4",
        "--sweep.c_grid.count",
        "21",
    ],
    &[
        "--command",
        "sweep",
        "--sweep.regime",
        "infinity_decay",
        "--sweep.c_grid.min",
        "1e-4",
        "--sweep.c_grid.max",
        "1",
        "--sweep.c_grid.count",
        "21",
    ],
    &[
        "--command",
        "adjudicate-sign",
        "--adjudication.per_decade",
        "500",
    ],
    &["--command", "monitors"],
];

fn run_suite(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for (i, args) in CLI_RUNS.iter().enumerate() {
        let dir = root.join(format!("run{i}"));
        let mut argv = vec![
            "harmap".to_string(),
            "--output_dir".into(),
            dir.display().to_string(),
        ];
        argv.extend(args.iter().map(|s| s.to_string()));
        assert_eq!(harmap::cli::run(argv), 0, "cli run {i} failed");
        let mut names: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        for p in names {
            let name = format!("run{i}/{}", p.file_name().unwrap().to_string_lossy());
            files.push((name, fs::read(&p).unwrap()));
        }
    }
    files
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_suite(a.path());
    let second = run_suite(b.path());
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let same_set = first.len() == second.len();
    Outcome {
        pass: same_set && differing.is_empty(),
        detail: format!(
            "{} data files compared, differing: {:?}",
            first.len(),
            differing
        ),
    }
}

fn report(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    println!(
        "{} criterion {id} {name} ({:.2} s): {}",
        if o.pass { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64(),
        o.detail
    );
    o.pass
}

fn main() {
    let mut decay = Vec::new();
    let results = [
        report(1, "identity exactness", identity_exactness),
        report(2, "transform-chain oracle", transform_chain),
        report(3, "sign adjudication stability", sign_adjudication),
        report(4, "condition checker ground truth", condition_ground_truth),
        report(5, "nonexistence sweep evidence", || {
            nonexistence_sweeps(&mut decay)
        }),
        report(6, "lemma and corollary monitors", || monitors(&decay)),
        report(7, "integrator order", integrator_order),
        report(8, "determinism", determinism),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
