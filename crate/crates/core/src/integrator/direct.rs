//! Shooting integrations of the direct equation `y'' + (n-1) y'/r - (n-1) g g'(y)/r^2 = 0`.

use serde::Serialize;
use std::fmt;
use thiserror::Error;

use super::dopri::{Advance, Segment, Stepper};
use crate::equations::DirectState;
use crate::metric::{Dimension, MetricError, MetricProfile, ModelPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid integration config: {0}")]
    InvalidConfig(String),
    #[error("invalid initial data: {0}")]
    InvalidInitial(String),
    #[error("no regular Frobenius branch: {0}")]
    NoRegularBranch(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Tolerances, window and event thresholds for one shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub r_start: f64,
    pub r_end: f64,
    /// Blow-up threshold on `|y|`, and on `|r y'| / max(1, |y|)`.
    pub y_cap: f64,
    pub yp_zero_tol: f64,
    /// Decades of log-radius beyond the window over which a shot that survives the window is
    /// continued before it is accepted as a diffeomorphism candidate. `0` disables continuation.
    pub far_field_decades: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            r_start: 0.01,
            r_end: 50.0,
            y_cap: 1e8,
            yp_zero_tol: 1e-14,
            far_field_decades: 8.0,
        }
    }
}

impl IntegrationConfig {
    pub fn window(r_start: f64, r_end: f64) -> Self {
        IntegrationConfig {
            r_start,
            r_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |m: String| Err(IntegrationError::InvalidConfig(m));
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !(finite_pos(self.r_start) && finite_pos(self.r_end) && self.r_start < self.r_end) {
            return bad(format!(
                "need 0 < r_start < r_end, got r_start = {}, r_end = {}",
                self.r_start, self.r_end
            ));
        }
        if !(finite_pos(self.rel_tol) && finite_pos(self.abs_tol)) {
            return bad("tolerances must be positive".into());
        }
        if !finite_pos(self.y_cap) {
            return bad("y_cap must be positive".into());
        }
        if !(self.yp_zero_tol.is_finite() && self.yp_zero_tol >= 0.0) {
            return bad("yp_zero_tol must be nonnegative".into());
        }
        if !(self.far_field_decades.is_finite() && self.far_field_decades >= 0.0) {
            return bad("far_field_decades must be nonnegative".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnderflowCause {
    StepFloor,
    MaxSteps,
}

/// Classified outcome of a shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum Verdict {
    /// Window (and far field, when enabled) traversed with `y'` of one sign and `0 < y < y_cap`.
    DiffeoCandidate,
    DerivativeVanished {
        r: f64,
    },
    FiniteBlowup {
        r: f64,
    },
    /// `y` reached the target puncture `y = 0`.
    DomainExhausted {
        r: f64,
    },
    StepUnderflow {
        r: f64,
        cause: UnderflowCause,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VerdictTag {
    DiffeoCandidate,
    DerivativeVanished,
    FiniteBlowup,
    DomainExhausted,
    StepUnderflow,
}

impl VerdictTag {
    pub const ALL: [VerdictTag; 5] = [
        VerdictTag::DiffeoCandidate,
        VerdictTag::DerivativeVanished,
        VerdictTag::FiniteBlowup,
        VerdictTag::DomainExhausted,
        VerdictTag::StepUnderflow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictTag::DiffeoCandidate => "DiffeoCandidate",
            VerdictTag::DerivativeVanished => "DerivativeVanished",
            VerdictTag::FiniteBlowup => "FiniteBlowup",
            VerdictTag::DomainExhausted => "DomainExhausted",
            VerdictTag::StepUnderflow => "StepUnderflow",
        }
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Verdict {
    pub fn tag(&self) -> VerdictTag {
        match self {
            Verdict::DiffeoCandidate => VerdictTag::DiffeoCandidate,
            Verdict::DerivativeVanished { .. } => VerdictTag::DerivativeVanished,
            Verdict::FiniteBlowup { .. } => VerdictTag::FiniteBlowup,
            Verdict::DomainExhausted { .. } => VerdictTag::DomainExhausted,
            Verdict::StepUnderflow { .. } => VerdictTag::StepUnderflow,
        }
    }

    /// Radius of the event, if the shot ended in one.
    pub fn r_event(&self) -> Option<f64> {
        match *self {
            Verdict::DiffeoCandidate => None,
            Verdict::DerivativeVanished { r }
            | Verdict::FiniteBlowup { r }
            | Verdict::DomainExhausted { r }
            | Verdict::StepUnderflow { r, .. } => Some(r),
        }
    }
}

/// Continuation beyond the window in log-radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarField {
    pub horizon_r: f64,
    pub reached_r: f64,
    pub steps: usize,
    /// Whether the verdict was decided by an event found during continuation.
    pub decided_verdict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_r: f64,
    pub far_field: Option<FarField>,
}

/// Dense-output piece in `s = ln r` with state `(y, r y')`; `theta_end < 1` only on a step
/// cut short by an event.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    seg: Segment<2>,
    theta_end: f64,
}

impl Piece {
    fn state(&self, theta: f64) -> DirectState {
        let u = self.seg.at_theta(theta);
        let r = (self.seg.t0 + theta * self.seg.h).exp();
        DirectState {
            r,
            y: u[0],
            yp: u[1] / r,
        }
    }

    fn s_range(&self) -> (f64, f64) {
        let a = self.seg.t0;
        let b = self.seg.t0 + self.theta_end * self.seg.h;
        (a.min(b), a.max(b))
    }
}

/// Sampled solution `(r, y, y')` of the direct equation with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: Dimension,
    pub direction: Direction,
    /// Initial state followed by one sample per accepted step inside the window; the last
    /// sample is the event point when the shot ended in an event inside the window.
    pub samples: Vec<DirectState>,
    pub verdict: Verdict,
    pub stats: IntegrationStats,
    pieces: Vec<Piece>,
}

impl Trajectory {
    pub fn last(&self) -> DirectState {
        *self
            .samples
            .last()
            .expect("trajectory has at least its initial state")
    }

    /// Dense-output state at radius `r`, or `None` outside the integrated part of the window.
    pub fn state_at(&self, r: f64) -> Option<DirectState> {
        let s = r.ln();
        let piece = self.pieces.iter().find(|p| {
            let (a, b) = p.s_range();
            s >= a && s <= b
        })?;
        let theta = ((s - piece.seg.t0) / piece.seg.h).clamp(0.0, piece.theta_end);
        let mut st = piece.state(theta);
        st.r = r;
        Some(st)
    }

    /// Dense-output states at the given target radii `y` (each must lie within the range of
    /// `y` covered by the trajectory). Requires `y` strictly monotone, which the event stops
    /// guarantee.
    pub fn resample_in_y(&self, ys: &[f64]) -> Option<Vec<DirectState>> {
        let increasing = self.last().y > self.samples[0].y;
        let key = |y: f64| if increasing { y } else { -y };
        ys.iter()
            .map(|&target| {
                let kt = key(target);
                let idx = self
                    .pieces
                    .partition_point(|p| key(p.state(p.theta_end).y) < kt);
                let piece = self.pieces.get(idx)?;
                let (mut lo, mut hi) = (0.0f64, piece.theta_end);
                if key(piece.state(lo).y) > kt || key(piece.state(hi).y) < kt {
                    return None;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if key(piece.state(mid).y) < kt {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (a, b) = (piece.state(lo), piece.state(hi));
                Some(if (a.y - target).abs() <= (b.y - target).abs() {
                    a
                } else {
                    b
                })
            })
            .collect()
    }
}

/// `g g'` extended oddly to `y < 0`, so steps may cross the target puncture and be localized.
fn gg_odd(p: &MetricProfile, y: f64) -> f64 {
    if y >= 0.0 {
        p.gg_unchecked(y)
    } else {
        -p.gg_unchecked(-y)
    }
}

/// Event thresholds shared by window and far field.
struct Events {
    y_cap: Option<f64>,
    log_cap: f64,
    yp_zero_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    DerivativeVanished,
    Puncture,
    Blowup,
}

impl Events {
    /// Blow-up indicator in terms of `y` and the log-radius derivative `v = r y'`;
    /// nonnegative once the state has left the admissible region.
    fn blowup(&self, y: f64, v: f64) -> f64 {
        let log = v.abs() / (self.log_cap * y.abs().max(1.0)) - 1.0;
        let log = if log.is_nan() { f64::INFINITY } else { log };
        match self.y_cap {
            Some(cap) => log.max(y.abs() / cap - 1.0),
            None => log,
        }
    }

    /// Earliest event within a step as `(theta, kind)`.
    fn scan(&self, seg: &Segment<2>) -> Option<(f64, EventKind)> {
        let state = |th: f64| {
            let u = seg.at_theta(th);
            (u[0], u[1])
        };
        let (y0, v0) = state(0.0);
        let (y1, v1) = state(1.0);
        let s0 = v0.signum();
        let mut found: Option<(f64, EventKind)> = None;
        let mut consider = |theta: f64, kind| {
            if found.is_none_or(|(t, _)| theta < t) {
                found = Some((theta, kind));
            }
        };
        if s0 * v1 <= 0.0 {
            let th = bisect(|th| -s0 * state(th).1 >= 0.0);
            let r_of = |th: f64| (seg.t0 + th * seg.h).exp();
            let th = refine_zero(|th| state(th).1 / r_of(th), th, self.yp_zero_tol);
            consider(th, EventKind::DerivativeVanished);
        }
        if y0 > 0.0 && y1 <= 0.0 {
            consider(bisect(|th| state(th).0 <= 0.0), EventKind::Puncture);
        }
        if self.blowup(y1, v1) >= 0.0 {
            consider(
                bisect(|th| {
                    let (y, v) = state(th);
                    self.blowup(y, v) >= 0.0
                }),
                EventKind::Blowup,
            );
        }
        found
    }
}

/// Smallest `theta` in `(0, 1]` at which `hit` holds, by bisection assuming `hit(1)`.
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

/// Narrow a sign change of `f` on `(0, theta]` until `|f| <= tol` or `theta` stops moving.
fn refine_zero<F: Fn(f64) -> f64>(f: F, theta: f64, tol: f64) -> f64 {
    let f_hi = f(theta);
    if f_hi.abs() <= tol {
        return theta;
    }
    let s = f(0.0).signum();
    let (mut lo, mut hi) = (0.0f64, theta);
    let mut best = theta;
    let mut best_abs = f_hi.abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.abs() < best_abs {
            best = mid;
            best_abs = v.abs();
        }
        if v.abs() <= tol {
            return mid;
        }
        if s * v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

enum LegEnd {
    Reached,
    Event { kind: EventKind, s: f64 },
    Underflow { s: f64, cause: UnderflowCause },
}

/// Integrate `y_s = v`, `v_s = -(n-2) v + (n-1) g g'(y)` from `s0` to `s1`, handing every
/// accepted piece to `sink` and stopping at the first event.
#[allow(clippy::too_many_arguments)]
fn run_leg<F: FnMut(Piece)>(
    n: Dimension,
    profile: &MetricProfile,
    cfg: &IntegrationConfig,
    events: &Events,
    (s0, s1): (f64, f64),
    u0: [f64; 2],
    max_steps: usize,
    mut sink: F,
) -> (LegEnd, usize, usize) {
    let m = n.sphere_dim();
    let damping = n.as_f64() - 2.0;
    let sys = |_s: f64, u: &[f64; 2]| [u[1], -damping * u[1] + m * gg_odd(profile, u[0])];
    let mut stepper = Stepper::new(
        &sys,
        s0,
        u0,
        s1,
        cfg.rel_tol,
        cfg.abs_tol,
        1e-14 * (s1 - s0).abs(),
        max_steps,
    );
    let end = loop {
        match stepper.advance(s1) {
            Advance::Step(seg) => {
                if let Some((theta, kind)) = events.scan(&seg) {
                    sink(Piece {
                        seg,
                        theta_end: theta,
                    });
                    break LegEnd::Event {
                        kind,
                        s: seg.t0 + theta * seg.h,
                    };
                }
                sink(Piece {
                    seg,
                    theta_end: 1.0,
                });
                if stepper.t() == s1 {
                    break LegEnd::Reached;
                }
            }
            Advance::Underflow => {
                break LegEnd::Underflow {
                    s: stepper.t(),
                    cause: UnderflowCause::StepFloor,
                }
            }
            Advance::MaxSteps => {
                break LegEnd::Underflow {
                    s: stepper.t(),
                    cause: UnderflowCause::MaxSteps,
                }
            }
        }
    };
    (end, stepper.accepted, stepper.rejected)
}

fn verdict_of(end: &LegEnd) -> Verdict {
    match *end {
        LegEnd::Reached => Verdict::DiffeoCandidate,
        LegEnd::Event { kind, s } => {
            let r = s.exp();
            match kind {
                EventKind::DerivativeVanished => Verdict::DerivativeVanished { r },
                EventKind::Puncture => Verdict::DomainExhausted { r },
                EventKind::Blowup => Verdict::FiniteBlowup { r },
            }
        }
        LegEnd::Underflow { s, cause } => Verdict::StepUnderflow { r: s.exp(), cause },
    }
}

/// Integrate the direct equation from `r_start` (forward) or `r_end` (backward) with initial
/// data `(y0, yp0)` at that radius, stopping at the first event.
///
/// Steps are taken in `s = ln r`, where the equation is autonomous; the step floor is
/// `1e-14` times the length of the window in `s`.
pub fn integrate_direct(
    pair: &ModelPair,
    cfg: &IntegrationConfig,
    init: (f64, f64),
    direction: Direction,
) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    let (y0, yp0) = init;
    if !(y0.is_finite() && y0 > 0.0 && yp0.is_finite()) {
        return Err(IntegrationError::InvalidInitial(format!(
            "need finite y0 > 0 and finite yp0, got ({y0}, {yp0})"
        )));
    }
    let n = pair.n;
    let profile = &pair.target;
    let (r0, r1) = match direction {
        Direction::Forward => (cfg.r_start, cfg.r_end),
        Direction::Backward => (cfg.r_end, cfg.r_start),
    };
    let start = DirectState {
        r: r0,
        y: y0,
        yp: yp0,
    };
    let mut traj = Trajectory {
        n,
        direction,
        samples: vec![start],
        verdict: Verdict::DiffeoCandidate,
        stats: IntegrationStats {
            accepted_steps: 0,
            rejected_steps: 0,
            final_r: r0,
            far_field: None,
        },
        pieces: Vec::new(),
    };
    if yp0.abs() <= cfg.yp_zero_tol {
        traj.verdict = Verdict::DerivativeVanished { r: r0 };
        return Ok(traj);
    }
    if y0 >= cfg.y_cap {
        traj.verdict = Verdict::FiniteBlowup { r: r0 };
        return Ok(traj);
    }

    let window = Events {
        y_cap: Some(cfg.y_cap),
        log_cap: cfg.y_cap,
        yp_zero_tol: cfg.yp_zero_tol,
    };
    let (s0, s1) = (r0.ln(), r1.ln());
    let mut pieces = Vec::new();
    let (end, accepted, rejected) = run_leg(
        n,
        profile,
        cfg,
        &window,
        (s0, s1),
        [y0, r0 * yp0],
        cfg.max_steps,
        |p| pieces.push(p),
    );
    for p in &pieces {
        traj.samples.push(p.state(p.theta_end));
    }
    if let (LegEnd::Reached, Some(last)) = (&end, traj.samples.last_mut()) {
        // undo the exp(ln r) round trip at the window edge
        last.yp *= last.r / r1;
        last.r = r1;
    }
    traj.pieces = pieces;
    traj.verdict = match verdict_of(&end) {
        Verdict::DiffeoCandidate => Verdict::DiffeoCandidate,
        v => {
            // report the event at the radius of the recorded sample
            let r = traj.last().r;
            match v {
                Verdict::DerivativeVanished { .. } => Verdict::DerivativeVanished { r },
                Verdict::DomainExhausted { .. } => Verdict::DomainExhausted { r },
                Verdict::FiniteBlowup { .. } => Verdict::FiniteBlowup { r },
                other => other,
            }
        }
    };
    traj.stats.accepted_steps = accepted;
    traj.stats.rejected_steps = rejected;
    traj.stats.final_r = traj.last().r;

    if traj.verdict == Verdict::DiffeoCandidate && cfg.far_field_decades > 0.0 {
        let (verdict, ff) =
            continue_far_field(n, profile, cfg, traj.last(), direction, accepted + rejected);
        traj.verdict = verdict;
        traj.stats.far_field = Some(ff);
    }
    Ok(traj)
}

/// Continue a shot that survived its window over `far_field_decades` more decades of `r`.
///
/// Only finite-radius singularities count as blow-up here (`|r y'| / max(1, |y|)` beyond the
/// cap); growth of `y` itself is the boundary behaviour both regimes ask for.
fn continue_far_field(
    n: Dimension,
    profile: &MetricProfile,
    cfg: &IntegrationConfig,
    from: DirectState,
    direction: Direction,
    used_steps: usize,
) -> (Verdict, FarField) {
    let span = cfg.far_field_decades * std::f64::consts::LN_10;
    let s0 = from.r.ln();
    let s1 = match direction {
        Direction::Forward => s0 + span,
        Direction::Backward => s0 - span,
    };
    let horizon_r = s1.exp();
    let events = Events {
        y_cap: None,
        log_cap: cfg.y_cap,
        yp_zero_tol: cfg.yp_zero_tol,
    };
    let mut reached = s0;
    let (end, accepted, rejected) = run_leg(
        n,
        profile,
        cfg,
        &events,
        (s0, s1),
        [from.y, from.r * from.yp],
        cfg.max_steps.saturating_sub(used_steps).max(1),
        |p| reached = p.seg.t0 + p.theta_end * p.seg.h,
    );
    let verdict = verdict_of(&end);
    let ff = FarField {
        horizon_r,
        reached_r: match end {
            LegEnd::Reached => horizon_r,
            LegEnd::Event { s, .. } | LegEnd::Underflow { s, .. } => {
                let _ = reached;
                s.exp()
            }
        },
        steps: accepted + rejected,
        decided_verdict: !matches!(end, LegEnd::Reached),
    };
    (verdict, ff)
}

/// Power-law seed `y = c r^alpha` on one branch of the linearization at `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrobeniusSeed {
    /// `lim_{y->0} g g'(y) / y`
    pub mu: f64,
    pub alpha: f64,
    pub r: f64,
    pub y0: f64,
    pub yp0: f64,
}

/// Roots `(alpha_minus, alpha_plus)` of `alpha^2 + (n-2) alpha - (n-1) mu = 0`, if real.
pub fn indicial_roots(n: Dimension, mu: f64) -> Option<(f64, f64)> {
    let b = n.as_f64() - 2.0;
    let disc = b * b + 4.0 * n.sphere_dim() * mu;
    if !(disc >= 0.0) {
        return None;
    }
    let sq = disc.sqrt();
    Some(((-b - sq) / 2.0, (-b + sq) / 2.0))
}

/// Slope `mu` of `g g'` at the target puncture. Requires `g(0) g'(0) = 0`.
pub fn puncture_slope(p: &MetricProfile) -> Result<f64, IntegrationError> {
    let gg0 = p.eval_gg(0.0)?;
    if !(gg0.abs() <= 1e-12) {
        return Err(IntegrationError::NoRegularBranch(format!(
            "g(0) g'(0) = {gg0} is not zero, so y = 0 is not an equilibrium"
        )));
    }
    let mu = p.eval_gg_prime(0.0)?;
    if !mu.is_finite() {
        return Err(IntegrationError::NoRegularBranch(format!(
            "(g g')'(0) = {mu} is not finite"
        )));
    }
    Ok(mu)
}

fn check_shot_params(c: f64, r: f64) -> Result<(), IntegrationError> {
    if !(c.is_finite() && c > 0.0 && r.is_finite() && r > 0.0) {
        return Err(IntegrationError::InvalidInitial(format!(
            "need c > 0 and r > 0, got c = {c}, r = {r}"
        )));
    }
    Ok(())
}

/// Seed near the source origin on the regular branch `y ~ c r^{alpha+}`.
pub fn series_start(
    pair: &ModelPair,
    c: f64,
    r_start: f64,
) -> Result<FrobeniusSeed, IntegrationError> {
    check_shot_params(c, r_start)?;
    let mu = puncture_slope(&pair.target)?;
    if mu < 0.0 {
        return Err(IntegrationError::NoRegularBranch(format!(
            "mu = {mu} is negative"
        )));
    }
    let (_, alpha) = indicial_roots(pair.n, mu)
        .ok_or_else(|| IntegrationError::NoRegularBranch("complex exponents".into()))?;
    if !(alpha > 0.0) {
        return Err(IntegrationError::NoRegularBranch(format!(
            "largest exponent {alpha} is not positive (mu = {mu})"
        )));
    }
    Ok(FrobeniusSeed {
        mu,
        alpha,
        r: r_start,
        y0: c * r_start.powf(alpha),
        yp0: c * alpha * r_start.powf(alpha - 1.0),
    })
}

/// Seed at large radius on the decaying branch: `y(r_end) = c`, `y'(r_end) = alpha- c / r_end`.
pub fn decay_seed(pair: &ModelPair, c: f64, r_end: f64) -> Result<FrobeniusSeed, IntegrationError> {
    check_shot_params(c, r_end)?;
    let mu = puncture_slope(&pair.target)?;
    let (alpha, _) = indicial_roots(pair.n, mu)
        .ok_or_else(|| IntegrationError::NoRegularBranch("complex exponents".into()))?;
    if !(alpha < 0.0) {
        return Err(IntegrationError::NoRegularBranch(format!(
            "smallest exponent {alpha} is not negative (mu = {mu}), no decaying branch"
        )));
    }
    Ok(FrobeniusSeed {
        mu,
        alpha,
        r: r_end,
        y0: c,
        yp0: alpha * c / r_end,
    })
}
