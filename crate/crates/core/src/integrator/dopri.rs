//! Dormand-Prince 5(4) with the standard 4th-order continuous extension.
//!
//! Seven stages, FSAL, local extrapolation (the 5th-order solution is propagated). The
//! stepper is generic over fixed-size states so the same code drives the second-order direct
//! equation (`N = 2`) and the scalar Abel and `w` equations (`N = 1`).

/// Right-hand side `du/dt = f(t, u)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, u: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, u: &[f64; N]) -> [f64; N] {
        self(t, u)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// step-size controller (Hairer & Wanner defaults with PI stabilisation)
const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

fn axpy<const N: usize>(u: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *u;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn all_finite<const N: usize>(u: &[f64; N]) -> bool {
    u.iter().all(|v| v.is_finite())
}

/// One accepted step with its dense-output polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.cont[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut out = self.cont[0];
        for (o, d) in out.iter_mut().zip(self.cont[1]) {
            *o += d;
        }
        out
    }

    /// Interpolated state at `t0 + theta h`, `theta` in `[0, 1]`.
    pub fn at_theta(&self, theta: f64) -> [f64; N] {
        let th1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let c = |j: usize| self.cont[j][i];
            *o = c(0) + theta * (c(1) + th1 * (c(2) + theta * (c(3) + th1 * c(4))));
        }
        out
    }

    pub fn at(&self, t: f64) -> [f64; N] {
        self.at_theta((t - self.t0) / self.h)
    }

    /// Whether `t` lies within the closed step interval.
    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = if self.h > 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= a && t <= b
    }
}

/// Result of one attempted step.
#[derive(Debug, Clone, Copy)]
struct Trial<const N: usize> {
    u1: [f64; N],
    k7: [f64; N],
    err: f64,
    cont: [[f64; N]; 5],
}

fn trial<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    u: &[f64; N],
    k1: &[f64; N],
    h: f64,
    rel: f64,
    abs: f64,
) -> Option<Trial<N>> {
    let k2 = sys.rhs(t + C2 * h, &axpy(u, &[(A21, k1)], h));
    let k3 = sys.rhs(t + C3 * h, &axpy(u, &[(A31, k1), (A32, &k2)], h));
    let k4 = sys.rhs(
        t + C4 * h,
        &axpy(u, &[(A41, k1), (A42, &k2), (A43, &k3)], h),
    );
    let k5 = sys.rhs(
        t + C5 * h,
        &axpy(u, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let u6 = axpy(
        u,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        h,
    );
    let k6 = sys.rhs(t + h, &u6);
    let u1 = axpy(
        u,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        h,
    );
    let k7 = sys.rhs(t + h, &u1);
    if !(all_finite(&u1) && all_finite(&k7)) {
        return None;
    }

    let mut sq = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sk = abs + rel * u[i].abs().max(u1[i].abs());
        sq += (e / sk).powi(2);
    }
    let err = (sq / N as f64).sqrt();
    if !err.is_finite() {
        return None;
    }

    let mut cont = [[0.0; N]; 5];
    for i in 0..N {
        let diff = u1[i] - u[i];
        let bspl = h * k1[i] - diff;
        cont[0][i] = u[i];
        cont[1][i] = diff;
        cont[2][i] = bspl;
        cont[3][i] = diff - h * k7[i] - bspl;
        cont[4][i] =
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Some(Trial { u1, k7, err, cont })
}

/// Outcome of [`Stepper::advance`].
#[derive(Debug, Clone, Copy)]
pub enum Advance<const N: usize> {
    Step(Segment<N>),
    /// Step size fell below the floor, or every retry produced non-finite values.
    Underflow,
    /// Step budget exhausted.
    MaxSteps,
}

/// Adaptive stepper over `t` in either direction.
pub struct Stepper<'a, S, const N: usize> {
    sys: &'a S,
    t: f64,
    u: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    rel: f64,
    abs: f64,
    h_floor: f64,
    facold: f64,
    max_steps: usize,
    pub accepted: usize,
    pub rejected: usize,
}

impl<'a, S: OdeSystem<N>, const N: usize> Stepper<'a, S, N> {
    /// Start at `(t0, u0)` heading towards `t_end`.
    ///
    /// `h_floor` is the smallest admissible step magnitude.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sys: &'a S,
        t0: f64,
        u0: [f64; N],
        t_end: f64,
        rel: f64,
        abs: f64,
        h_floor: f64,
        max_steps: usize,
    ) -> Self {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let k1 = sys.rhs(t0, &u0);
        let mut s = Stepper {
            sys,
            t: t0,
            u: u0,
            k1,
            h: 0.0,
            dir,
            rel,
            abs,
            h_floor,
            facold: 1e-4,
            max_steps,
            accepted: 0,
            rejected: 0,
        };
        s.h = s.initial_step((t_end - t0).abs());
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; N] {
        self.u
    }

    /// Starting step from the scaled derivative norms (Hairer's `hinit`).
    fn initial_step(&self, span: f64) -> f64 {
        let sk = |i: usize| self.abs + self.rel * self.u[i].abs();
        let norm = |v: &[f64; N]| -> f64 {
            ((0..N).map(|i| (v[i] / sk(i)).powi(2)).sum::<f64>() / N as f64).sqrt()
        };
        let dnf = norm(&self.k1);
        let dny = norm(&self.u);
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 || !dnf.is_finite() {
            1e-6
        } else {
            0.01 * dny / dnf
        };
        h = h.min(span);
        let u1 = axpy(&self.u, &[(1.0, &self.k1)], self.dir * h);
        let f1 = self.sys.rhs(self.t + self.dir * h, &u1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.k1[i];
        }
        let der2 = norm(&diff) / h;
        let der12 = der2.max(dnf);
        let h1 = if der12.is_finite() && der12 > 1e-15 {
            (0.01 / der12).powf(0.2)
        } else {
            (h * 1e-3).max(1e-6)
        };
        (100.0 * h).min(h1).min(span).max(self.h_floor)
    }

    /// Take one accepted step, never passing `t_limit`.
    pub fn advance(&mut self, t_limit: f64) -> Advance<N> {
        loop {
            if self.accepted + self.rejected >= self.max_steps {
                return Advance::MaxSteps;
            }
            let remaining = (t_limit - self.t) * self.dir;
            let mut h = self.h.min(remaining);
            let last = h >= remaining;
            if h < self.h_floor && !last {
                return Advance::Underflow;
            }
            if remaining <= 0.0 {
                return Advance::Underflow;
            }
            if last {
                h = remaining;
            }
            let hs = self.dir * h;
            match trial(self.sys, self.t, &self.u, &self.k1, hs, self.rel, self.abs) {
                None => {
                    self.rejected += 1;
                    self.h = h * 0.25;
                    if self.h < self.h_floor {
                        return Advance::Underflow;
                    }
                }
                Some(tr) => {
                    let fac11 = tr.err.powf(EXPO1);
                    if tr.err <= 1.0 {
                        let fac = (fac11 / self.facold.powf(BETA) / SAFE)
                            .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                        self.facold = tr.err.max(1e-4);
                        let seg = Segment {
                            t0: self.t,
                            h: hs,
                            cont: tr.cont,
                        };
                        self.t = if last { t_limit } else { self.t + hs };
                        self.u = tr.u1;
                        self.k1 = tr.k7;
                        self.h = h / fac;
                        self.accepted += 1;
                        return Advance::Step(seg);
                    }
                    self.rejected += 1;
                    self.h = h / (fac11 / SAFE).min(1.0 / FAC_MIN);
                    if self.h < self.h_floor {
                        return Advance::Underflow;
                    }
                }
            }
        }
    }
}

/// Integrate with a fixed step from `t0` to `t_end` using the 5th-order propagating solution.
///
/// Returns the final state. Used for convergence-order studies.
pub fn integrate_fixed<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    u0: [f64; N],
    t_end: f64,
    steps: usize,
) -> [f64; N] {
    let h = (t_end - t0) / steps as f64;
    let mut u = u0;
    let mut k1 = sys.rhs(t0, &u);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        // tolerances only feed the error estimate, which is ignored here
        let tr = trial(sys, t, &u, &k1, h, 1.0, 1.0).expect("non-finite state in fixed-step run");
        u = tr.u1;
        k1 = tr.k7;
    }
    u
}
