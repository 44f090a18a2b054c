//! Adaptive Dormand–Prince integration of the direct equation and of the first-order forms.

mod abel;
mod direct;
pub mod dopri;

pub use abel::{
    integrate_abel, integrate_w, AbelConfig, AbelOutcome, AbelSource, AbelTrajectory, WOutcome,
    WTrajectory,
};
pub use direct::{
    decay_seed, indicial_roots, integrate_direct, puncture_slope, series_start, Direction,
    FarField, FrobeniusSeed, IntegrationConfig, IntegrationError, IntegrationStats, Trajectory,
    UnderflowCause, Verdict, VerdictTag,
};
