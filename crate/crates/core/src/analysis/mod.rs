//! Hypothesis checks, invariant monitors and sign-variant adjudication.

mod adjudicate;
mod conditions;
mod monitors;

use thiserror::Error;

pub use adjudicate::{
    abel_samples, adjudicate_sign, count_for_density, monotone_range, refinement_study,
    Adjudication, AdjudicationConfig, RefinementStudy, VariantEvidence,
};
pub use conditions::{
    c3_threshold, check_conditions, ConditionGrid, ConditionReport, RemarkReport, SupLocation,
    C2_TOLERANCE, C3_MARGIN,
};
pub use monitors::{
    corollary_monitor, lemma1_monitor, wbound_monitor, CorollaryReport, Lemma1Report, WBoundReport,
    LEMMA1_TOLERANCE, MONOTONE_SLACK, WBOUND_TOLERANCE,
};

use crate::equations::EquationError;
use crate::integrator::IntegrationError;
use crate::metric::MetricError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("sign adjudication inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}
