//! Differential forms, vector fields and maps on coordinate charts.

mod chart;
mod contact;
mod form;
mod map;
mod vector;

use thiserror::Error;

use crate::symexpr::ExprError;

pub use chart::Chart;
pub use contact::{
    conformal_check, contact_check, contact_check_on, contact_top_form, reeb_at,
    reeb_symbolic_verify, ConformalReport, ContactVerdict, ReebSolution,
};
pub use form::DiffForm;
pub use map::{
    angle_difference, JacobianReport, MapComparison, MapKind, SmoothMap, MIN_SCALED_DET,
};
pub use vector::VectorField;

/// Condition number above which a linear solve is refused.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("degenerate point (condition number {condition:e})")]
    DegeneratePoint { condition: f64 },
    #[error("form parse error: {0}")]
    Parse(String),
}

#[cfg(test)]
mod tests;
