//! Named model objects: the standard tube, its gluing and squeezing maps,
//! and the affine charts of the linear blow-up of the complex plane pair.

mod blowup;
mod maps;
mod tube;

use thiserror::Error;

use crate::exterior::FormError;
use crate::symexpr::ExprError;

pub use blowup::{linear_blowup_charts, BlowupChartPair};
pub use maps::{
    cartesian_point, deck_map, displacement, phi_ab, phi_map, psi_squeeze, radial_squeeze,
    smallest_squeeze_k, squeeze_radius,
};
pub use tube::{make_tube, make_tube_with, TubeModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unsupported fiber half-dimension {0} (expected 1 or 2)")]
    UnsupportedFiber(usize),
    #[error("invalid radial interval ({0}, {1})")]
    BadInterval(f64, f64),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("form is not contact: {0}")]
    NotContact(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<ExprError> for ModelError {
    fn from(e: ExprError) -> Self {
        ModelError::Form(e.into())
    }
}
