//! Symbolic-numeric verification of blow-up constructions along transverse loops on
//! explicit coordinate models.
//!
//! Expressions ([`symexpr`]) carry exact structure and are compared by
//! seeded sampled zero tests. Forms, fields and maps ([`exterior`]) live on
//! coordinate charts. The remaining modules build the model tube, the
//! surgery and cut blow-ups, the integer bundle data, and the comparison
//! of the three constructions through radial Hamiltonians.

pub mod blowup_surgery;
pub mod bw;
pub mod cut;
pub mod exterior;
pub mod models;
pub mod profile;
pub mod symexpr;
pub mod uniqueness;

pub use exterior::{Chart, DiffForm, FormError, MapKind, SmoothMap, VectorField};
pub use models::{make_tube, TubeModel};
pub use symexpr::{CoordRange, DomainBox, Env, Expr, ExprError, ZeroReport, ZeroTestConfig};

pub(crate) fn serde_expr<S: serde::Serializer>(e: &symexpr::Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&symexpr::to_text(e))
}
