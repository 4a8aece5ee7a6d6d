use std::sync::Arc;

use serde::Serialize;

use crate::symexpr::{DomainBox, Expr};

use super::FormError;

/// Coordinate chart: ordered coordinate names with a sampling box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chart {
    domain: DomainBox,
}

impl Chart {
    pub fn new(domain: DomainBox) -> Arc<Chart> {
        Arc::new(Chart { domain })
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.ranges().len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.domain.names().collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.domain.ranges()[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.domain.ranges().iter().position(|r| r.name == name)
    }

    pub fn coord(&self, i: usize) -> Expr {
        Expr::coord(self.name(i))
    }

    pub fn coord_named(&self, name: &str) -> Result<Expr, FormError> {
        self.index_of(name)
            .map(|i| self.coord(i))
            .ok_or_else(|| FormError::UnknownCoordinate(name.to_string()))
    }

    pub fn is_angle(&self, i: usize) -> bool {
        self.domain.ranges()[i].is_angle()
    }

    /// Same coordinate names in the same order; boxes may differ.
    pub fn same_coordinates(&self, other: &Chart) -> bool {
        self.dim() == other.dim() && self.domain.names().eq(other.domain.names())
    }

    /// Chart with one coordinate interval narrowed.
    pub fn restrict(&self, name: &str, lo: f64, hi: f64) -> Result<Arc<Chart>, FormError> {
        Ok(Chart::new(self.domain.restrict(name, lo, hi)?))
    }
}
