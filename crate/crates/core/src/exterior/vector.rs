use std::sync::Arc;

use crate::symexpr::{self, Env, Expr, ZeroReport, ZeroTestConfig};

use super::{Chart, DiffForm, FormError};

/// Vector field `Σ X_i ∂x_i` on a chart.
#[derive(Clone, Debug)]
pub struct VectorField {
    chart: Arc<Chart>,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, components: Vec<Expr>) -> Result<Self, FormError> {
        if components.len() != chart.dim() {
            return Err(FormError::Dimension(format!(
                "{} components on a {}-dimensional chart",
                components.len(),
                chart.dim()
            )));
        }
        Ok(VectorField {
            chart: chart.clone(),
            components,
        })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        VectorField {
            chart: chart.clone(),
            components: vec![Expr::zero(); chart.dim()],
        }
    }

    /// Coordinate field `∂name`.
    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<Self, FormError> {
        let i = chart
            .index_of(name)
            .ok_or_else(|| FormError::UnknownCoordinate(name.to_string()))?;
        let mut v = VectorField::zero(chart);
        v.components[i] = Expr::one();
        Ok(v)
    }

    /// Field from `(name, component)` pairs, other components zero.
    pub fn from_named(chart: &Arc<Chart>, parts: &[(&str, Expr)]) -> Result<Self, FormError> {
        let mut v = VectorField::zero(chart);
        for (name, c) in parts {
            let i = chart
                .index_of(name)
                .ok_or_else(|| FormError::UnknownCoordinate(name.to_string()))?;
            v.components[i] = &v.components[i] + c;
        }
        Ok(v)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        assert!(self.chart.same_coordinates(&other.chart));
        VectorField {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }

    pub fn eval_at(&self, env: &Env) -> Result<Vec<f64>, FormError> {
        self.components.iter().map(|c| Ok(c.eval(env)?)).collect()
    }

    pub fn is_zero(&self, params: &Env, cfg: &ZeroTestConfig) -> Result<ZeroReport, FormError> {
        Ok(symexpr::is_zero_all(
            &self.components,
            self.chart.domain(),
            params,
            cfg,
        )?)
    }

    /// Lie derivative of a form, by Cartan's formula.
    pub fn lie_derivative(&self, form: &DiffForm) -> DiffForm {
        let a = form.d().interior(self);
        if form.degree() == 0 {
            return a;
        }
        a.add(&form.interior(self).d())
    }
}
