use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::symexpr::{self, DomainBox, Env, Expr, ZeroReport, ZeroTestConfig};

use super::{Chart, DiffForm, FormError, VectorField};

/// What a map is claimed to be; recorded for reports and checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MapKind {
    Diffeomorphism,
    /// Finite covering of the given degree.
    Covering(u64),
    General,
}

/// Smooth map between charts given by component expressions in the
/// source coordinates.
#[derive(Clone, Debug)]
pub struct SmoothMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    components: Vec<Expr>,
    kind: MapKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobianReport {
    pub nonsingular: bool,
    pub samples: usize,
    /// Smallest |det| after scaling every Jacobian row to unit max norm.
    pub min_scaled_det: f64,
    pub witness: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapComparison {
    pub equal: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub witness: BTreeMap<String, f64>,
}

/// Threshold on the row-scaled Jacobian determinant.
pub const MIN_SCALED_DET: f64 = 1e-12;

/// Difference of two angles folded into `(-π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

impl SmoothMap {
    pub fn new(
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        components: Vec<Expr>,
        kind: MapKind,
    ) -> Result<Self, FormError> {
        if components.len() != target.dim() {
            return Err(FormError::Dimension(format!(
                "{} components for a {}-dimensional target",
                components.len(),
                target.dim()
            )));
        }
        for c in &components {
            if let Some(bad) = c
                .coords()
                .into_iter()
                .find(|n| source.index_of(n).is_none())
            {
                return Err(FormError::UnknownCoordinate(bad));
            }
        }
        Ok(SmoothMap {
            source: source.clone(),
            target: target.clone(),
            components,
            kind,
        })
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let comps = (0..chart.dim()).map(|i| chart.coord(i)).collect();
        SmoothMap::new(chart, chart, comps, MapKind::Diffeomorphism).expect("identity")
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    fn substitution(&self) -> BTreeMap<String, Expr> {
        (0..self.target.dim())
            .map(|i| (self.target.name(i).to_string(), self.components[i].clone()))
            .collect()
    }

    /// Expression in target coordinates rewritten in source coordinates.
    pub fn pull_function(&self, f: &Expr) -> Expr {
        let sub = self.substitution();
        f.substitute(&|n| sub.get(n).cloned())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap, FormError> {
        if !inner.target.same_coordinates(&self.source) {
            return Err(FormError::ChartMismatch(format!(
                "cannot compose: {:?} vs {:?}",
                inner.target.names(),
                self.source.names()
            )));
        }
        let comps = self
            .components
            .iter()
            .map(|c| inner.pull_function(c))
            .collect();
        let kind = match (self.kind, inner.kind) {
            (MapKind::Diffeomorphism, k) | (k, MapKind::Diffeomorphism) => k,
            (MapKind::Covering(a), MapKind::Covering(b)) => MapKind::Covering(a * b),
            _ => MapKind::General,
        };
        SmoothMap::new(&inner.source, &self.target, comps, kind)
    }

    /// `J[i][j] = ∂f_i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.components
            .iter()
            .map(|f| {
                (0..self.source.dim())
                    .map(|j| f.differentiate(self.source.name(j)))
                    .collect()
            })
            .collect()
    }

    /// Pullback of a form on the target chart.
    pub fn pullback(&self, form: &DiffForm) -> Result<DiffForm, FormError> {
        if !form.chart().same_coordinates(&self.target) {
            return Err(FormError::ChartMismatch(format!(
                "form on {:?}, map target {:?}",
                form.chart().names(),
                self.target.names()
            )));
        }
        let differentials: Vec<DiffForm> = self
            .components
            .iter()
            .map(|f| DiffForm::function(&self.source, f.clone()).d())
            .collect();
        let mut out = DiffForm::zero(&self.source, form.degree());
        for (idx, c) in form.terms() {
            let mut term = DiffForm::function(&self.source, self.pull_function(c));
            for &i in idx {
                term = term.wedge(&differentials[i]);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// `Dφ(Y)` as components along the target coordinates, in source variables.
    pub fn pushforward(&self, y: &VectorField) -> Vec<Expr> {
        self.jacobian()
            .iter()
            .map(|row| Expr::sum(row.iter().zip(y.components()).map(|(a, b)| a * b)))
            .collect()
    }

    /// Tests `Dφ(Y) = X∘φ`, i.e. that `Y` is the pullback of `X`.
    pub fn related(
        &self,
        y: &VectorField,
        x: &VectorField,
        params: &Env,
        cfg: &ZeroTestConfig,
    ) -> Result<ZeroReport, FormError> {
        let push = self.pushforward(y);
        let diffs: Vec<Expr> = push
            .iter()
            .zip(x.components())
            .map(|(p, xc)| p - &self.pull_function(xc))
            .collect();
        Ok(symexpr::is_zero_all(
            &diffs,
            self.source.domain(),
            params,
            cfg,
        )?)
    }

    pub fn eval_at(&self, env: &Env) -> Result<Vec<f64>, FormError> {
        self.components.iter().map(|c| Ok(c.eval(env)?)).collect()
    }

    fn jacobian_matrix(jac: &[Vec<Expr>], env: &Env) -> Result<DMatrix<f64>, FormError> {
        let rows = jac.len();
        let cols = jac.first().map_or(0, Vec::len);
        let mut m = DMatrix::zeros(rows, cols);
        for (i, row) in jac.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval(env)?;
            }
        }
        Ok(m)
    }

    /// Pullback of a target vector field at one source point, solving
    /// `J v = X(φ(p))`.
    pub fn pullback_vector_at(&self, x: &VectorField, env: &Env) -> Result<Vec<f64>, FormError> {
        let j = Self::jacobian_matrix(&self.jacobian(), env)?;
        let mut image = Env {
            coords: BTreeMap::new(),
            params: env.params.clone(),
        };
        for (i, v) in self.eval_at(env)?.into_iter().enumerate() {
            image.set_coord(self.target.name(i), v);
        }
        let rhs = DVector::from_vec(x.eval_at(&image)?);
        let svd = j.svd(true, true);
        let cond = condition(&svd.singular_values);
        if cond > super::MAX_CONDITION {
            return Err(FormError::DegeneratePoint { condition: cond });
        }
        let v = svd
            .solve(&rhs, 0.0)
            .map_err(|e| FormError::Dimension(e.to_string()))?;
        Ok(v.iter().copied().collect())
    }

    /// Sampled check that the Jacobian is square and nonsingular on `domain`.
    pub fn jacobian_check(
        &self,
        domain: &DomainBox,
        params: &Env,
        cfg: &ZeroTestConfig,
    ) -> Result<JacobianReport, FormError> {
        if self.source.dim() != self.target.dim() {
            return Err(FormError::Dimension("Jacobian is not square".into()));
        }
        let jac = self.jacobian();
        let mut report = JacobianReport {
            nonsingular: true,
            samples: cfg.samples,
            min_scaled_det: f64::INFINITY,
            witness: BTreeMap::new(),
        };
        for p in domain.sample_points(cfg.samples, cfg.seed, params) {
            let mut m = Self::jacobian_matrix(&jac, &p)?;
            for mut row in m.row_iter_mut() {
                let s = row.amax();
                if s > 0.0 {
                    row /= s;
                }
            }
            let det = m.determinant().abs();
            if !(det >= report.min_scaled_det) {
                report.min_scaled_det = det;
                report.witness = p.coords.clone();
            }
        }
        report.nonsingular = report.min_scaled_det > MIN_SCALED_DET;
        Ok(report)
    }

    /// Pointwise comparison with another map; angle components of the
    /// target are compared modulo 2π.
    pub fn compare(
        &self,
        other: &SmoothMap,
        domain: &DomainBox,
        params: &Env,
        cfg: &ZeroTestConfig,
    ) -> Result<MapComparison, FormError> {
        if !self.target.same_coordinates(&other.target)
            || !self.source.same_coordinates(&other.source)
        {
            return Err(FormError::ChartMismatch(
                "maps have different charts".into(),
            ));
        }
        let mut cmp = MapComparison {
            equal: true,
            samples: cfg.samples,
            max_residual: 0.0,
            witness: BTreeMap::new(),
        };
        for p in domain.sample_points(cfg.samples, cfg.seed, params) {
            let (a, b) = (self.eval_at(&p)?, other.eval_at(&p)?);
            for i in 0..a.len() {
                let diff = if self.target.is_angle(i) {
                    angle_difference(a[i], b[i])
                } else {
                    a[i] - b[i]
                };
                let res = diff.abs() / (1.0 + a[i].abs().max(b[i].abs()));
                if !(res <= cmp.max_residual) {
                    cmp.max_residual = res;
                    cmp.witness = p.coords.clone();
                }
            }
        }
        cmp.equal = cmp.max_residual <= cfg.tol;
        Ok(cmp)
    }
}

pub(crate) fn condition(s: &DVector<f64>) -> f64 {
    let max = s.max();
    let min = s.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
