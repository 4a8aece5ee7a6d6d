use std::collections::BTreeMap;

use serde::Serialize;

use super::domain::DomainBox;
use super::eval::Env;
use super::expr::Expr;
use super::ExprError;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sampling budget shared by every statistical check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroTestConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

impl ZeroTestConfig {
    pub fn with_samples(self, samples: usize) -> Self {
        ZeroTestConfig { samples, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ZeroTestConfig { seed, ..self }
    }
}

/// Outcome of a sampled zero test.
///
/// `worst_residual` is `|value| / (1 + scale)` at the worst point, where
/// `scale` is the magnitude bound from [`Expr::eval_scaled`]. `witness` is that
/// point, reported whether or not the test passed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroReport {
    pub is_zero: bool,
    pub samples: usize,
    pub worst_residual: f64,
    pub worst_value: f64,
    pub witness: BTreeMap<String, f64>,
}

impl ZeroReport {
    fn empty() -> Self {
        ZeroReport {
            is_zero: true,
            samples: 0,
            worst_residual: 0.0,
            worst_value: 0.0,
            witness: BTreeMap::new(),
        }
    }

    /// Combines two reports over the same point set: verdicts AND,
    /// residual max.
    pub fn merge(self, other: ZeroReport) -> ZeroReport {
        let is_zero = self.is_zero && other.is_zero;
        let samples = self.samples.max(other.samples);
        let mut worst = if other.worst_residual > self.worst_residual
            || (other.worst_residual.is_nan() && !self.worst_residual.is_nan())
        {
            other
        } else {
            self
        };
        worst.is_zero = is_zero;
        worst.samples = samples;
        worst
    }
}

/// Decides `e ≡ 0` on `domain` by seeded sampling.
pub fn is_zero(
    e: &Expr,
    domain: &DomainBox,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ZeroReport, ExprError> {
    is_zero_all(std::slice::from_ref(e), domain, params, cfg)
}

/// Zero test of several expressions over one shared point set.
pub fn is_zero_all(
    exprs: &[Expr],
    domain: &DomainBox,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ZeroReport, ExprError> {
    let live: Vec<&Expr> = exprs.iter().filter(|e| !e.is_zero_literal()).collect();
    let mut report = ZeroReport::empty();
    report.samples = cfg.samples;
    if live.is_empty() {
        return Ok(report);
    }
    for point in domain.sample_points(cfg.samples, cfg.seed, params) {
        for e in &live {
            let (v, scale) = e.eval_scaled(&point)?;
            let residual = if v.is_finite() && scale.is_finite() {
                v.abs() / (1.0 + scale)
            } else {
                f64::INFINITY
            };
            if !(residual <= cfg.tol) {
                report.is_zero = false;
            }
            if residual > report.worst_residual || report.witness.is_empty() {
                report.worst_residual = residual;
                report.worst_value = v;
                report.witness = point.coords.clone();
            }
        }
    }
    Ok(report)
}
