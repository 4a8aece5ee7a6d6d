use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::symexpr::{DomainBox, Env, ZeroReport, ZeroTestConfig};

use super::map::condition;
use super::{DiffForm, FormError, VectorField, MAX_CONDITION};

#[derive(Clone, Debug, Serialize)]
pub struct ContactVerdict {
    pub contact: bool,
    /// +1 or −1 when single-signed, 0 otherwise.
    pub sign: i8,
    /// Smallest |top coefficient| over the samples.
    pub margin: f64,
    pub samples: usize,
    /// Sample realizing the margin, or the first sign change.
    pub witness: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReebSolution {
    pub vector: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConformalReport {
    /// `β ∧ α` vanishes under the zero test.
    pub proportional: bool,
    /// Ratio of top coefficients has one sign and stays away from 0.
    pub single_signed: bool,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Range of `f` with `β = f α`, read off the dominant coefficient.
    pub factor_min: f64,
    pub factor_max: f64,
    pub samples: usize,
    pub wedge_report: ZeroReport,
}

/// `α ∧ (dα)^n` on a `(2n+1)`-dimensional chart.
pub fn contact_top_form(alpha: &DiffForm) -> Result<DiffForm, FormError> {
    let dim = alpha.chart().dim();
    if alpha.degree() != 1 {
        return Err(FormError::Degree(format!(
            "contact check needs a one-form, got degree {}",
            alpha.degree()
        )));
    }
    if dim % 2 == 0 {
        return Err(FormError::Degree(format!(
            "contact check on even dimension {dim}"
        )));
    }
    Ok(alpha.wedge(&alpha.d().wedge_power(dim / 2)))
}

pub fn contact_check(
    alpha: &DiffForm,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ContactVerdict, FormError> {
    contact_check_on(alpha, alpha.chart().domain(), params, cfg)
}

/// Sampled contact test: the top coefficient must keep one sign and
/// exceed the zero-test tolerance at every sample.
pub fn contact_check_on(
    alpha: &DiffForm,
    domain: &DomainBox,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ContactVerdict, FormError> {
    let top = contact_top_form(alpha)?.top_coefficient();
    let mut verdict = ContactVerdict {
        contact: true,
        sign: 0,
        margin: f64::INFINITY,
        samples: cfg.samples,
        witness: BTreeMap::new(),
    };
    let mut first: Option<i8> = None;
    let mut mixed = false;
    for p in domain.sample_points(cfg.samples, cfg.seed, params) {
        let (v, scale) = top.eval_scaled(&p)?;
        let s: i8 = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        match first {
            None => first = Some(s),
            Some(f) if f != s && !mixed => {
                mixed = true;
                verdict.witness = p.coords.clone();
            }
            _ => {}
        }
        if !v.is_finite() || v.abs() <= cfg.tol * (1.0 + scale) {
            verdict.contact = false;
        }
        if !(v.abs() >= verdict.margin) {
            verdict.margin = v.abs();
            if !mixed {
                verdict.witness = p.coords.clone();
            }
        }
    }
    verdict.sign = first.unwrap_or(0);
    if mixed || verdict.sign == 0 {
        verdict.sign = 0;
        verdict.contact = false;
    }
    Ok(verdict)
}

/// Numeric Reeb vector at a point: least-squares solve of
/// `ι_R dα = 0`, `α(R) = 1`.
pub fn reeb_at(alpha: &DiffForm, point: &Env) -> Result<ReebSolution, FormError> {
    let dim = alpha.chart().dim();
    if alpha.degree() != 1 {
        return Err(FormError::Degree("Reeb field needs a one-form".into()));
    }
    let mut a = DMatrix::zeros(dim + 1, dim);
    for (idx, c) in alpha.d().eval_at(point)? {
        let (i, j) = (idx[0], idx[1]);
        // ι_R (c dx_i∧dx_j) = c (R_i dx_j − R_j dx_i)
        a[(j, i)] += c;
        a[(i, j)] -= c;
    }
    for (idx, c) in alpha.eval_at(point)? {
        a[(dim, idx[0])] = c;
    }
    let mut b = DVector::zeros(dim + 1);
    b[dim] = 1.0;
    let svd = a.clone().svd(true, true);
    let cond = condition(&svd.singular_values);
    if cond > MAX_CONDITION {
        return Err(FormError::DegeneratePoint { condition: cond });
    }
    let r = svd
        .solve(&b, 0.0)
        .map_err(|e| FormError::Dimension(e.to_string()))?;
    let residual = (&a * &r - &b).amax();
    Ok(ReebSolution {
        vector: r.iter().copied().collect(),
        residual,
        condition: cond,
    })
}

/// Checks a candidate Reeb field symbolically.
pub fn reeb_symbolic_verify(
    alpha: &DiffForm,
    r: &VectorField,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ZeroReport, FormError> {
    let mut exprs = alpha.d().interior(r).coefficients();
    exprs.push(alpha.apply(r) - 1);
    Ok(crate::symexpr::is_zero_all(
        &exprs,
        alpha.chart().domain(),
        params,
        cfg,
    )?)
}

/// Certifies `β = f α` with `f` of one sign on `domain`.
pub fn conformal_check(
    beta: &DiffForm,
    alpha: &DiffForm,
    domain: &DomainBox,
    params: &Env,
    cfg: &ZeroTestConfig,
) -> Result<ConformalReport, FormError> {
    let wedge_report = beta.wedge(alpha).is_zero_on(domain, params, cfg)?;
    let tb = contact_top_form(beta)?.top_coefficient();
    let ta = contact_top_form(alpha)?.top_coefficient();
    let mut rep = ConformalReport {
        proportional: wedge_report.is_zero,
        single_signed: true,
        ratio_min: f64::INFINITY,
        ratio_max: f64::NEG_INFINITY,
        factor_min: f64::INFINITY,
        factor_max: f64::NEG_INFINITY,
        samples: cfg.samples,
        wedge_report,
    };
    for p in domain.sample_points(cfg.samples, cfg.seed, params) {
        let (vb, va) = (tb.eval(&p)?, ta.eval(&p)?);
        let ratio = vb / va;
        rep.ratio_min = rep.ratio_min.min(ratio);
        rep.ratio_max = rep.ratio_max.max(ratio);
        let av = alpha.eval_at(&p)?;
        let bv = beta.eval_at(&p)?;
        if let Some((k, a)) = av.iter().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs())) {
            let f = bv.get(k).copied().unwrap_or(0.0) / a;
            rep.factor_min = rep.factor_min.min(f);
            rep.factor_max = rep.factor_max.max(f);
        }
    }
    let away = |x: f64| x.is_finite() && x.abs() > cfg.tol;
    rep.single_signed = away(rep.ratio_min)
        && away(rep.ratio_max)
        && rep.ratio_min.signum() == rep.ratio_max.signum();
    Ok(rep)
}
