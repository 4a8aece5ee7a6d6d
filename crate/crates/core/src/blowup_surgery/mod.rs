//! Surgery blow-up along a transverse circle: the glued form
//! `H(r) dθ + α_std` with `H` bridging `r²` to `l − r⁻²`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{
    conformal_check, contact_check_on, Chart, ConformalReport, ContactVerdict, DiffForm, FormError,
};
use crate::models::{phi_map, ModelError, TubeModel};
use crate::profile::{
    joint_jumps, monotone_bridge, sample_min, JointReport, MonotoneCertificate, ProfileError,
    JOINT_STEP, JOINT_TOL,
};
use crate::symexpr::{Env, Expr, ZeroReport, ZeroTestConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurgeryError {
    #[error("twist l must be ≥ 1, got {0}")]
    BadTwist(i64),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("profile not C² at r = {joint}: second-derivative jump {jump:e}")]
    NotSmooth { joint: f64, jump: f64 },
    #[error("H(0) = {value:e}, H'(0) = {slope:e}; expected both 0")]
    NotVanishing { value: f64, slope: f64 },
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<crate::symexpr::ExprError> for SurgeryError {
    fn from(e: crate::symexpr::ExprError) -> Self {
        SurgeryError::Form(e.into())
    }
}

/// Default band edges and outer radius.
pub const R_IN: f64 = 0.5;
pub const R_OUT: f64 = 1.5;
pub const R_MAX: f64 = 2.0;
/// Samples used for the monotonicity certificate.
pub const MONOTONE_SAMPLES: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationProfile {
    pub l: i64,
    pub r_in: f64,
    pub r_out: f64,
    pub r_max: f64,
    /// Piecewise in `r`.
    #[serde(serialize_with = "crate::serde_expr")]
    pub h: Expr,
    #[serde(serialize_with = "crate::serde_expr")]
    pub dh: Expr,
    pub joints: Vec<f64>,
    pub monotonicity: MonotoneCertificate,
    pub smoothness: JointReport,
}

impl InterpolationProfile {
    pub fn value(&self, r: f64) -> f64 {
        self.h
            .eval(&Env::new().with_coord("r", r))
            .expect("profile depends on r only")
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.dh
            .eval(&Env::new().with_coord("r", r))
            .expect("profile depends on r only")
    }

    /// `(r, H, H')` on `count` evenly spaced points of `[0, R]`.
    pub fn table(&self, count: usize) -> Vec<[f64; 3]> {
        (0..count)
            .map(|i| {
                let r = self.r_max * i as f64 / (count - 1).max(1) as f64;
                [r, self.value(r), self.derivative(r)]
            })
            .collect()
    }
}

/// Strictly increasing `H` equal to `r²` on `[0, r_in]` and to `l − r⁻²`
/// on `[r_out, R]`, certified monotone and C².
pub fn build_profile(
    l: i64,
    r_in: f64,
    r_out: f64,
    r_max: f64,
) -> Result<InterpolationProfile, SurgeryError> {
    if l < 1 {
        return Err(SurgeryError::BadTwist(l));
    }
    if !(0.0 < r_in && r_in < r_out && r_out < r_max) {
        return Err(ProfileError::BandOrder { r_in, r_out, r_max }.into());
    }
    let r = Expr::coord("r");
    let inner = r.powi(2);
    let outer = Expr::int(l) - r.powi(-2);
    let bridge = monotone_bridge(&inner, &outer, r_in, r_out, &Env::new())?;
    let dh = bridge.expr.differentiate("r");
    let monotonicity = sample_min(&dh, 0.0, r_max, MONOTONE_SAMPLES, &Env::new())?;
    if !(monotonicity.min_derivative > 0.0) {
        return Err(ProfileError::NotIncreasing {
            at: monotonicity.at,
            derivative: monotonicity.min_derivative,
        }
        .into());
    }
    let smoothness = joint_jumps(&bridge.expr, &bridge.joints, JOINT_STEP, &Env::new())?;
    if !(smoothness.max_jump[2] <= JOINT_TOL) {
        return Err(SurgeryError::NotSmooth {
            joint: smoothness.worst_joint,
            jump: smoothness.max_jump[2],
        });
    }
    let at0 = Env::new().with_coord("r", 0.0);
    let (value, slope) = (bridge.expr.eval(&at0)?, dh.eval(&at0)?);
    if value != 0.0 || slope != 0.0 {
        return Err(SurgeryError::NotVanishing { value, slope });
    }
    Ok(InterpolationProfile {
        l,
        r_in,
        r_out,
        r_max,
        h: bridge.expr,
        dh,
        joints: bridge.joints,
        monotonicity,
        smoothness,
    })
}

/// The sphere replacing the blown-up circle, with its contact form.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalDivisor {
    /// Dimension of the fiber sphere `S^{2n−1}`.
    pub sphere_dim: usize,
    pub standard: bool,
    /// `α_std` in the fiber angle coordinates.
    pub form: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryCertificates {
    pub contact: ContactVerdict,
    pub inner: ZeroReport,
    pub outer: ConformalReport,
}

#[derive(Clone, Debug)]
pub struct SurgeryBlowupModel {
    pub l: i64,
    pub profile: InterpolationProfile,
    pub chart: Arc<Chart>,
    pub alpha_glued: DiffForm,
    pub divisor: ExceptionalDivisor,
    pub certificates: SurgeryCertificates,
}

/// Radial margin kept off the singular core for the contact check.
pub const CORE_GUARD: f64 = 0.02;

pub fn build_surgery_blowup(
    l: i64,
    tube: &TubeModel,
    cfg: &ZeroTestConfig,
) -> Result<SurgeryBlowupModel, SurgeryError> {
    build_surgery_blowup_with(l, tube, R_IN, R_OUT, cfg)
}

/// Glued model on `tube`, whose outer radius is the outer band edge `R`.
pub fn build_surgery_blowup_with(
    l: i64,
    tube: &TubeModel,
    r_in: f64,
    r_out: f64,
    cfg: &ZeroTestConfig,
) -> Result<SurgeryBlowupModel, SurgeryError> {
    let r_max = tube.r_max;
    let profile = build_profile(l, r_in, r_out, r_max)?;
    let alpha_glued = tube.radial_form(&profile.h);
    let none = Env::new();

    let glued_dom = tube
        .chart
        .domain()
        .restrict("r", tube.r_min.max(CORE_GUARD), r_max)?;
    let contact = contact_check_on(&alpha_glued, &glued_dom, &none, cfg)?;
    if !contact.contact {
        return Err(SurgeryError::Certificate(format!(
            "glued form not contact, margin {:e} at {:?}",
            contact.margin, contact.witness
        )));
    }
    let inner_dom = tube
        .chart
        .domain()
        .restrict("r", tube.r_min.max(0.05).min(r_in), r_in)?;
    let inner = alpha_glued
        .sub(&tube.lambda)
        .is_zero_on(&inner_dom, &none, cfg)?;
    if !inner.is_zero {
        return Err(SurgeryError::Certificate(format!(
            "glued form differs from λ on the inner band, residual {:e}",
            inner.worst_residual
        )));
    }
    let outer_dom = tube
        .chart
        .domain()
        .restrict("r", r_out, (r_max - 0.05).max(r_out))?;
    let pulled = phi_map(l, tube).pullback(&tube.eta)?;
    let outer = conformal_check(&alpha_glued, &pulled, &outer_dom, &none, cfg)?;
    if !(outer.proportional && outer.single_signed) {
        return Err(SurgeryError::Certificate(format!(
            "glued form not a single-signed multiple of the pulled-back form (ratio in [{:e}, {:e}])",
            outer.ratio_min, outer.ratio_max
        )));
    }
    let fiber_form = if tube.n == 1 {
        "(form 1 (dphi 1))".to_string()
    } else {
        "(form 1 (dphi1 (^ (cos rho) 2)) (dphi2 (^ (sin rho) 2)))".to_string()
    };
    Ok(SurgeryBlowupModel {
        l,
        profile,
        chart: tube.chart.clone(),
        alpha_glued,
        divisor: ExceptionalDivisor {
            sphere_dim: 2 * tube.n - 1,
            standard: true,
            form: fiber_form,
        },
        certificates: SurgeryCertificates {
            contact,
            inner,
            outer,
        },
    })
}

/// Whether the gluing maps `φ_k` and `φ_l` are smoothly isotopic.
pub fn isotopy_parity(k: i64, l: i64, n: i64) -> bool {
    ((k - l) * n).rem_euclid(2) == 0
}

#[cfg(test)]
mod tests;
