//! Contact cut of the tube by a weighted circle action.
//!
//! The tube carries `α = dθ + r²α_std`; the weight-`(a, b)` action is
//! generated by `X = a∂θ − bR_std` with moment map `μ = α(X) = a − br²`.
//! The cut keeps `{μ ≤ 0} = {r ≥ √(a/b)}` and collapses its boundary.

use serde::Serialize;
use thiserror::Error;

use crate::bw::{product_quotient, BwError, LensSpace, ProductQuotient};
use crate::exterior::{DiffForm, FormError, MapKind, SmoothMap, VectorField};
use crate::models::{ModelError, TubeModel};
use crate::profile::{monotone_bridge, sample_min, ProfileError};
use crate::symexpr::{is_zero, Env, Expr, ExprError, ZeroReport, ZeroTestConfig};
use crate::uniqueness::{
    Construction, FiberDescriptor, FibrationPresentation, RadialHamiltonian, RADIAL_FLOOR,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error(transparent)]
    Bw(#[from] BwError),
    #[error("no zero level for weights ({a}, {b})")]
    NoZeroLevel { a: i64, b: i64 },
    #[error("tube too small: R = {radius} but R² ≥ a/b needs R ≥ {needed}")]
    TubeTooSmall { radius: f64, needed: f64 },
    #[error("action does not preserve the form: Lie derivative residual {0:e}")]
    NotInvariant(f64),
    #[error("moment map disagrees with α(X): residual {0:e}")]
    MomentMismatch(f64),
    #[error("invalid reparametrization: {0}")]
    BadReparametrization(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<ExprError> for CutError {
    fn from(e: ExprError) -> Self {
        CutError::Form(e.into())
    }
}

#[derive(Clone, Debug)]
pub struct CircleActionSpec {
    pub a: i64,
    pub b: i64,
    pub tube: TubeModel,
    /// `dθ + r²α_std`
    pub form: DiffForm,
    pub generator: VectorField,
    /// Sampled test of `L_X α = 0`.
    pub invariance: ZeroReport,
}

/// `dθ + r²α_std` on the tube.
pub fn cut_form(tube: &TubeModel) -> DiffForm {
    tube.dtheta().add(&tube.alpha_std.scale(&tube.r().powi(2)))
}

pub fn make_action(
    a: i64,
    b: i64,
    tube: &TubeModel,
    cfg: &ZeroTestConfig,
) -> Result<CircleActionSpec, CutError> {
    let form = cut_form(tube);
    let generator = tube
        .r_s()
        .scale(&Expr::int(a))
        .sub(&tube.r_std().scale(&Expr::int(b)));
    let invariance = generator.lie_derivative(&form).is_zero(&Env::new(), cfg)?;
    if !invariance.is_zero {
        return Err(CutError::NotInvariant(invariance.worst_residual));
    }
    Ok(CircleActionSpec {
        a,
        b,
        tube: tube.clone(),
        form,
        generator,
        invariance,
    })
}

/// Time-`s` flow of the action, `s` in turns of the base circle.
pub fn action_map(spec: &CircleActionSpec, s: &Expr) -> Result<SmoothMap, CutError> {
    let turn = Expr::two_pi() * s;
    let mut comps = vec![
        Expr::coord("theta") + Expr::int(spec.a) * &turn,
        spec.tube.r(),
    ];
    if spec.tube.n == 2 {
        comps.push(Expr::coord("rho"));
    }
    for n in spec.tube.fiber_angles() {
        comps.push(Expr::coord(*n) - Expr::int(spec.b) * &turn);
    }
    Ok(SmoothMap::new(
        &spec.tube.chart,
        &spec.tube.chart,
        comps,
        MapKind::Diffeomorphism,
    )?)
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentMap {
    pub a: i64,
    pub b: i64,
    #[serde(serialize_with = "crate::serde_expr")]
    pub mu: Expr,
    /// Sampled test of `α(X) − μ = 0`.
    pub consistency: ZeroReport,
}

pub fn moment_map(spec: &CircleActionSpec, cfg: &ZeroTestConfig) -> Result<MomentMap, CutError> {
    let mu = Expr::int(spec.a) - Expr::int(spec.b) * spec.tube.r().powi(2);
    let consistency = is_zero(
        &(spec.form.apply(&spec.generator) - &mu),
        spec.tube.chart.domain(),
        &Env::new(),
        cfg,
    )?;
    if !consistency.is_zero {
        return Err(CutError::MomentMismatch(consistency.worst_residual));
    }
    Ok(MomentMap {
        a: spec.a,
        b: spec.b,
        mu,
        consistency,
    })
}

/// Radius `√(a/b)` of the zero level of `a − br²`.
pub fn zero_radius(a: i64, b: i64) -> Result<f64, CutError> {
    if b == 0 || (a as f64 / b as f64) <= 0.0 {
        return Err(CutError::NoZeroLevel { a, b });
    }
    Ok((a as f64 / b as f64).sqrt())
}

/// Chart change `(θ, r, ρ, φᵢ) ↦ (aθ, r, ρ, −φᵢ − bθ)`: pushes `∂θ` to the
/// generator and pulls `dθ + r²α_std` back to `(−r²)[(b − ar⁻²)dθ + α_std]`.
pub fn cut_chart_map(a: i64, b: i64, tube: &TubeModel) -> Result<SmoothMap, CutError> {
    if a == 0 {
        return Err(CutError::NoZeroLevel { a, b });
    }
    let th = Expr::coord("theta");
    let mut comps = vec![Expr::int(a) * &th, tube.r()];
    if tube.n == 2 {
        comps.push(Expr::coord("rho"));
    }
    for n in tube.fiber_angles() {
        comps.push(-Expr::coord(*n) - Expr::int(b) * &th);
    }
    let kind = if a.abs() == 1 {
        MapKind::Diffeomorphism
    } else {
        MapKind::Covering(a.unsigned_abs())
    };
    Ok(SmoothMap::new(&tube.chart, &tube.chart, comps, kind)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct CutDivisor {
    pub quotient: ProductQuotient,
    /// Quotient of the fiber sphere by the `ℤ_a` part of the action.
    pub lens: LensSpace,
    pub sphere_dim: usize,
    /// The contactomorphism type varies with `(a, b)`; not classified here.
    pub classified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutCertificates {
    pub invariance: ZeroReport,
    pub moment: ZeroReport,
    /// `Φ_*(∂θ) = X`.
    pub generator_pullback: ZeroReport,
    /// `Φ*(dθ + r²α_std) = (−r²)[(b − ar⁻²)dθ + α_std]`.
    pub chart_form: ZeroReport,
    /// `|∂μ/∂r|` at the zero level.
    pub regularity: f64,
}

#[derive(Clone, Debug)]
pub struct CutModel {
    pub a: i64,
    pub b: i64,
    pub zero_radius: f64,
    /// `{μ ≤ 0}` within the tube, as a radial interval.
    pub region: (f64, f64),
    pub divisor: CutDivisor,
    pub moment: MomentMap,
    pub certificates: CutCertificates,
    /// Absent when the region has empty interior.
    pub presentation: Option<FibrationPresentation>,
}

/// Bands `(r_in, r_out)` for presentations on a tube of radius `R` with
/// critical radius `crit < R`.
pub fn presentation_bands(crit: f64, r_max: f64) -> Result<(f64, f64), CutError> {
    if !(crit < r_max) {
        return Err(CutError::TubeTooSmall {
            radius: r_max,
            needed: crit,
        });
    }
    Ok((0.25 * r_max, (0.75 * r_max).max(0.5 * (crit + r_max))))
}

/// Curvatures tried, in order, for the inner model of bridged presentations.
pub const INNER_CURVATURES: [f64; 4] = [1.0, 0.5, 0.25, 0.1];

/// Among the curvatures in [`INNER_CURVATURES`], the bridge `v` from
/// `inner(κ)` to `r²` whose `H = b − a/v` has the largest sampled slope on
/// `[RADIAL_FLOOR, r_out]`.
pub(crate) fn best_bridge(
    a: i64,
    b: i64,
    inner: impl Fn(f64) -> Option<Expr>,
    r_in: f64,
    r_out: f64,
) -> Result<Expr, ProfileError> {
    let r = Expr::coord("r");
    let mut best: Option<(f64, Expr)> = None;
    let mut last = None;
    for kappa in INNER_CURVATURES {
        let Some(start) = inner(kappa) else { continue };
        match monotone_bridge(&start, &r.powi(2), r_in, r_out, &Env::new()) {
            Ok(v) => {
                let h = Expr::int(b) - Expr::int(a) / &v.expr;
                let slope = sample_min(
                    &h.differentiate("r"),
                    RADIAL_FLOOR.min(r_in),
                    r_out,
                    BRIDGE_SAMPLES,
                    &Env::new(),
                )?
                .min_derivative;
                if best.as_ref().map_or(true, |(s, _)| slope > *s) {
                    best = Some((slope, v.expr));
                }
            }
            Err(e) => last = Some(e),
        }
    }
    match best {
        Some((_, v)) => Ok(v),
        None => Err(last
            .unwrap_or_else(|| ProfileError::Infeasible(format!("no inner model for ({a}, {b})")))),
    }
}

const BRIDGE_SAMPLES: usize = 1024;

/// `H = b − a/v` with `v` increasing from `a/(b − κr²)` to `r²`; equals
/// `κr²` near the core and `b − ar⁻²` on the outer band.
pub fn cut_hamiltonian(a: i64, b: i64, r_in: f64, r_out: f64) -> Result<Expr, CutError> {
    let r = Expr::coord("r");
    let bf = b as f64;
    let inner = |kappa: f64| {
        (bf - kappa * r_in * r_in > 0.0)
            .then(|| Expr::int(a) / (Expr::int(b) - Expr::float(kappa) * r.powi(2)))
    };
    let v = best_bridge(a, b, inner, r_in, r_out)?;
    Ok(Expr::int(b) - Expr::int(a) / v)
}

pub fn make_cut(spec: &CircleActionSpec, cfg: &ZeroTestConfig) -> Result<CutModel, CutError> {
    let (a, b) = (spec.a, spec.b);
    let quotient = product_quotient(a, b)?;
    let crit = zero_radius(a, b)?;
    let r_max = spec.tube.r_max;
    if r_max * r_max < a as f64 / b as f64 {
        return Err(CutError::TubeTooSmall {
            radius: r_max,
            needed: crit,
        });
    }
    let moment = moment_map(spec, cfg)?;
    let none = Env::new();

    let phi = cut_chart_map(a, b, &spec.tube)?;
    let generator_pullback = phi.related(&spec.tube.r_s(), &spec.generator, &none, cfg)?;
    let lambda_ab = spec.tube.lambda_ab(&Expr::int(a), &Expr::int(b));
    let chart_form = phi
        .pullback(&spec.form)?
        .sub(&lambda_ab)
        .is_zero(&none, cfg)?;
    let regularity = moment
        .mu
        .differentiate("r")
        .eval(&Env::new().with_coord("r", crit))?
        .abs();

    let presentation = match presentation_bands(crit, r_max) {
        Ok((r_in, r_out)) => Some(FibrationPresentation {
            construction: Construction::Cut,
            a,
            b,
            fiber: FiberDescriptor {
                sphere_dim: 2 * spec.tube.n - 1,
                lens_order: a.abs(),
            },
            hamiltonian: RadialHamiltonian {
                h: cut_hamiltonian(a, b, r_in, r_out)?,
                vanishing_order: 2,
                equivariance: Some(a.abs()),
            },
            tube: spec.tube.clone(),
            outer_band: (r_out, r_max),
        }),
        Err(_) => None,
    };

    Ok(CutModel {
        a,
        b,
        zero_radius: crit,
        region: (crit, r_max),
        divisor: CutDivisor {
            lens: LensSpace {
                order: a.abs(),
                weights: vec![1; spec.tube.n],
            },
            sphere_dim: 2 * spec.tube.n - 1,
            classified: false,
            quotient,
        },
        certificates: CutCertificates {
            invariance: spec.invariance.clone(),
            moment: moment.consistency.clone(),
            generator_pullback,
            chart_form,
            regularity,
        },
        moment,
        presentation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiVariant {
    #[serde(serialize_with = "crate::serde_expr")]
    pub mu: Expr,
    /// A radius where `μ` changes sign.
    pub crossing: f64,
    pub min_slope: f64,
}

/// Moment map `a − bΦ(r)²` for a monotone reparametrization `Φ` with
/// `Φ(0) = 0`; checks that the zero level is crossed inside `(0, R]`.
pub fn phi_variant(a: i64, b: i64, phi: &Expr, r_max: f64) -> Result<PhiVariant, CutError> {
    let at = |r: f64| Env::new().with_coord("r", r);
    if phi.coords().iter().any(|c| c != "r") {
        return Err(CutError::BadReparametrization(
            "Φ must depend on r only".into(),
        ));
    }
    if phi.eval(&at(0.0))?.abs() > 1e-12 {
        return Err(CutError::BadReparametrization("Φ(0) ≠ 0".into()));
    }
    let slope = sample_min(&phi.differentiate("r"), 0.0, r_max, 1024, &Env::new())?;
    if !(slope.min_derivative > 0.0) {
        return Err(CutError::BadReparametrization(format!(
            "Φ not increasing near r = {}",
            slope.at
        )));
    }
    let mu = Expr::int(a) - Expr::int(b) * phi.powi(2);
    let n = 1024;
    let mut prev = mu.eval(&at(0.0))?;
    for i in 1..=n {
        let r = r_max * i as f64 / n as f64;
        let v = mu.eval(&at(r))?;
        if prev > 0.0 && v <= 0.0 {
            return Ok(PhiVariant {
                mu,
                crossing: r,
                min_slope: slope.min_derivative,
            });
        }
        prev = v;
    }
    Err(CutError::NoZeroLevel { a, b })
}
