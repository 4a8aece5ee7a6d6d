//! Radial contact fibrations, convex paths between their Hamiltonians,
//! and the comparison of the three blow-up constructions on one chart.

mod presentation;

use serde::Serialize;
use thiserror::Error;

use crate::blowup_surgery::{build_surgery_blowup_with, SurgeryError, CORE_GUARD};
use crate::bw::BwError;
use crate::cut::{best_bridge, make_action, make_cut, presentation_bands, zero_radius, CutError};
use crate::exterior::{
    conformal_check, reeb_symbolic_verify, ConformalReport, DiffForm, FormError,
};
use crate::models::{make_tube_with, ModelError, TubeModel};
use crate::profile::ProfileError;
use crate::symexpr::{is_zero, Env, Expr, ExprError, ZeroReport, ZeroTestConfig};

pub use presentation::{
    check_radial, Construction, FiberDescriptor, FibrationPresentation, RadialCertificate,
    RadialFailure, RadialHamiltonian, VanishingCheck, RADIAL_FLOOR, RADIAL_GRID,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UniquenessError {
    #[error("radial certificate failed: {0}")]
    Radial(RadialFailure),
    #[error("Hamiltonians differ on the boundary band: residual {residual:e} at {witness:?}")]
    BoundaryMismatch {
        residual: f64,
        witness: std::collections::BTreeMap<String, f64>,
    },
    #[error("no {construction} presentation for weights ({a}, {b})")]
    NotApplicable {
        construction: Construction,
        a: i64,
        b: i64,
    },
    #[error("presentations have different fibers or symmetry")]
    FiberMismatch,
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Bw(#[from] BwError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<ExprError> for UniquenessError {
    fn from(e: ExprError) -> Self {
        UniquenessError::Form(e.into())
    }
}

/// Number of points on the `t` grid of a convex path, endpoints included.
pub const PATH_POINTS: usize = 33;

#[derive(Clone, Debug, Serialize)]
pub struct PathPoint {
    pub t: f64,
    /// Minimum of `∂H_t/∂r`.
    pub margin: f64,
    pub contact_margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexPath {
    pub points: Vec<PathPoint>,
    pub min_margin: f64,
    /// Worst residual of `H_t − H_0` on the boundary band.
    pub boundary_residual: f64,
}

/// `H_t = (1−t)H_0 + tH_1`, certified radial at every grid point and
/// fixed on `band`.
pub fn convex_path(
    p0: &FibrationPresentation,
    p1: &FibrationPresentation,
    band: (f64, f64),
    cfg: &ZeroTestConfig,
) -> Result<ConvexPath, UniquenessError> {
    if p0.fiber != p1.fiber || p0.hamiltonian.equivariance != p1.hamiltonian.equivariance {
        return Err(UniquenessError::FiberMismatch);
    }
    check_radial(p0, cfg)?;
    check_radial(p1, cfg)?;
    let (h0, h1) = (&p0.hamiltonian.h, &p1.hamiltonian.h);
    let band_dom = p0.tube.chart.domain().restrict("r", band.0, band.1)?;
    let none = Env::new();
    let boundary = is_zero(&(h1 - h0), &band_dom, &none, cfg)?;
    if !boundary.is_zero {
        return Err(UniquenessError::BoundaryMismatch {
            residual: boundary.worst_residual,
            witness: boundary.witness,
        });
    }
    let mut path = ConvexPath {
        points: Vec::with_capacity(PATH_POINTS),
        min_margin: f64::INFINITY,
        boundary_residual: 0.0,
    };
    for i in 0..PATH_POINTS {
        let t = i as f64 / (PATH_POINTS - 1) as f64;
        let ht = Expr::float(1.0 - t) * h0 + Expr::float(t) * h1;
        let cert = check_radial(&p0.with_hamiltonian(ht.clone()), cfg)?;
        let fixed = is_zero(&(&ht - h0), &band_dom, &none, cfg)?;
        if !fixed.is_zero {
            return Err(UniquenessError::BoundaryMismatch {
                residual: fixed.worst_residual,
                witness: fixed.witness,
            });
        }
        path.boundary_residual = path.boundary_residual.max(fixed.worst_residual);
        path.min_margin = path.min_margin.min(cert.margin);
        path.points.push(PathPoint {
            t,
            margin: cert.margin,
            contact_margin: cert.contact.margin,
        });
    }
    Ok(path)
}

/// Connection-form data behind the Gromov-style presentation.
#[derive(Clone, Debug, Serialize)]
pub struct GromovData {
    /// `β = (a + bB)dθ + B α_std`.
    pub connection: String,
    /// `(1/a)(∂θ − bR_std)` is the Reeb field of `β`.
    pub reeb: ZeroReport,
    /// `β` equals `(−r²)[(b − ar⁻²)dθ + α_std]` on the outer band.
    pub outer: ZeroReport,
}

/// Presentation from a connection form whose Reeb field is
/// `(1/a)(∂θ − bR_std)` on the whole chart; normalized to `H dθ + α_std`
/// with `H = b + a/B`.
pub fn gromov_presentation(
    a: i64,
    b: i64,
    tube: &TubeModel,
    cfg: &ZeroTestConfig,
) -> Result<(FibrationPresentation, GromovData), UniquenessError> {
    let crit = zero_radius(a, b)?;
    let (r_in, r_out) = presentation_bands(crit, tube.r_max)?;
    let r = Expr::coord("r");
    let inner = |kappa: f64| Some(Expr::rational(a, b) + Expr::float(kappa) * r.powi(2));
    let u = best_bridge(a, b, inner, r_in, r_out)?;
    let big_b = -u.clone();
    let beta = tube
        .dtheta()
        .scale(&(Expr::int(a) + Expr::int(b) * &big_b))
        .add(&tube.alpha_std.scale(&big_b));
    let reeb_field = tube
        .r_s()
        .sub(&tube.r_std().scale(&Expr::int(b)))
        .scale(&Expr::rational(1, a));
    let none = Env::new();
    let reeb = reeb_symbolic_verify(&beta, &reeb_field, &none, cfg)?;
    let band_dom = tube.chart.domain().restrict("r", r_out, tube.r_max)?;
    let outer = beta
        .sub(&tube.lambda_ab(&Expr::int(a), &Expr::int(b)))
        .is_zero_on(&band_dom, &none, cfg)?;
    if !reeb.is_zero || !outer.is_zero {
        return Err(UniquenessError::Certificate(format!(
            "connection form: Reeb residual {:e}, outer residual {:e}",
            reeb.worst_residual, outer.worst_residual
        )));
    }
    let h = Expr::int(b) - Expr::int(a) / &u;
    let presentation = FibrationPresentation {
        construction: Construction::Gromov,
        a,
        b,
        fiber: FiberDescriptor {
            sphere_dim: 2 * tube.n - 1,
            lens_order: a.abs(),
        },
        hamiltonian: RadialHamiltonian {
            h,
            vanishing_order: 2,
            equivariance: Some(a.abs()),
        },
        tube: tube.clone(),
        outer_band: (r_out, tube.r_max),
    };
    Ok((
        presentation,
        GromovData {
            connection: beta.to_text(),
            reeb,
            outer,
        },
    ))
}

/// Surgery presentation `H dθ + α_std` of the blow-up with twist `b`.
pub fn surgery_presentation(
    b: i64,
    tube: &TubeModel,
    cfg: &ZeroTestConfig,
) -> Result<FibrationPresentation, UniquenessError> {
    let (r_in, r_out) = presentation_bands(zero_radius(1, b)?, tube.r_max)?;
    let model = build_surgery_blowup_with(b, tube, r_in, r_out, cfg)?;
    Ok(FibrationPresentation {
        construction: Construction::Surgery,
        a: 1,
        b,
        fiber: FiberDescriptor {
            sphere_dim: 2 * tube.n - 1,
            lens_order: 1,
        },
        hamiltonian: RadialHamiltonian {
            h: model.profile.h,
            vanishing_order: 2,
            equivariance: Some(1),
        },
        tube: tube.clone(),
        outer_band: (r_out, tube.r_max),
    })
}

/// Outer-band agreement of a presentation with `(−r²)[(b − ar⁻²)dθ + α_std]`.
pub fn lambda_consistency(
    p: &FibrationPresentation,
    cfg: &ZeroTestConfig,
) -> Result<ConformalReport, UniquenessError> {
    let lam: DiffForm = p.tube.lambda_ab(&Expr::int(p.a), &Expr::int(p.b));
    let band = p
        .tube
        .chart
        .domain()
        .restrict("r", p.outer_band.0, p.outer_band.1)?;
    Ok(conformal_check(&p.form(), &lam, &band, &Env::new(), cfg)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationSummary {
    pub construction: Construction,
    pub fiber: FiberDescriptor,
    #[serde(serialize_with = "crate::serde_expr")]
    pub hamiltonian: Expr,
    pub radial: RadialCertificate,
    pub lambda_consistency: ConformalReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass { min_margin: f64 },
    Fail { reason: String },
    NotApplicable,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictCell {
    pub pair: (Construction, Construction),
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictMatrix {
    pub a: i64,
    pub b: i64,
    pub n: usize,
    pub presentations: Vec<PresentationSummary>,
    pub cells: Vec<VerdictCell>,
}

impl VerdictMatrix {
    pub fn cell(&self, x: Construction, y: Construction) -> Option<&Verdict> {
        self.cells
            .iter()
            .find(|c| c.pair == (x, y) || c.pair == (y, x))
            .map(|c| &c.verdict)
    }

    /// True when no applicable cell failed.
    pub fn all_pass(&self) -> bool {
        self.cells
            .iter()
            .all(|c| !matches!(c.verdict, Verdict::Fail { .. }))
    }
}

/// Outer radius of the comparison chart.
pub const COMPARE_RADIUS: f64 = 2.0;

/// One presentation on `tube`. Surgery applies only to `a = 1`.
pub fn build_presentation(
    construction: Construction,
    a: i64,
    b: i64,
    tube: &TubeModel,
    cfg: &ZeroTestConfig,
) -> Result<FibrationPresentation, UniquenessError> {
    match construction {
        Construction::Surgery if a == 1 => surgery_presentation(b, tube, cfg),
        Construction::Surgery => Err(UniquenessError::NotApplicable { construction, a, b }),
        Construction::Gromov => Ok(gromov_presentation(a, b, tube, cfg)?.0),
        Construction::Cut => {
            let cut = make_cut(&make_action(a, b, tube, cfg)?, cfg)?;
            cut.presentation
                .ok_or(UniquenessError::NotApplicable { construction, a, b })
        }
    }
}

/// Builds the applicable presentations for weights `(a, b)` on the
/// `(2n+1)`-dimensional tube of radius 2 and connects each pair by a
/// certified convex path.
pub fn compare_constructions(
    a: i64,
    b: i64,
    n: usize,
    cfg: &ZeroTestConfig,
) -> Result<VerdictMatrix, UniquenessError> {
    let tube = make_tube_with(n, CORE_GUARD, COMPARE_RADIUS, cfg)?;
    let mut presentations: Vec<FibrationPresentation> = Vec::new();
    for c in [
        Construction::Surgery,
        Construction::Gromov,
        Construction::Cut,
    ] {
        match build_presentation(c, a, b, &tube, cfg) {
            Ok(p) => presentations.push(p),
            Err(UniquenessError::NotApplicable { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let mut summaries = Vec::new();
    for p in &presentations {
        let radial = check_radial(p, cfg)?;
        let lambda_consistency = lambda_consistency(p, cfg)?;
        if !(lambda_consistency.proportional && lambda_consistency.single_signed) {
            return Err(UniquenessError::Certificate(format!(
                "{} presentation does not match λ on the outer band",
                p.construction
            )));
        }
        summaries.push(PresentationSummary {
            construction: p.construction,
            fiber: p.fiber,
            hamiltonian: p.hamiltonian.h.clone(),
            radial,
            lambda_consistency,
        });
    }

    let find = |c: Construction| presentations.iter().find(|p| p.construction == c);
    let pairs = [
        (Construction::Surgery, Construction::Gromov),
        (Construction::Surgery, Construction::Cut),
        (Construction::Gromov, Construction::Cut),
    ];
    let cells = pairs
        .iter()
        .map(|&(x, y)| {
            let verdict = match (find(x), find(y)) {
                (Some(p), Some(q)) => match convex_path(p, q, p.outer_band, cfg) {
                    Ok(path) => Verdict::Pass {
                        min_margin: path.min_margin,
                    },
                    Err(e) => Verdict::Fail {
                        reason: e.to_string(),
                    },
                },
                _ => Verdict::NotApplicable,
            };
            VerdictCell {
                pair: (x, y),
                verdict,
            }
        })
        .collect();
    Ok(VerdictMatrix {
        a,
        b,
        n,
        presentations: summaries,
        cells,
    })
}

#[cfg(test)]
mod tests;
