use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::exterior::{contact_check, Chart, DiffForm, VectorField};
use crate::symexpr::{CoordRange, DomainBox, Env, Expr, ZeroTestConfig};

use super::ModelError;

/// `S¹ × (r_min, r_max) × S^{2n−1}` in angle coordinates.
///
/// For `n = 2` the chart is `(theta, r, rho, phi1, phi2)` with
/// `α_std = cos²ρ dφ₁ + sin²ρ dφ₂`; for `n = 1` it is `(theta, r, phi)`
/// with `α_std = dφ`.
#[derive(Clone, Debug)]
pub struct TubeModel {
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub chart: Arc<Chart>,
    pub alpha_std: DiffForm,
    /// `dθ − r²α_std`
    pub eta: DiffForm,
    /// `r²dθ + α_std`
    pub lambda: DiffForm,
}

pub fn make_tube(n: usize, r_min: f64, r_max: f64) -> Result<TubeModel, ModelError> {
    make_tube_with(n, r_min, r_max, &ZeroTestConfig::default())
}

pub fn make_tube_with(
    n: usize,
    r_min: f64,
    r_max: f64,
    cfg: &ZeroTestConfig,
) -> Result<TubeModel, ModelError> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(ModelError::BadInterval(r_min, r_max));
    }
    let mut ranges = vec![
        CoordRange::angle("theta"),
        CoordRange::interval("r", r_min, r_max),
    ];
    let rho = Expr::coord("rho");
    match n {
        1 => ranges.push(CoordRange::angle("phi")),
        2 => ranges.extend([
            CoordRange::interval("rho", 0.0, FRAC_PI_2).singular(true, true),
            CoordRange::angle("phi1"),
            CoordRange::angle("phi2"),
        ]),
        _ => return Err(ModelError::UnsupportedFiber(n)),
    }
    let chart = Chart::new(DomainBox::new(ranges)?);
    let alpha_std = if n == 1 {
        DiffForm::dx_named(&chart, "phi")?
    } else {
        DiffForm::dx_named(&chart, "phi1")?
            .scale(&rho.cos().powi(2))
            .add(&DiffForm::dx_named(&chart, "phi2")?.scale(&rho.sin().powi(2)))
    };
    let r2 = Expr::coord("r").powi(2);
    let dtheta = DiffForm::dx(&chart, 0);
    let eta = dtheta.sub(&alpha_std.scale(&r2));
    let lambda = dtheta.scale(&r2).add(&alpha_std);
    let tube = TubeModel {
        n,
        r_min,
        r_max,
        chart,
        alpha_std,
        eta,
        lambda,
    };
    for (name, form) in [("eta", &tube.eta), ("lambda", &tube.lambda)] {
        let v = contact_check(form, &Env::new(), cfg)?;
        if !v.contact {
            return Err(ModelError::NotContact(format!(
                "{name}: margin {:e}",
                v.margin
            )));
        }
    }
    Ok(tube)
}

impl TubeModel {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Names of the fiber angle coordinates.
    pub fn fiber_angles(&self) -> &'static [&'static str] {
        if self.n == 1 {
            &["phi"]
        } else {
            &["phi1", "phi2"]
        }
    }

    pub fn r(&self) -> Expr {
        Expr::coord("r")
    }

    pub fn dtheta(&self) -> DiffForm {
        DiffForm::dx(&self.chart, 0)
    }

    /// `H dθ + α_std`.
    pub fn radial_form(&self, h: &Expr) -> DiffForm {
        self.dtheta().scale(h).add(&self.alpha_std)
    }

    /// Representative `(l − r⁻²)dθ + α_std` of ξ_l.
    pub fn xi_l(&self, l: &Expr) -> DiffForm {
        self.radial_form(&(l - self.r().powi(-2)))
    }

    /// `(−r²)[(b − a r⁻²)dθ + α_std]`; `a = 1, b = l` gives λ̄.
    pub fn lambda_ab(&self, a: &Expr, b: &Expr) -> DiffForm {
        let r = self.r();
        self.radial_form(&(b - a * r.powi(-2))).scale(&-r.powi(2))
    }

    pub fn lambda_bar(&self, l: &Expr) -> DiffForm {
        self.lambda_ab(&Expr::one(), l)
    }

    /// Reeb field of `α_std`, as a field on the tube.
    pub fn r_std(&self) -> VectorField {
        let parts: Vec<(&str, Expr)> = self
            .fiber_angles()
            .iter()
            .map(|&n| (n, Expr::one()))
            .collect();
        VectorField::from_named(&self.chart, &parts).expect("fiber angles on chart")
    }

    /// Reeb field `∂θ` of the base circle.
    pub fn r_s(&self) -> VectorField {
        VectorField::coordinate(&self.chart, "theta").expect("theta on chart")
    }

    /// The same tube with a narrower radial interval.
    pub fn restrict_r(&self, lo: f64, hi: f64) -> Result<Arc<Chart>, ModelError> {
        Ok(self.chart.restrict("r", lo, hi)?)
    }
}
