use std::collections::BTreeMap;

use serde::Serialize;

use crate::exterior::{contact_check_on, ContactVerdict, DiffForm};
use crate::models::TubeModel;
use crate::symexpr::{is_zero, DomainBox, Env, Expr, ZeroReport, ZeroTestConfig};

use super::UniquenessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Surgery,
    Gromov,
    Cut,
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Construction::Surgery => "surgery",
            Construction::Gromov => "gromov",
            Construction::Cut => "cut",
        })
    }
}

/// Fiber `S^{2n−1}` with `α_std`, possibly carrying a `ℤ_a` action whose
/// quotient is the lens space `L(a; 1, …, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberDescriptor {
    pub sphere_dim: usize,
    pub lens_order: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialHamiltonian {
    #[serde(serialize_with = "crate::serde_expr")]
    pub h: Expr,
    /// Declared vanishing order at `r = 0`.
    pub vanishing_order: u32,
    /// Order `a` of the diagonal cyclic action preserving `H`, if any.
    pub equivariance: Option<i64>,
}

/// `α_F + H dθ` on the tube chart.
#[derive(Clone, Debug)]
pub struct FibrationPresentation {
    pub construction: Construction,
    pub a: i64,
    pub b: i64,
    pub fiber: FiberDescriptor,
    pub hamiltonian: RadialHamiltonian,
    pub tube: TubeModel,
    /// Band `[r_out, R]` where `H = b − a r⁻²`.
    pub outer_band: (f64, f64),
}

impl FibrationPresentation {
    pub fn form(&self) -> DiffForm {
        self.tube.radial_form(&self.hamiltonian.h)
    }

    pub fn with_hamiltonian(&self, h: Expr) -> FibrationPresentation {
        let mut out = self.clone();
        out.hamiltonian.h = h;
        out
    }
}

/// Radius below which the contact inequality is not sampled.
pub const RADIAL_FLOOR: f64 = 0.05;
/// Radial grid size for the contact inequality.
pub const RADIAL_GRID: usize = 1024;

#[derive(Clone, Debug, Serialize)]
pub struct VanishingCheck {
    pub value_at_zero: f64,
    pub slope_at_zero: f64,
    /// `H(ε)/ε²` at `ε = 1e−3, 1e−4`.
    pub quotient: [f64; 2],
    /// `H'(ε)/ε` at the same radii.
    pub slope_quotient: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialCertificate {
    pub vanishing: VanishingCheck,
    /// Minimum of `∂H/∂r` over `[RADIAL_FLOOR, R]`.
    pub margin: f64,
    pub margin_at: BTreeMap<String, f64>,
    pub contact: ContactVerdict,
    pub equivariance: Option<ZeroReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialFailure {
    pub inequality: String,
    pub value: f64,
    pub witness: BTreeMap<String, f64>,
}

impl std::fmt::Display for RadialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} violated (value {:e}) at {:?}",
            self.inequality, self.value, self.witness
        )
    }
}

fn fail(inequality: &str, value: f64, witness: &Env) -> UniquenessError {
    UniquenessError::Radial(RadialFailure {
        inequality: inequality.to_string(),
        value,
        witness: witness.coords.clone(),
    })
}

fn radial_domain(p: &FibrationPresentation) -> Result<DomainBox, UniquenessError> {
    let hi = p.tube.r_max;
    Ok(p.tube
        .chart
        .domain()
        .restrict("r", RADIAL_FLOOR.min(hi), hi)?)
}

/// Certifies `H = O(r²)`, `∂H/∂r > 0` away from the core, contactness of
/// `α_F + H dθ`, and invariance under the diagonal rotation when declared.
pub fn check_radial(
    p: &FibrationPresentation,
    cfg: &ZeroTestConfig,
) -> Result<RadialCertificate, UniquenessError> {
    let h = &p.hamiltonian.h;
    let dh = h.differentiate("r");
    let dom = radial_domain(p)?;
    let none = Env::new();
    let base = dom.grid_along("r", 1, &none).remove(0);
    let at = |r: f64| {
        let mut e = base.clone();
        e.set_coord("r", r);
        e
    };

    let zero = at(0.0);
    let (value_at_zero, slope_at_zero) = (h.eval(&zero)?, dh.eval(&zero)?);
    let small = cfg.tol.sqrt();
    if !(value_at_zero.abs() <= small) {
        return Err(fail("H(0) = 0", value_at_zero, &zero));
    }
    if !(slope_at_zero.abs() <= small) {
        return Err(fail("∂H/∂r(0) = 0", slope_at_zero, &zero));
    }
    let mut quotient = [0.0; 2];
    let mut slope_quotient = [0.0; 2];
    for (i, eps) in [1e-3, 1e-4].into_iter().enumerate() {
        let e = at(eps);
        quotient[i] = h.eval(&e)? / (eps * eps);
        slope_quotient[i] = dh.eval(&e)? / eps;
    }
    let settled = |q: [f64; 2]| {
        q.iter().all(|x| x.is_finite()) && (q[0] - q[1]).abs() <= 1e-3 * (1.0 + q[1].abs())
    };
    if !settled(quotient) || !settled(slope_quotient) {
        return Err(fail("H = O(r²)", quotient[1], &at(1e-4)));
    }

    let mut margin = f64::INFINITY;
    let mut margin_at = Env::new();
    let points = dom
        .grid_along("r", RADIAL_GRID, &none)
        .into_iter()
        .chain(dom.sample_points(cfg.samples, cfg.seed, &none));
    for e in points {
        let v = dh.eval(&e)?;
        if !(v >= margin) {
            margin = v;
            margin_at = e;
        }
    }
    if !(margin > 0.0) {
        return Err(fail("∂H/∂r > 0", margin, &margin_at));
    }

    let contact = contact_check_on(&p.form(), &dom, &none, cfg)?;
    if !contact.contact {
        return Err(UniquenessError::Radial(RadialFailure {
            inequality: "α_F + H dθ contact".into(),
            value: contact.margin,
            witness: contact.witness.clone(),
        }));
    }

    let equivariance = match p.hamiltonian.equivariance {
        Some(a) if a > 1 => {
            let shift = Expr::two_pi() * Expr::rational(1, a);
            let angles: Vec<&str> = std::iter::once("theta")
                .chain(p.tube.fiber_angles().iter().copied())
                .collect();
            let rotated = h.substitute(&|n| angles.contains(&n).then(|| Expr::coord(n) + &shift));
            let rep = is_zero(&(rotated - h), &dom, &none, cfg)?;
            if !rep.is_zero {
                return Err(UniquenessError::Radial(RadialFailure {
                    inequality: format!("H invariant under ℤ_{a}"),
                    value: rep.worst_residual,
                    witness: rep.witness.clone(),
                }));
            }
            Some(rep)
        }
        _ => None,
    };

    Ok(RadialCertificate {
        vanishing: VanishingCheck {
            value_at_zero,
            slope_at_zero,
            quotient,
            slope_quotient,
        },
        margin,
        margin_at: margin_at.coords,
        contact,
        equivariance,
    })
}
