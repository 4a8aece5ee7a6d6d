use std::sync::Arc;

use crate::exterior::{Chart, MapKind, SmoothMap};
use crate::symexpr::{CoordRange, DomainBox, Expr};

use super::ModelError;

/// The two affine charts of `𝒪(−1) → ℂ²`, written in real coordinates.
///
/// `U₀ = {(w, t)}` with `σ₀(w, t) = (t, tw)`; `U₁ = {(w', t')}` with
/// `σ₁(w', t') = (t'w', t')`. On the overlap `w' = 1/w`, `t' = tw`.
#[derive(Clone, Debug)]
pub struct BlowupChartPair {
    pub u0: Arc<Chart>,
    pub u1: Arc<Chart>,
    pub plane: Arc<Chart>,
    /// `U₀ → U₁` on the overlap.
    pub transition: SmoothMap,
    /// `U₁ → U₀` on the overlap.
    pub transition_back: SmoothMap,
    pub sigma0: SmoothMap,
    pub sigma1: SmoothMap,
    /// Part of `U₀` inside the overlap, away from `w = 0`.
    pub overlap: DomainBox,
    /// Part of `U₀` with `|t| ≥ 0.02`, where `σ₀` is a local diffeomorphism.
    pub off_exceptional: DomainBox,
}

fn cmul(a: (&Expr, &Expr), b: (&Expr, &Expr)) -> (Expr, Expr) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cinv(a: (&Expr, &Expr)) -> (Expr, Expr) {
    let n = a.0.powi(2) + a.1.powi(2);
    (a.0 / &n, -(a.1 / &n))
}

fn chart4(names: [&str; 4], lo: f64, hi: f64) -> Result<Arc<Chart>, ModelError> {
    let ranges = names
        .iter()
        .map(|n| CoordRange::interval(n, lo, hi))
        .collect();
    Ok(Chart::new(DomainBox::new(ranges)?))
}

pub fn linear_blowup_charts() -> Result<BlowupChartPair, ModelError> {
    let u0 = chart4(["wx", "wy", "tx", "ty"], -2.0, 2.0)?;
    let u1 = chart4(["vx", "vy", "sx", "sy"], -2.0, 2.0)?;
    let plane = chart4(["x1", "y1", "x2", "y2"], -4.0, 4.0)?;
    let c = |n: &str| Expr::coord(n);
    let (wx, wy, tx, ty) = (c("wx"), c("wy"), c("tx"), c("ty"));
    let (vx, vy, sx, sy) = (c("vx"), c("vy"), c("sx"), c("sy"));

    let (ix, iy) = cinv((&wx, &wy));
    let (px, py) = cmul((&tx, &ty), (&wx, &wy));
    let transition = SmoothMap::new(
        &u0,
        &u1,
        vec![ix, iy, px.clone(), py.clone()],
        MapKind::Diffeomorphism,
    )?;
    let (jx, jy) = cinv((&vx, &vy));
    let (qx, qy) = cmul((&sx, &sy), (&vx, &vy));
    let transition_back = SmoothMap::new(
        &u1,
        &u0,
        vec![jx, jy, qx.clone(), qy.clone()],
        MapKind::Diffeomorphism,
    )?;

    let sigma0 = SmoothMap::new(
        &u0,
        &plane,
        vec![tx.clone(), ty.clone(), px, py],
        MapKind::General,
    )?;
    let sigma1 = SmoothMap::new(&u1, &plane, vec![qx, qy, sx, sy], MapKind::General)?;

    let overlap = u0.domain().restrict("wx", 0.2, 2.0)?;
    let off_exceptional = u0
        .domain()
        .restrict("tx", 0.02, 1.0)?
        .restrict("ty", -1.0, 1.0)?;
    Ok(BlowupChartPair {
        u0,
        u1,
        plane,
        transition,
        transition_back,
        sigma0,
        sigma1,
        overlap,
        off_exceptional,
    })
}
