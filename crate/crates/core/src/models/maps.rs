use crate::exterior::{MapKind, SmoothMap};
use crate::symexpr::{Env, Expr};

use super::{ModelError, TubeModel};

fn fiber_shift(tube: &TubeModel, angle_shift: &Expr) -> Vec<Expr> {
    let mut comps = Vec::new();
    if tube.n == 2 {
        comps.push(Expr::coord("rho"));
    }
    for name in tube.fiber_angles() {
        comps.push(Expr::coord(*name) + angle_shift);
    }
    comps
}

/// `(θ, r, z) ↦ (aθ, r, e^{ibθ} z)` in angle coordinates:
/// `φᵢ ↦ φᵢ + bθ`. A diffeomorphism for `|a| = 1`, an `a`-fold cover otherwise.
pub fn phi_ab(a: i64, b: i64, tube: &TubeModel) -> Result<SmoothMap, ModelError> {
    if a == 0 {
        return Err(ModelError::BadParameter(
            "a = 0 collapses the base circle".into(),
        ));
    }
    let th = Expr::coord("theta");
    let mut comps = vec![Expr::int(a) * &th, tube.r()];
    comps.extend(fiber_shift(tube, &(Expr::int(b) * &th)));
    let kind = if a.abs() == 1 {
        MapKind::Diffeomorphism
    } else {
        MapKind::Covering(a.unsigned_abs())
    };
    Ok(SmoothMap::new(&tube.chart, &tube.chart, comps, kind)?)
}

/// Gluing map `φ_l = φ_(1,l)`.
pub fn phi_map(l: i64, tube: &TubeModel) -> SmoothMap {
    phi_ab(1, l, tube).expect("a = 1")
}

/// Deck transformation `j` of `φ_(a,b)`: `θ ↦ θ + 2πj/a`, `φᵢ ↦ φᵢ − 2πbj/a`.
pub fn deck_map(a: i64, b: i64, j: i64, tube: &TubeModel) -> Result<SmoothMap, ModelError> {
    if a == 0 {
        return Err(ModelError::BadParameter("a = 0".into()));
    }
    let turn = Expr::two_pi() * Expr::rational(j, a);
    let mut comps = vec![Expr::coord("theta") + &turn, tube.r()];
    comps.extend(fiber_shift(tube, &(Expr::int(-b) * &turn)));
    Ok(SmoothMap::new(
        &tube.chart,
        &tube.chart,
        comps,
        MapKind::Diffeomorphism,
    )?)
}

/// Image radius `R₀/√(1 + kR₀²)` of the squeeze.
pub fn squeeze_radius(r0: f64, k: i64) -> f64 {
    r0 / (1.0 + k as f64 * r0 * r0).sqrt()
}

/// Least `k ≥ 1` with `squeeze_radius(r0, k) < eps`.
pub fn smallest_squeeze_k(r0: f64, eps: f64) -> Result<i64, ModelError> {
    if !(eps > 0.0 && r0 > 0.0) {
        return Err(ModelError::BadParameter(format!(
            "need r0 > 0 and eps > 0, got {r0}, {eps}"
        )));
    }
    let mut k = 1;
    while squeeze_radius(r0, k) >= eps {
        k += 1;
    }
    Ok(k)
}

fn squeezed_r(k: i64) -> Expr {
    let r = Expr::coord("r");
    &r / (Expr::one() + Expr::int(k) * r.powi(2)).sqrt()
}

/// `ψ_k: (θ, r, ρ, φᵢ) ↦ (θ, r/√(1+kr²), ρ, φᵢ + kθ)` on `r ≤ r0`.
pub fn psi_squeeze(k: i64, r0: f64, tube: &TubeModel) -> Result<SmoothMap, ModelError> {
    if k < 1 {
        return Err(ModelError::BadParameter(format!(
            "squeeze needs k ≥ 1, got {k}"
        )));
    }
    if !(r0 > tube.r_min && r0 <= tube.r_max) {
        return Err(ModelError::BadParameter(format!(
            "radius {r0} outside tube ({}, {}]",
            tube.r_min, tube.r_max
        )));
    }
    let source = tube.restrict_r(tube.r_min, r0)?;
    let th = Expr::coord("theta");
    let mut comps = vec![th.clone(), squeezed_r(k)];
    comps.extend(fiber_shift(tube, &(Expr::int(k) * &th)));
    Ok(SmoothMap::new(
        &source,
        &tube.chart,
        comps,
        MapKind::Diffeomorphism,
    )?)
}

/// Radial rescaling `(θ, r, z) ↦ (θ, r/√(1+kr²), z)` without twist.
pub fn radial_squeeze(k: i64, tube: &TubeModel) -> Result<SmoothMap, ModelError> {
    if k < 0 {
        return Err(ModelError::BadParameter(format!("negative k = {k}")));
    }
    let mut comps = vec![Expr::coord("theta"), squeezed_r(k)];
    comps.extend(fiber_shift(tube, &Expr::zero()));
    Ok(SmoothMap::new(
        &tube.chart,
        &tube.chart,
        comps,
        MapKind::Diffeomorphism,
    )?)
}

/// Point of `S¹ × ℂⁿ ⊂ ℝ² × ℝ^{2n}` with the given tube coordinates:
/// `(cos θ, sin θ, r z)`, `z` on the unit sphere.
pub fn cartesian_point(n: usize, coords: &Env) -> Vec<f64> {
    let g = |name: &str| coords.coord(name).unwrap_or(0.0);
    let (th, r) = (g("theta"), g("r"));
    let mut out = vec![th.cos(), th.sin()];
    if n == 1 {
        let p = g("phi");
        out.extend([r * p.cos(), r * p.sin()]);
    } else {
        let (rho, p1, p2) = (g("rho"), g("phi1"), g("phi2"));
        out.extend([
            r * rho.cos() * p1.cos(),
            r * rho.cos() * p1.sin(),
            r * rho.sin() * p2.cos(),
            r * rho.sin() * p2.sin(),
        ]);
    }
    out
}

/// Euclidean distance between `p` and `f(p)` after the Cartesian embedding.
pub fn displacement(f: &SmoothMap, n: usize, p: &Env) -> Result<f64, ModelError> {
    let image_vals = f.eval_at(p)?;
    let mut image = Env::new();
    for (i, v) in image_vals.into_iter().enumerate() {
        image.set_coord(f.target().name(i), v);
    }
    let (a, b) = (cartesian_point(n, p), cartesian_point(n, &image));
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt())
}
