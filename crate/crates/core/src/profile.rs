//! Strictly increasing C² bridges between two radial functions.
//!
//! The bridge is built on the derivative: near each end it tapers the
//! linear Taylor model of the end function with a quintic smoothstep and
//! adds a positive bump `c·t³(1−t)³` whose weight fixes the total rise.
//! Positivity of the derivative therefore holds by construction whenever
//! `c > 0`; it is still certified by dense sampling.

use serde::Serialize;
use thiserror::Error;

use crate::symexpr::{Env, Expr, ExprError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("band edges must satisfy 0 < r_in < r_out < R, got {r_in}, {r_out}, {r_max}")]
    BandOrder { r_in: f64, r_out: f64, r_max: f64 },
    #[error("infeasible bridge: {0}")]
    Infeasible(String),
    #[error("derivative {derivative:e} ≤ 0 at r = {at}")]
    NotIncreasing { at: f64, derivative: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Dense polynomial with `f64` coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(vec![]);
        }
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// `x ↦ p(αx + β)`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Poly {
        let lin = Poly(vec![beta, alpha]);
        self.0.iter().rev().fold(Poly(vec![]), |acc, c| {
            acc.mul(&lin).add(&Poly::constant(*c))
        })
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(self.0.iter().enumerate().map(|(i, c)| c / (i + 1) as f64));
        Poly(out)
    }

    pub fn to_expr(&self, x: &Expr) -> Expr {
        x.polynomial(&self.0)
    }
}

fn smoothstep() -> Poly {
    Poly(vec![0.0, 0.0, 0.0, 10.0, -15.0, 6.0])
}

fn bump() -> Poly {
    // t³(1−t)³
    Poly(vec![0.0, 0.0, 0.0, 1.0, -3.0, 3.0, -1.0])
}

/// `∫₀¹ t³(1−t)³ dt`
const BUMP_MASS: f64 = 1.0 / 140.0;

#[derive(Clone, Debug, Serialize)]
pub struct Bridge {
    /// Piecewise in `r`: inner, three bridge pieces, outer.
    #[serde(skip)]
    pub expr: Expr,
    /// Joints in `r`, in increasing order.
    pub joints: Vec<f64>,
    pub delta: f64,
    pub bump_weight: f64,
}

struct EndData {
    value: f64,
    slope: f64,
    curvature: f64,
}

fn end_data(f: &Expr, r: f64, scale: f64, params: &Env) -> Result<EndData, ExprError> {
    let env = Env {
        coords: [("r".to_string(), r)].into(),
        params: params.params.clone(),
    };
    let d1 = f.differentiate("r");
    let d2 = d1.differentiate("r");
    Ok(EndData {
        value: f.eval(&env)?,
        slope: scale * d1.eval(&env)?,
        curvature: scale * scale * d2.eval(&env)?,
    })
}

/// Derivative pieces on `[0, δ]`, `[δ, 1−δ]`, `[1−δ, 1]` for bump weight `c`,
/// each a polynomial in `x = t − anchor` with anchors `0, δ, 1−δ`.
fn derivative_pieces(e0: &EndData, e1: &EndData, delta: f64, c: f64) -> [Poly; 3] {
    let s = smoothstep();
    let b = bump().scale(c);
    let taper_in = Poly::constant(1.0).add(&s.compose_affine(1.0 / delta, 0.0).scale(-1.0));
    let taper_out = s.compose_affine(1.0 / delta, 0.0);
    let l0 = Poly(vec![e0.slope, e0.curvature]);
    let l1 = Poly(vec![e1.slope - delta * e1.curvature, e1.curvature]);
    [
        taper_in.mul(&l0).add(&b),
        b.compose_affine(1.0, delta),
        taper_out.mul(&l1).add(&b.compose_affine(1.0, 1.0 - delta)),
    ]
}

fn anchors(delta: f64) -> [f64; 3] {
    [0.0, delta, 1.0 - delta]
}

/// Antiderivatives of the pieces, glued continuously from `P(0) = h0`.
fn value_pieces(q: &[Poly; 3], h0: f64, delta: f64) -> [Poly; 3] {
    let ints: Vec<Poly> = q.iter().map(Poly::integral).collect();
    let pa = ints[0].add(&Poly::constant(h0));
    let pm = ints[1].add(&Poly::constant(pa.eval(delta)));
    let pc = ints[2].add(&Poly::constant(pm.eval(1.0 - 2.0 * delta)));
    [pa, pm, pc]
}

/// Bridge from `inner` on `r ≤ r_in` to `outer` on `r ≥ r_out`.
///
/// Both functions must be strictly increasing at their band edges and
/// `outer(r_out) > inner(r_in)`.
pub fn monotone_bridge(
    inner: &Expr,
    outer: &Expr,
    r_in: f64,
    r_out: f64,
    params: &Env,
) -> Result<Bridge, ProfileError> {
    if !(r_in < r_out) {
        return Err(ProfileError::Infeasible(format!(
            "r_in = {r_in} ≥ r_out = {r_out}"
        )));
    }
    let width = r_out - r_in;
    let e0 = end_data(inner, r_in, width, params)?;
    let e1 = end_data(outer, r_out, width, params)?;
    if !(e0.slope > 0.0 && e1.slope > 0.0) {
        return Err(ProfileError::Infeasible(format!(
            "end slopes must be positive, got {:e} and {:e}",
            e0.slope / width,
            e1.slope / width
        )));
    }
    let rise = e1.value - e0.value;
    if !(rise > 0.0) {
        return Err(ProfileError::Infeasible(format!(
            "outer value {} does not exceed inner value {}",
            e1.value, e0.value
        )));
    }
    let mut delta: f64 = 0.25;
    if e0.curvature < 0.0 {
        delta = delta.min(0.5 * e0.slope / -e0.curvature);
    }
    if e1.curvature > 0.0 {
        delta = delta.min(0.5 * e1.slope / e1.curvature);
    }
    for _ in 0..40 {
        let flat = value_pieces(&derivative_pieces(&e0, &e1, delta, 0.0), e0.value, delta);
        let c = (e1.value - flat[2].eval(delta)) / BUMP_MASS;
        if c > 0.0 {
            let p = value_pieces(&derivative_pieces(&e0, &e1, delta, c), e0.value, delta);
            let r = Expr::coord("r");
            let local = |a: f64| (&r - Expr::float(r_in + a * width)) / Expr::float(width);
            let joints = vec![r_in, r_in + delta * width, r_out - delta * width, r_out];
            let mut pieces = vec![inner.clone()];
            for (poly, a) in p.iter().zip(anchors(delta)) {
                pieces.push(poly.to_expr(&local(a)));
            }
            pieces.push(outer.clone());
            let expr = Expr::piecewise(r, joints.clone(), pieces)?;
            return Ok(Bridge {
                expr,
                joints,
                delta,
                bump_weight: c,
            });
        }
        delta *= 0.5;
    }
    Err(ProfileError::Infeasible(
        "no positive bump weight found".into(),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotoneCertificate {
    pub samples: usize,
    pub min_derivative: f64,
    pub at: f64,
}

/// Minimum of `dh` over `count` evenly spaced points of `(lo, hi]`.
pub fn sample_min(
    dh: &Expr,
    lo: f64,
    hi: f64,
    count: usize,
    params: &Env,
) -> Result<MonotoneCertificate, ExprError> {
    let mut env = Env {
        coords: Default::default(),
        params: params.params.clone(),
    };
    let mut cert = MonotoneCertificate {
        samples: count,
        min_derivative: f64::INFINITY,
        at: lo,
    };
    for i in 1..=count {
        let r = lo + (hi - lo) * i as f64 / count as f64;
        env.set_coord("r", r);
        let v = dh.eval(&env)?;
        if !(v >= cert.min_derivative) {
            cert.min_derivative = v;
            cert.at = r;
        }
    }
    Ok(cert)
}

/// Step and tolerance used for joint smoothness checks.
pub const JOINT_STEP: f64 = 1e-4;
pub const JOINT_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct JointReport {
    /// Largest one-sided discrepancy of value, slope and second derivative.
    pub max_jump: [f64; 3],
    pub worst_joint: f64,
}

/// One-sided finite-difference comparison of `h`, `h'`, `h''` at each joint.
pub fn joint_jumps(
    h: &Expr,
    joints: &[f64],
    step: f64,
    params: &Env,
) -> Result<JointReport, ExprError> {
    let mut env = Env {
        coords: Default::default(),
        params: params.params.clone(),
    };
    let mut f = move |r: f64| {
        env.set_coord("r", r);
        h.eval(&env)
    };
    let mut rep = JointReport {
        max_jump: [0.0; 3],
        worst_joint: joints.first().copied().unwrap_or(0.0),
    };
    for &x in joints {
        // sides sampled at x ± i·step, i = 0..6; Richardson on steps h and 2h
        let side = |f: &mut dyn FnMut(f64) -> Result<f64, ExprError>,
                    dir: f64|
         -> Result<[f64; 3], ExprError> {
            let v: Vec<f64> = (0..7)
                .map(|i| f(x + dir * step * i as f64))
                .collect::<Result<_, _>>()?;
            let slope =
                |k: usize| dir * (-3.0 * v[0] + 4.0 * v[k] - v[2 * k]) / (2.0 * step * k as f64);
            let curv = |k: usize| {
                (2.0 * v[0] - 5.0 * v[k] + 4.0 * v[2 * k] - v[3 * k])
                    / (step * step * (k * k) as f64)
            };
            Ok([
                v[0],
                (4.0 * slope(1) - slope(2)) / 3.0,
                (4.0 * curv(1) - curv(2)) / 3.0,
            ])
        };
        let l = side(&mut f, -1.0)?;
        let r = side(&mut f, 1.0)?;
        let left_value = f(x - 1e-12 * (1.0 + x.abs()))?;
        let jumps = [
            (left_value - r[0]).abs(),
            (l[1] - r[1]).abs(),
            (l[2] - r[2]).abs(),
        ];
        for k in 0..3 {
            if jumps[k] > rep.max_jump[k] {
                rep.max_jump[k] = jumps[k];
                if k == 2 {
                    rep.worst_joint = x;
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_algebra() {
        let p = Poly(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        let q = p.compose_affine(2.0, -1.0);
        for x in [-1.0, 0.3, 2.0] {
            assert!((q.eval(x) - p.eval(2.0 * x - 1.0)).abs() < 1e-12);
        }
        assert_eq!(p.integral().derivative(), p);
        assert!((bump().integral().eval(1.0) - BUMP_MASS).abs() < 1e-15);
        let s = smoothstep();
        assert_eq!((s.eval(0.0), s.eval(1.0)), (0.0, 1.0));
        assert!(
            s.derivative().eval(1.0).abs() < 1e-12
                && s.derivative().derivative().eval(1.0).abs() < 1e-12
        );
    }

    #[test]
    fn bridge_matches_ends_and_increases() {
        let r = Expr::coord("r");
        for l in 1..=5 {
            let outer = Expr::int(l) - r.powi(-2);
            let b = monotone_bridge(&r.powi(2), &outer, 0.5, 1.5, &Env::new()).unwrap();
            let dh = b.expr.differentiate("r");
            let cert = sample_min(&dh, 0.0, 2.0, 4096, &Env::new()).unwrap();
            assert!(cert.min_derivative > 0.0, "l = {l}: {:?}", cert);
            let j = joint_jumps(&b.expr, &b.joints, JOINT_STEP, &Env::new()).unwrap();
            assert!(
                j.max_jump[0] < 1e-9 && j.max_jump[1] < 1e-5 && j.max_jump[2] < JOINT_TOL,
                "l = {l}: {:?}",
                j
            );
        }
    }

    #[test]
    fn joint_check_detects_kink() {
        let r = Expr::coord("r");
        let kinked =
            Expr::piecewise(r.clone(), vec![1.0], vec![r.clone(), r.powi(2) * 0.5 + 0.5]).unwrap();
        let j = joint_jumps(&kinked, &[1.0], 1e-3, &Env::new()).unwrap();
        assert!(j.max_jump[2] > 0.5);
    }

    #[test]
    fn infeasible_bridges() {
        let r = Expr::coord("r");
        assert!(monotone_bridge(&r.powi(2), &Expr::float(0.1), 0.5, 1.5, &Env::new()).is_err());
        assert!(monotone_bridge(
            &r.powi(2),
            &(Expr::one() - r.powi(-2)),
            1.5,
            0.5,
            &Env::new()
        )
        .is_err());
    }
}
