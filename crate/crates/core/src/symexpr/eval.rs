use std::collections::BTreeMap;

use super::expr::{Expr, Node};
use super::ExprError;

/// Numeric assignment of coordinates and parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    pub coords: BTreeMap<String, f64>,
    pub params: BTreeMap<String, f64>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_coord(mut self, name: &str, v: f64) -> Self {
        self.coords.insert(name.to_string(), v);
        self
    }

    pub fn with_param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn set_coord(&mut self, name: &str, v: f64) {
        self.coords.insert(name.to_string(), v);
    }

    pub fn coord(&self, name: &str) -> Option<f64> {
        self.coords.get(name).copied()
    }
}

impl Expr {
    /// Evaluates in IEEE double precision. Domain violations (negative
    /// radicands, division by zero) surface as non-finite values.
    pub fn eval(&self, env: &Env) -> Result<f64, ExprError> {
        Ok(self.eval_scaled(env)?.0)
    }

    /// Value together with a magnitude bound `m`: the size of the largest
    /// quantities that cancel on the way to the value, propagated through
    /// products and powers. Rounding error is of order `ε·m`, so `m` is the
    /// reference scale for relative zero tests.
    pub fn eval_scaled(&self, env: &Env) -> Result<(f64, f64), ExprError> {
        let (v, m) = match self.node() {
            Node::Rational(q) => (*q.numer() as f64 / *q.denom() as f64, 0.0),
            Node::Float(x) => (*x, 0.0),
            Node::Coord(c) => (
                env.coords
                    .get(c)
                    .copied()
                    .ok_or_else(|| ExprError::Unassigned(c.clone()))?,
                0.0,
            ),
            Node::Param(p) => (
                env.params
                    .get(p)
                    .copied()
                    .ok_or_else(|| ExprError::Unassigned(format!("${p}")))?,
                0.0,
            ),
            Node::Sum(terms) => {
                let mut v = 0.0;
                let mut m: f64 = 0.0;
                for t in terms {
                    let (tv, tm) = t.eval_scaled(env)?;
                    v += tv;
                    m = m.max(tm);
                }
                (v, m)
            }
            Node::Product(factors) => {
                // relative conditions add; a zero factor falls back to the
                // product of bounds
                let mut v = 1.0;
                let mut bound = 1.0;
                let mut rel = 0.0;
                for f in factors {
                    let (fv, fm) = f.eval_scaled(env)?;
                    v *= fv;
                    bound *= fm;
                    rel += fm / fv.abs();
                }
                let m = if rel.is_finite() {
                    v.abs() * rel
                } else {
                    bound
                };
                (v, m)
            }
            Node::Pow(b, e) => {
                let (bv, bm) = b.eval_scaled(env)?;
                let v = if e.is_integer() {
                    bv.powi(*e.ratio().numer() as i32)
                } else {
                    bv.powf(e.to_f64())
                };
                let x = e.to_f64();
                let m = if bv != 0.0 {
                    v.abs() * (bm / bv.abs()) * x.abs().max(1.0)
                } else {
                    bm.powf(x)
                };
                (v, m)
            }
            Node::Neg(u) => {
                let (uv, um) = u.eval_scaled(env)?;
                (-uv, um)
            }
            Node::Sin(u) => {
                let (uv, um) = u.eval_scaled(env)?;
                (uv.sin(), um)
            }
            Node::Cos(u) => {
                let (uv, um) = u.eval_scaled(env)?;
                (uv.cos(), um)
            }
            Node::Sqrt(u) => {
                let (uv, um) = u.eval_scaled(env)?;
                (uv.sqrt(), um.sqrt())
            }
            Node::Piecewise {
                selector,
                breaks,
                pieces,
            } => {
                let sv = selector.eval(env)?;
                let idx = breaks.iter().take_while(|b| sv >= **b).count();
                pieces[idx].eval_scaled(env)?
            }
        };
        Ok((v, m.max(v.abs())))
    }
}
