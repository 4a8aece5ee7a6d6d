use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use super::ExprError;

/// Exponent of a power node. Denominators are restricted to 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Rational64);

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent(Rational64::from_integer(n))
    }

    /// `n / 2`.
    pub fn half(n: i64) -> Self {
        Exponent(Rational64::new(n, 2))
    }

    pub fn new(numer: i64, denom: i64) -> Result<Self, ExprError> {
        if denom == 0 {
            return Err(ExprError::BadExponent(format!("{numer}/{denom}")));
        }
        let q = Rational64::new(numer, denom);
        if *q.denom() == 1 || *q.denom() == 2 {
            Ok(Exponent(q))
        } else {
            Err(ExprError::BadExponent(format!("{numer}/{denom}")))
        }
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub(crate) fn minus_one(self) -> Self {
        Exponent(self.0 - Rational64::one())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Node of an expression tree. Construct through [`Expr`]'s smart
/// constructors; the raw variants are public for pattern matching.
#[derive(Debug, PartialEq)]
pub enum Node {
    Rational(Rational64),
    Float(f64),
    Coord(String),
    Param(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, Exponent),
    Neg(Expr),
    Sin(Expr),
    Cos(Expr),
    Sqrt(Expr),
    /// `pieces[i]` applies when `breaks[i-1] <= selector < breaks[i]`.
    Piecewise {
        selector: Expr,
        breaks: Vec<f64>,
        pieces: Vec<Expr>,
    },
}

/// Immutable symbolic scalar over named coordinates and parameters.
///
/// Cloning is cheap (shared tree). Constructors fold constants and drop
/// neutral elements but never attempt general simplification: equality
/// of two expressions is decided by sampling (see [`super::is_zero`]).
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::to_text(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::to_text(self))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::float(x)
    }
}

impl Expr {
    pub(crate) fn raw(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::raw(Node::Rational(Rational64::from_integer(n)))
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        Expr::raw(Node::Rational(Rational64::new(numer, denom)))
    }

    pub fn float(x: f64) -> Self {
        Expr::raw(Node::Float(x))
    }

    pub fn coord(name: impl Into<String>) -> Self {
        Expr::raw(Node::Coord(name.into()))
    }

    pub fn param(name: impl Into<String>) -> Self {
        Expr::raw(Node::Param(name.into()))
    }

    /// `2π` as a float literal.
    pub fn two_pi() -> Self {
        Expr::float(std::f64::consts::TAU)
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.node() {
            Node::Rational(q) => Some(*q.numer() as f64 / *q.denom() as f64),
            Node::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        match self.node() {
            Node::Rational(q) => q.is_zero(),
            Node::Float(x) => *x == 0.0,
            _ => false,
        }
    }

    pub fn is_one_literal(&self) -> bool {
        match self.node() {
            Node::Rational(q) => q.is_one(),
            Node::Float(x) => *x == 1.0,
            _ => false,
        }
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Self {
        let mut acc = Const::Exact(Rational64::zero());
        let mut rest = Vec::new();
        for t in terms {
            match t.node() {
                Node::Sum(inner) => {
                    for u in inner {
                        push_sum_term(u.clone(), &mut acc, &mut rest);
                    }
                }
                _ => push_sum_term(t, &mut acc, &mut rest),
            }
        }
        if !acc.is_zero() {
            rest.insert(0, acc.into_expr());
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::raw(Node::Sum(rest)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Self {
        let mut acc = Const::Exact(Rational64::one());
        let mut rest = Vec::new();
        for f in factors {
            match f.node() {
                Node::Product(inner) => {
                    for u in inner {
                        acc = push_product_factor(u.clone(), acc, &mut rest);
                    }
                }
                _ => acc = push_product_factor(f, acc, &mut rest),
            }
            if acc.is_zero() {
                return Expr::zero();
            }
        }
        if rest.is_empty() {
            return acc.into_expr();
        }
        if acc.is_minus_one() && rest.len() == 1 {
            return Expr::raw(Node::Neg(rest.pop().unwrap()));
        }
        if !acc.is_one() {
            rest.insert(0, acc.into_expr());
        }
        match rest.len() {
            1 => rest.pop().unwrap(),
            _ => Expr::raw(Node::Product(rest)),
        }
    }

    pub fn pow(&self, e: Exponent) -> Self {
        if e.ratio().is_zero() {
            return Expr::one();
        }
        if e.ratio().is_one() {
            return self.clone();
        }
        match self.node() {
            Node::Rational(q) if e.is_integer() => {
                if let Some(v) = checked_rational_pow(*q, *e.ratio().numer()) {
                    return Expr::raw(Node::Rational(v));
                }
            }
            Node::Float(x) => return Expr::float(x.powf(e.to_f64())),
            Node::Pow(base, inner) if e.is_integer() && inner.is_integer() => {
                let combined = inner.ratio() * e.ratio();
                return base.pow(Exponent(combined));
            }
            _ => {}
        }
        Expr::raw(Node::Pow(self.clone(), e))
    }

    pub fn powi(&self, n: i64) -> Self {
        self.pow(Exponent::int(n))
    }

    pub fn recip(&self) -> Self {
        self.powi(-1)
    }

    pub fn sqrt(&self) -> Self {
        match self.node() {
            Node::Rational(q) if q.is_zero() || q.is_one() => self.clone(),
            Node::Float(x) => Expr::float(x.sqrt()),
            _ => Expr::raw(Node::Sqrt(self.clone())),
        }
    }

    pub fn sin(&self) -> Self {
        match self.node() {
            _ if self.is_zero_literal() => Expr::zero(),
            Node::Float(x) => Expr::float(x.sin()),
            _ => Expr::raw(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.node() {
            _ if self.is_zero_literal() => Expr::one(),
            Node::Float(x) => Expr::float(x.cos()),
            _ => Expr::raw(Node::Cos(self.clone())),
        }
    }

    /// Piecewise expression on `selector`; `pieces.len()` must equal
    /// `breaks.len() + 1` and `breaks` must be strictly increasing.
    pub fn piecewise(
        selector: Expr,
        breaks: Vec<f64>,
        pieces: Vec<Expr>,
    ) -> Result<Self, ExprError> {
        if pieces.len() != breaks.len() + 1 {
            return Err(ExprError::Piecewise(format!(
                "{} pieces for {} breaks",
                pieces.len(),
                breaks.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(ExprError::Piecewise(
                "breaks must be finite and strictly increasing".into(),
            ));
        }
        if breaks.is_empty() {
            return Ok(pieces.into_iter().next().unwrap());
        }
        if pieces.iter().all(|p| p.is_zero_literal()) {
            return Ok(Expr::zero());
        }
        Ok(Expr::raw(Node::Piecewise {
            selector,
            breaks,
            pieces,
        }))
    }

    /// Polynomial `Σ coeffs[i] · self^i` with float coefficients.
    pub fn polynomial(&self, coeffs: &[f64]) -> Self {
        Expr::sum(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| Expr::float(*c) * self.powi(i as i64)),
        )
    }

    /// Names of coordinate symbols occurring in the tree.
    pub fn coords(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Coord(c) = n {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Names of parameter symbols occurring in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Param(c) = n {
                out.insert(c.clone());
            }
        });
        out
    }

    pub fn depends_on(&self, coord: &str) -> bool {
        match self.node() {
            Node::Rational(_) | Node::Float(_) | Node::Param(_) => false,
            Node::Coord(c) => c == coord,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|e| e.depends_on(coord)),
            Node::Pow(b, _) => b.depends_on(coord),
            Node::Neg(e) | Node::Sin(e) | Node::Cos(e) | Node::Sqrt(e) => e.depends_on(coord),
            Node::Piecewise {
                selector, pieces, ..
            } => selector.depends_on(coord) || pieces.iter().any(|p| p.depends_on(coord)),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn visit(&self, f: &mut impl FnMut(&Node)) {
        f(self.node());
        match self.node() {
            Node::Rational(_) | Node::Float(_) | Node::Coord(_) | Node::Param(_) => {}
            Node::Sum(v) | Node::Product(v) => v.iter().for_each(|e| e.visit(f)),
            Node::Pow(b, _) => b.visit(f),
            Node::Neg(e) | Node::Sin(e) | Node::Cos(e) | Node::Sqrt(e) => e.visit(f),
            Node::Piecewise {
                selector, pieces, ..
            } => {
                selector.visit(f);
                pieces.iter().for_each(|p| p.visit(f));
            }
        }
    }

    /// Replaces coordinate symbols simultaneously.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        self.rebuild(&|n| match n {
            Node::Coord(c) => map(c),
            _ => None,
        })
    }

    /// Replaces a single coordinate.
    pub fn substitute_one(&self, name: &str, by: &Expr) -> Expr {
        self.substitute(&|c| (c == name).then(|| by.clone()))
    }

    /// Replaces parameter symbols simultaneously.
    pub fn substitute_params(&self, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        self.rebuild(&|n| match n {
            Node::Param(c) => map(c),
            _ => None,
        })
    }

    fn rebuild(&self, leaf: &dyn Fn(&Node) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Rational(_) | Node::Float(_) => self.clone(),
            Node::Coord(_) | Node::Param(_) => leaf(self.node()).unwrap_or_else(|| self.clone()),
            Node::Sum(v) => Expr::sum(v.iter().map(|e| e.rebuild(leaf))),
            Node::Product(v) => Expr::product(v.iter().map(|e| e.rebuild(leaf))),
            Node::Pow(b, e) => b.rebuild(leaf).pow(*e),
            Node::Neg(e) => -e.rebuild(leaf),
            Node::Sin(e) => e.rebuild(leaf).sin(),
            Node::Cos(e) => e.rebuild(leaf).cos(),
            Node::Sqrt(e) => e.rebuild(leaf).sqrt(),
            Node::Piecewise {
                selector,
                breaks,
                pieces,
            } => Expr::raw(Node::Piecewise {
                selector: selector.rebuild(leaf),
                breaks: breaks.clone(),
                pieces: pieces.iter().map(|p| p.rebuild(leaf)).collect(),
            }),
        }
    }
}

/// Constant accumulator used while folding sums and products.
#[derive(Clone, Copy)]
enum Const {
    Exact(Rational64),
    Approx(f64),
}

impl Const {
    fn from_expr(e: &Expr) -> Option<Const> {
        match e.node() {
            Node::Rational(q) => Some(Const::Exact(*q)),
            Node::Float(x) => Some(Const::Approx(*x)),
            _ => None,
        }
    }

    fn to_f64(self) -> f64 {
        match self {
            Const::Exact(q) => *q.numer() as f64 / *q.denom() as f64,
            Const::Approx(x) => x,
        }
    }

    fn add(self, o: Const) -> Const {
        match (self, o) {
            (Const::Exact(a), Const::Exact(b)) => match a.checked_add(&b) {
                Some(c) => Const::Exact(c),
                None => Const::Approx(self.to_f64() + o.to_f64()),
            },
            _ => Const::Approx(self.to_f64() + o.to_f64()),
        }
    }

    fn mul(self, o: Const) -> Const {
        match (self, o) {
            (Const::Exact(a), Const::Exact(b)) => match a.checked_mul(&b) {
                Some(c) => Const::Exact(c),
                None => Const::Approx(self.to_f64() * o.to_f64()),
            },
            _ => Const::Approx(self.to_f64() * o.to_f64()),
        }
    }

    fn is_zero(self) -> bool {
        match self {
            Const::Exact(q) => q.is_zero(),
            Const::Approx(x) => x == 0.0,
        }
    }

    fn is_one(self) -> bool {
        match self {
            Const::Exact(q) => q.is_one(),
            Const::Approx(x) => x == 1.0,
        }
    }

    fn is_minus_one(self) -> bool {
        match self {
            Const::Exact(q) => q == -Rational64::one(),
            Const::Approx(x) => x == -1.0,
        }
    }

    fn into_expr(self) -> Expr {
        match self {
            Const::Exact(q) => Expr::raw(Node::Rational(q)),
            Const::Approx(x) => Expr::float(x),
        }
    }
}

fn push_sum_term(t: Expr, acc: &mut Const, rest: &mut Vec<Expr>) {
    match Const::from_expr(&t) {
        Some(c) => *acc = acc.add(c),
        None => rest.push(t),
    }
}

fn push_product_factor(f: Expr, acc: Const, rest: &mut Vec<Expr>) -> Const {
    match Const::from_expr(&f) {
        Some(c) => acc.mul(c),
        None => match f.node() {
            Node::Neg(inner) => {
                rest.push(inner.clone());
                acc.mul(Const::Exact(-Rational64::one()))
            }
            _ => {
                rest.push(f);
                acc
            }
        },
    }
}

fn checked_rational_pow(q: Rational64, n: i64) -> Option<Rational64> {
    if n < 0 && q.is_zero() {
        return None;
    }
    let base = if n < 0 { q.recip() } else { q };
    let mut out = Rational64::one();
    for _ in 0..n.unsigned_abs().min(64) {
        out = out.checked_mul(&base)?;
    }
    if n.unsigned_abs() > 64 {
        return None;
    }
    Some(out)
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Rational(q) => Expr::raw(Node::Rational(-*q)),
            Node::Float(x) => Expr::float(-x),
            Node::Neg(inner) => inner.clone(),
            Node::Product(v) => match Const::from_expr(&v[0]) {
                Some(c) => {
                    let c = c.mul(Const::Exact(-Rational64::one()));
                    Expr::product(std::iter::once(c.into_expr()).chain(v[1..].iter().cloned()))
                }
                None => Expr::raw(Node::Neg(self.clone())),
            },
            _ => Expr::raw(Node::Neg(self.clone())),
        }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                self.$m(rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.clone().$m(rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                self.clone().$m(rhs.clone())
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                self.$m(Expr::int(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                self.clone().$m(Expr::int(rhs))
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                self.$m(Expr::float(rhs))
            }
        }
        impl $tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::int(self).$m(rhs)
            }
        }
        impl $tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::int(self).$m(rhs.clone())
            }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::float(self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, b.recip()]));
