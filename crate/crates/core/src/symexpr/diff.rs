use super::expr::{Expr, Node};

impl Expr {
    /// Exact partial derivative with respect to the coordinate `coord`.
    ///
    /// Piecewise nodes differentiate piece by piece (the derivative is
    /// valid away from the break points).
    pub fn differentiate(&self, coord: &str) -> Expr {
        if !self.depends_on(coord) {
            return Expr::zero();
        }
        match self.node() {
            Node::Rational(_) | Node::Float(_) | Node::Param(_) => Expr::zero(),
            Node::Coord(c) => {
                if c == coord {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(terms) => Expr::sum(terms.iter().map(|t| t.differentiate(coord))),
            Node::Product(factors) => {
                let mut terms = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.differentiate(coord);
                    if df.is_zero_literal() {
                        continue;
                    }
                    let rest =
                        factors
                            .iter()
                            .enumerate()
                            .map(|(j, g)| if i == j { df.clone() } else { g.clone() });
                    terms.push(Expr::product(rest));
                }
                Expr::sum(terms)
            }
            Node::Pow(base, e) => {
                let coeff = Expr::raw(Node::Rational(e.ratio()));
                coeff * base.pow(e.minus_one()) * base.differentiate(coord)
            }
            Node::Neg(u) => -u.differentiate(coord),
            Node::Sin(u) => u.cos() * u.differentiate(coord),
            Node::Cos(u) => -(u.sin() * u.differentiate(coord)),
            Node::Sqrt(u) => Expr::rational(1, 2) * u.differentiate(coord) * self.recip(),
            Node::Piecewise {
                selector,
                breaks,
                pieces,
            } => Expr::piecewise(
                selector.clone(),
                breaks.clone(),
                pieces.iter().map(|p| p.differentiate(coord)).collect(),
            )
            .expect("shape preserved"),
        }
    }
}
