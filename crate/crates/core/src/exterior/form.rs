use std::collections::BTreeMap;
use std::sync::Arc;

use crate::symexpr::{self, DomainBox, Env, Expr, ZeroReport, ZeroTestConfig};

use super::{Chart, FormError, VectorField};

/// Differential form of fixed degree on a chart.
///
/// Terms are keyed by strictly increasing index tuples; a missing key
/// means a zero coefficient.
#[derive(Clone, Debug)]
pub struct DiffForm {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

/// Sign of the permutation sorting `idx`, or `None` when an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DiffForm {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        DiffForm {
            chart: chart.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// 0-form.
    pub fn function(chart: &Arc<Chart>, f: Expr) -> Self {
        DiffForm::from_terms(chart, 0, [(vec![], f)]).expect("0-form")
    }

    /// Basis one-form `dx_i`.
    pub fn dx(chart: &Arc<Chart>, i: usize) -> Self {
        DiffForm::from_terms(chart, 1, [(vec![i], Expr::one())]).expect("index in range")
    }

    pub fn dx_named(chart: &Arc<Chart>, name: &str) -> Result<Self, FormError> {
        let i = chart
            .index_of(name)
            .ok_or_else(|| FormError::UnknownCoordinate(name.to_string()))?;
        Ok(DiffForm::dx(chart, i))
    }

    /// One-form `Σ coeffs[i] dx_i`.
    pub fn one_form(chart: &Arc<Chart>, coeffs: Vec<Expr>) -> Result<Self, FormError> {
        if coeffs.len() != chart.dim() {
            return Err(FormError::Dimension(format!(
                "{} coefficients on a {}-dimensional chart",
                coeffs.len(),
                chart.dim()
            )));
        }
        DiffForm::from_terms(
            chart,
            1,
            coeffs.into_iter().enumerate().map(|(i, c)| (vec![i], c)),
        )
    }

    /// Builds a form from possibly unsorted index tuples; repeated indices
    /// vanish and reordering contributes the permutation sign.
    pub fn from_terms(
        chart: &Arc<Chart>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Result<Self, FormError> {
        let mut form = DiffForm::zero(chart, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(FormError::Dimension(format!(
                    "monomial {idx:?} invalid for degree {degree} on dimension {}",
                    chart.dim()
                )));
            }
            if let Some(sign) = sort_sign(&mut idx) {
                let c = if sign < 0 { -c } else { c };
                form.add_term(idx, c);
            }
        }
        Ok(form)
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Expr) {
        if c.is_zero_literal() {
            return;
        }
        let merged = match self.terms.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero_literal() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.terms
    }

    pub fn coefficient(&self, idx: &[usize]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of `dx_0 ∧ … ∧ dx_{dim-1}`.
    pub fn top_coefficient(&self) -> Expr {
        self.coefficient(&(0..self.chart.dim()).collect::<Vec<_>>())
    }

    /// True when no monomial survives structurally.
    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compatible(&self, other: &DiffForm) {
        assert!(
            self.chart.same_coordinates(&other.chart),
            "forms live on different charts: {:?} vs {:?}",
            self.chart.names(),
            other.chart.names()
        );
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        self.check_compatible(other);
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.map_coefficients(|c| -c)
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Expr) -> DiffForm {
        self.map_coefficients(|c| f * c)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> DiffForm {
        let mut out = DiffForm::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    pub fn substitute_params(&self, map: &dyn Fn(&str) -> Option<Expr>) -> DiffForm {
        self.map_coefficients(|c| c.substitute_params(map))
    }

    /// Exterior product. Degrees above the chart dimension give the zero form.
    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        self.check_compatible(other);
        let degree = self.degree + other.degree;
        let mut out = DiffForm::zero(&self.chart, degree);
        if degree > self.chart.dim() {
            return out;
        }
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut idx: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
                if let Some(sign) = sort_sign(&mut idx) {
                    let c = a * b;
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        out
    }

    /// `self ∧ self ∧ … ` (`k` factors); `k = 0` gives the constant 1.
    pub fn wedge_power(&self, k: usize) -> DiffForm {
        let mut out = DiffForm::function(&self.chart, Expr::one());
        for _ in 0..k {
            out = out.wedge(self);
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> DiffForm {
        let dim = self.chart.dim();
        let mut out = DiffForm::zero(&self.chart, self.degree + 1);
        if self.degree + 1 > dim {
            return out;
        }
        for (idx, c) in &self.terms {
            for j in 0..dim {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.differentiate(self.chart.name(j));
                if dc.is_zero_literal() {
                    continue;
                }
                let before = idx.iter().filter(|&&i| i < j).count();
                let mut new_idx = idx.clone();
                new_idx.insert(before, j);
                out.add_term(new_idx, if before % 2 == 1 { -dc } else { dc });
            }
        }
        out
    }

    /// Interior product `ι_X ω`.
    pub fn interior(&self, x: &VectorField) -> DiffForm {
        assert!(
            self.chart.same_coordinates(x.chart()),
            "vector field on a different chart"
        );
        if self.degree == 0 {
            return DiffForm::zero(&self.chart, 0);
        }
        let mut out = DiffForm::zero(&self.chart, self.degree - 1);
        for (idx, c) in &self.terms {
            for (m, &i) in idx.iter().enumerate() {
                let xi = &x.components()[i];
                if xi.is_zero_literal() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(m);
                let term = c * xi;
                out.add_term(rest, if m % 2 == 1 { -term } else { term });
            }
        }
        out
    }

    /// Scalar `ω(X)` of a one-form.
    pub fn apply(&self, x: &VectorField) -> Expr {
        assert_eq!(self.degree, 1, "apply needs a one-form");
        self.interior(x).coefficient(&[])
    }

    pub fn eval_at(&self, env: &Env) -> Result<BTreeMap<Vec<usize>, f64>, FormError> {
        self.terms
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.eval(env)?)))
            .collect()
    }

    pub fn coefficients(&self) -> Vec<Expr> {
        self.terms.values().cloned().collect()
    }

    /// Sampled test that every coefficient vanishes on the chart's box.
    pub fn is_zero(&self, params: &Env, cfg: &ZeroTestConfig) -> Result<ZeroReport, FormError> {
        self.is_zero_on(self.chart.domain(), params, cfg)
    }

    pub fn is_zero_on(
        &self,
        domain: &DomainBox,
        params: &Env,
        cfg: &ZeroTestConfig,
    ) -> Result<ZeroReport, FormError> {
        Ok(symexpr::is_zero_all(
            &self.coefficients(),
            domain,
            params,
            cfg,
        )?)
    }

    /// Text form: `(form DEG (dx^dy COEF) …)`, keys in index order.
    pub fn to_text(&self) -> String {
        let mut out = format!("(form {}", self.degree);
        for (idx, c) in &self.terms {
            let key = if idx.is_empty() {
                "1".to_string()
            } else {
                idx.iter()
                    .map(|&i| format!("d{}", self.chart.name(i)))
                    .collect::<Vec<_>>()
                    .join("^")
            };
            out.push_str(&format!(" ({key} {})", symexpr::to_text(c)));
        }
        out.push(')');
        out
    }

    pub fn parse(chart: &Arc<Chart>, src: &str) -> Result<DiffForm, FormError> {
        use crate::symexpr::text::{parse_expr, tokenize, Token};
        let bad = |m: &str| FormError::Parse(m.to_string());
        let toks = tokenize(src);
        let mut pos = 0;
        let atom = |pos: usize| match toks.get(pos) {
            Some(Token::Atom(a)) => Some(a.clone()),
            _ => None,
        };
        if toks.first() != Some(&Token::Open) || atom(1).as_deref() != Some("form") {
            return Err(bad("expected `(form`"));
        }
        let degree: usize = atom(2)
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| bad("expected degree"))?;
        pos += 3;
        let mut terms = Vec::new();
        while toks.get(pos) == Some(&Token::Open) {
            let key = atom(pos + 1).ok_or_else(|| bad("expected monomial key"))?;
            pos += 2;
            let idx = if key == "1" {
                vec![]
            } else {
                key.split('^')
                    .map(|k| {
                        k.strip_prefix('d')
                            .and_then(|n| chart.index_of(n))
                            .ok_or_else(|| FormError::UnknownCoordinate(k.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            };
            let c = parse_expr(&toks, &mut pos)?;
            if toks.get(pos) != Some(&Token::Close) {
                return Err(bad("expected `)` after coefficient"));
            }
            pos += 1;
            terms.push((idx, c));
        }
        if toks.get(pos) != Some(&Token::Close) || pos + 1 != toks.len() {
            return Err(bad("expected final `)`"));
        }
        DiffForm::from_terms(chart, degree, terms)
    }
}
