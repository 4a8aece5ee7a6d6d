//! Symbolic scalar expressions over named chart coordinates.
//!
//! Expressions support exact differentiation, simultaneous substitution,
//! double-precision evaluation and a seeded statistical zero test. There
//! is deliberately no canonical form: identities are checked by
//! evaluating the difference at sampled points of a [`DomainBox`].

mod diff;
mod domain;
mod eval;
mod expr;
pub mod text;
mod zero;

use thiserror::Error;

pub use domain::{CoordKind, CoordRange, DomainBox, SINGULAR_GUARD};
pub use eval::Env;
pub use expr::{Exponent, Expr, Node};
pub use text::{parse, to_text};
pub use zero::{
    is_zero, is_zero_all, ZeroReport, ZeroTestConfig, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unassigned symbol `{0}`")]
    Unassigned(String),
    #[error("exponent {0} not supported (denominator must be 1 or 2)")]
    BadExponent(String),
    #[error("invalid piecewise expression: {0}")]
    Piecewise(String),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Expr {
        Expr::coord("r")
    }

    fn central_difference(e: &Expr, coord: &str, env: &Env, h: f64) -> f64 {
        let x = env.coord(coord).unwrap();
        let plus = e.eval(&env.clone().with_coord(coord, x + h)).unwrap();
        let minus = e.eval(&env.clone().with_coord(coord, x - h)).unwrap();
        (plus - minus) / (2.0 * h)
    }

    #[test]
    fn derivative_of_square() {
        let d = r().powi(2).differentiate("r");
        let env = Env::new().with_coord("r", 1.7);
        assert!((d.eval(&env).unwrap() - 3.4).abs() < 1e-15);
        assert_eq!(to_text(&d), "(* 2 r)");
    }

    #[test]
    fn derivative_of_shifted_inverse_square() {
        // d/dr (l - r^-2) = 2 r^-3, checked against central differences.
        let e = Expr::param("l") - r().powi(-2);
        let d = e.differentiate("r");
        for x in [0.7, 1.3] {
            let env = Env::new().with_coord("r", x).with_param("l", 1.0);
            let fd = central_difference(&e, "r", &env, 1e-5);
            assert!((d.eval(&env).unwrap() - fd).abs() < 1e-6);
            assert!((d.eval(&env).unwrap() - 2.0 / (x * x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let th = Expr::coord("theta");
        let d = th.sin().differentiate("theta");
        assert_eq!(d, th.cos());
    }

    #[test]
    fn eval_examples() {
        let a = Expr::param("a");
        let b = Expr::param("b");
        let mu = &a - &b * r().powi(2);
        let env = Env::new()
            .with_coord("r", 1.0)
            .with_param("a", 1.0)
            .with_param("b", 1.0);
        assert_eq!(mu.eval(&env).unwrap(), 0.0);

        let k = Expr::param("k");
        let squeezed = r() / (1 + k * r().powi(2)).sqrt();
        let env = Env::new().with_coord("r", 2.0).with_param("k", 6.0);
        assert!((squeezed.eval(&env).unwrap() - 0.4).abs() < 1e-15);

        let ratio = (&b / &a).pow(Exponent::half(1));
        let env = Env::new().with_param("a", 1.0).with_param("b", 4.0);
        assert_eq!(ratio.eval(&env).unwrap(), 2.0);
    }

    #[test]
    fn eval_names_missing_symbol() {
        let e = r() + Expr::param("k");
        let err = e.eval(&Env::new().with_coord("r", 1.0)).unwrap_err();
        assert_eq!(err, ExprError::Unassigned("$k".into()));
        let err = e.eval(&Env::new().with_param("k", 1.0)).unwrap_err();
        assert_eq!(err, ExprError::Unassigned("r".into()));
    }

    #[test]
    fn pythagorean_identity_is_zero() {
        let th = Expr::coord("theta");
        let e = th.sin().powi(2) + th.cos().powi(2) - 1;
        let domain = DomainBox::new(vec![CoordRange::angle("theta")]).unwrap();
        let cfg = ZeroTestConfig {
            samples: 256,
            tol: 1e-9,
            seed: 7,
        };
        assert!(is_zero(&e, &domain, &Env::new(), &cfg).unwrap().is_zero);
    }

    #[test]
    fn non_identity_reports_witness() {
        let e = r().powi(2) - (Expr::param("l") - r().powi(-2));
        let domain = DomainBox::new(vec![CoordRange::interval("r", 0.1, 1.9)]).unwrap();
        let params = Env::new().with_param("l", 1.0);
        let rep = is_zero(&e, &domain, &params, &ZeroTestConfig::default()).unwrap();
        assert!(!rep.is_zero);
        let w = rep.witness["r"];
        assert!((0.1..=1.9).contains(&w));
        // Any single evaluation refutes it: at r = 1 the difference is 1.
        assert_eq!(e.eval(&params.clone().with_coord("r", 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn literal_zero_with_one_sample() {
        let domain = DomainBox::new(vec![CoordRange::interval("r", 0.1, 1.9)]).unwrap();
        let cfg = ZeroTestConfig {
            samples: 1,
            tol: 1e-12,
            seed: 0,
        };
        assert!(
            is_zero(&Expr::zero(), &domain, &Env::new(), &cfg)
                .unwrap()
                .is_zero
        );
    }

    #[test]
    fn zero_test_is_deterministic() {
        let th = Expr::coord("theta");
        let e = th.sin() * r() - 0.3;
        let domain = DomainBox::new(vec![
            CoordRange::angle("theta"),
            CoordRange::interval("r", 0.0, 1.0),
        ])
        .unwrap();
        let cfg = ZeroTestConfig::default().with_seed(11);
        let a = is_zero(&e, &domain, &Env::new(), &cfg).unwrap();
        let b = is_zero(&e, &domain, &Env::new(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn guard_band_keeps_samples_off_singular_ends() {
        let domain = DomainBox::new(vec![
            CoordRange::interval("rho", 0.0, 1.0).singular(true, true)
        ])
        .unwrap();
        for p in domain.sample_points(2000, 3, &Env::new()) {
            let v = p.coord("rho").unwrap();
            assert!((SINGULAR_GUARD..=1.0 - SINGULAR_GUARD).contains(&v));
        }
    }

    #[test]
    fn rejects_unsupported_exponent_and_empty_interval() {
        assert!(Exponent::new(1, 3).is_err());
        assert!(Exponent::new(3, 2).is_ok());
        assert!(DomainBox::new(vec![CoordRange::interval("r", 2.0, 1.0)]).is_err());
        assert!(DomainBox::new(vec![CoordRange::angle("t"), CoordRange::angle("t")]).is_err());
    }

    #[test]
    fn piecewise_selects_and_differentiates_by_piece() {
        let e = Expr::piecewise(r(), vec![1.0], vec![r().powi(2), 2 * r() - 1]).unwrap();
        let d = e.differentiate("r");
        let at = |x: f64| Env::new().with_coord("r", x);
        assert_eq!(e.eval(&at(0.5)).unwrap(), 0.25);
        assert_eq!(e.eval(&at(3.0)).unwrap(), 5.0);
        assert_eq!(d.eval(&at(0.5)).unwrap(), 1.0);
        assert_eq!(d.eval(&at(3.0)).unwrap(), 2.0);
        assert!(Expr::piecewise(r(), vec![1.0, 0.5], vec![r(), r(), r()]).is_err());
    }

    #[test]
    fn text_examples_parse() {
        let e = parse("(+ (* 2 r) (sin theta) (^ r -1/2) $k 1.5 -3/4)").unwrap();
        let env = Env::new()
            .with_coord("r", 4.0)
            .with_coord("theta", 0.0)
            .with_param("k", 2.0);
        assert!((e.eval(&env).unwrap() - (8.0 + 0.0 + 0.5 + 2.0 + 1.5 - 0.75)).abs() < 1e-15);
        assert!(parse("(^ r 1/3)").is_err());
        assert!(parse("(+ r").is_err());
        assert!(parse("(foo r)").is_err());
    }

    #[test]
    fn scale_tracks_cancellation_not_coefficients() {
        let env = Env::new().with_coord("r", 0.6);
        let small = Expr::float(12288.0) * (r() - 0.5).powi(6);
        let (v, m) = small.eval_scaled(&env).unwrap();
        assert!(m < 1e3 * v.abs());
        let big = Expr::coord("x");
        let cancel = (r() + &big) - &big;
        let (v, m) = cancel.eval_scaled(&env.with_coord("x", 1e8)).unwrap();
        assert!((v - 0.6).abs() < 1e-7 && m >= 1e8);
    }
}
