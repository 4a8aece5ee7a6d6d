use std::sync::Arc;

use super::*;
use crate::symexpr::{CoordRange, DomainBox, Env, Expr, ZeroTestConfig};

fn tube() -> Arc<Chart> {
    Chart::new(
        DomainBox::new(vec![
            CoordRange::angle("theta"),
            CoordRange::interval("r", 0.1, 1.9),
            CoordRange::interval("rho", 0.0, std::f64::consts::FRAC_PI_2).singular(true, true),
            CoordRange::angle("phi1"),
            CoordRange::angle("phi2"),
        ])
        .unwrap(),
    )
}

fn alpha_std(c: &Arc<Chart>) -> DiffForm {
    let rho = Expr::coord("rho");
    DiffForm::dx_named(c, "phi1")
        .unwrap()
        .scale(&rho.cos().powi(2))
        .add(
            &DiffForm::dx_named(c, "phi2")
                .unwrap()
                .scale(&rho.sin().powi(2)),
        )
}

fn eta(c: &Arc<Chart>) -> DiffForm {
    let r2 = Expr::coord("r").powi(2);
    DiffForm::dx(c, 0).sub(&alpha_std(c).scale(&r2))
}

fn lambda(c: &Arc<Chart>) -> DiffForm {
    let r2 = Expr::coord("r").powi(2);
    DiffForm::dx(c, 0).scale(&r2).add(&alpha_std(c))
}

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig::default()
}

#[test]
fn wedge_signs() {
    let c = tube();
    let (dth, dr, dp1) = (
        DiffForm::dx(&c, 0),
        DiffForm::dx(&c, 1),
        DiffForm::dx(&c, 3),
    );
    assert!(dth.wedge(&dth).is_trivially_zero());
    let w = dr.wedge(&dth);
    assert_eq!(w.coefficient(&[0, 1]), Expr::int(-1));
    let r2 = Expr::coord("r").powi(2);
    let left = dth.scale(&r2).wedge(&dr.wedge(&dp1));
    let expected = DiffForm::from_terms(&c, 3, [(vec![0, 1, 3], r2.clone())]).unwrap();
    assert!(
        left.sub(&expected)
            .is_zero(&Env::new(), &cfg())
            .unwrap()
            .is_zero
    );
    // dφ₁ ∧ dθ ∧ dr = dθ ∧ dr ∧ dφ₁ (two transpositions)
    let shuffled = dp1.wedge(&dth).wedge(&dr);
    assert_eq!(shuffled.coefficient(&[0, 1, 3]), Expr::one());
    // degree above dimension gives the zero form
    let top = DiffForm::from_terms(&c, 5, [(vec![0, 1, 2, 3, 4], Expr::one())]).unwrap();
    assert!(top.wedge(&dth).is_trivially_zero());
    assert_eq!(top.wedge(&dth).degree(), 6);
}

#[test]
fn exterior_derivative_examples() {
    let c = tube();
    let p = Env::new();
    let d_eta = eta(&c).d();
    let r = Expr::coord("r");
    let expected = DiffForm::dx(&c, 1)
        .wedge(&alpha_std(&c))
        .scale(&(Expr::int(-2) * &r))
        .sub(&alpha_std(&c).d().scale(&r.powi(2)));
    assert!(d_eta.sub(&expected).is_zero(&p, &cfg()).unwrap().is_zero);
    // finite-difference oracle for one coefficient: ∂/∂ρ of −r² cos²ρ at a point
    let coef = d_eta.coefficient(&[2, 3]);
    let env = Env::new().with_coord("r", 0.8).with_coord("rho", 0.6);
    let h = 1e-6;
    let f = |rho: f64| -0.64 * rho.cos().powi(2);
    let fd = (f(0.6 + h) - f(0.6 - h)) / (2.0 * h);
    assert!((coef.eval(&env).unwrap() - fd).abs() < 1e-8);

    assert!(DiffForm::dx(&c, 0)
        .scale(&Expr::float(3.5))
        .d()
        .is_trivially_zero());
    let h_r = r.powi(3) + r.sin();
    let dh = DiffForm::dx(&c, 0).scale(&h_r).d();
    let want = DiffForm::from_terms(&c, 2, [(vec![1, 0], h_r.differentiate("r"))]).unwrap();
    assert!(dh.sub(&want).is_zero(&p, &cfg()).unwrap().is_zero);
}

#[test]
fn d_squared_and_leibniz() {
    let c = tube();
    let p = Env::new().with_param("l", 3.0);
    let l = Expr::param("l");
    let r = Expr::coord("r");
    let xi = DiffForm::dx(&c, 0)
        .scale(&(l - r.powi(-2)))
        .add(&alpha_std(&c));
    let corpus = [eta(&c), lambda(&c), alpha_std(&c), xi];
    for w in &corpus {
        assert!(w.d().d().is_zero(&p, &cfg()).unwrap().is_zero);
    }
    for a in &corpus {
        for b in &corpus {
            let lhs = a.wedge(b).d();
            let rhs = a.d().wedge(b).sub(&a.wedge(&b.d()));
            assert!(lhs.sub(&rhs).is_zero(&p, &cfg()).unwrap().is_zero);
        }
    }
}

#[test]
fn contact_examples() {
    let c = tube();
    let p = Env::new();
    let v = contact_check(&eta(&c), &p, &cfg()).unwrap();
    assert!(v.contact && v.margin > 0.0 && v.sign != 0);
    assert!(contact_check(&lambda(&c), &p, &cfg()).unwrap().contact);
    let dth = contact_check(&DiffForm::dx(&c, 0), &p, &cfg()).unwrap();
    assert!(!dth.contact);
    assert_eq!(dth.margin, 0.0);

    let even = Chart::new(
        DomainBox::new(vec![
            CoordRange::interval("x", 0.0, 1.0),
            CoordRange::interval("y", 0.0, 1.0),
        ])
        .unwrap(),
    );
    assert!(matches!(
        contact_check(&DiffForm::dx(&even, 0), &p, &cfg()),
        Err(FormError::Degree(_))
    ));
}

#[test]
fn reeb_fields() {
    let c = tube();
    let p = Env::new();
    let dth = VectorField::coordinate(&c, "theta").unwrap();
    assert!(
        reeb_symbolic_verify(&eta(&c), &dth, &p, &cfg())
            .unwrap()
            .is_zero
    );
    for env in c.domain().sample_points(16, 3, &p) {
        let sol = reeb_at(&eta(&c), &env).unwrap();
        for (i, x) in sol.vector.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((x - want).abs() < 1e-8, "{:?}", sol.vector);
        }
    }

    let s3 = Chart::new(
        DomainBox::new(vec![
            CoordRange::interval("rho", 0.0, std::f64::consts::FRAC_PI_2).singular(true, true),
            CoordRange::angle("phi1"),
            CoordRange::angle("phi2"),
        ])
        .unwrap(),
    );
    let rstd =
        VectorField::from_named(&s3, &[("phi1", Expr::one()), ("phi2", Expr::one())]).unwrap();
    assert!(
        reeb_symbolic_verify(&alpha_std(&s3), &rstd, &p, &cfg())
            .unwrap()
            .is_zero
    );
    assert!(
        !reeb_symbolic_verify(
            &alpha_std(&s3),
            &VectorField::coordinate(&s3, "phi1").unwrap(),
            &p,
            &cfg()
        )
        .unwrap()
        .is_zero
    );

    // λ has Reeb field ∂θ + (1 − ...) mixtures; numeric and symbolic must agree
    let env = Env::new()
        .with_coord("theta", 0.3)
        .with_coord("r", 0.7)
        .with_coord("rho", 0.9);
    let sol = reeb_at(&lambda(&c), &env).unwrap();
    assert!(sol.residual < 1e-10);
    let num = VectorField::new(&c, sol.vector.iter().map(|&x| Expr::float(x)).collect()).unwrap();
    let point = lambda(&c).apply(&num).eval(&env).unwrap();
    assert!((point - 1.0).abs() < 1e-10);
}

#[test]
fn degenerate_reeb_point() {
    let c = tube();
    let env = Env::new().with_coord("r", 0.5).with_coord("rho", 0.4);
    assert!(matches!(
        reeb_at(&DiffForm::dx(&c, 0), &env),
        Err(FormError::DegeneratePoint { .. })
    ));
}

#[test]
fn pullback_functorial_and_commutes_with_d() {
    let c = tube();
    let p = Env::new();
    let th = Expr::coord("theta");
    let r = Expr::coord("r");
    // twist by θ and a radial rescaling
    let twist = SmoothMap::new(
        &c,
        &c,
        vec![
            th.clone(),
            r.clone(),
            Expr::coord("rho"),
            Expr::coord("phi1") + &th,
            Expr::coord("phi2") + &th,
        ],
        MapKind::Diffeomorphism,
    )
    .unwrap();
    let squeeze = SmoothMap::new(
        &c,
        &c,
        vec![
            th.clone(),
            &r / (Expr::one() + &r * &r).sqrt(),
            Expr::coord("rho"),
            Expr::coord("phi1"),
            Expr::coord("phi2"),
        ],
        MapKind::Diffeomorphism,
    )
    .unwrap();
    let both = twist.compose(&squeeze).unwrap();
    for w in [eta(&c), lambda(&c), alpha_std(&c)] {
        let a = both.pullback(&w).unwrap();
        let b = squeeze.pullback(&twist.pullback(&w).unwrap()).unwrap();
        assert!(a.sub(&b).is_zero(&p, &cfg()).unwrap().is_zero);
        for f in [&twist, &squeeze] {
            let lhs = f.pullback(&w.d()).unwrap();
            let rhs = f.pullback(&w).unwrap().d();
            assert!(lhs.sub(&rhs).is_zero(&p, &cfg()).unwrap().is_zero);
        }
    }
    let id = SmoothMap::identity(&c);
    assert!(
        id.pullback(&eta(&c))
            .unwrap()
            .sub(&eta(&c))
            .is_zero(&p, &cfg())
            .unwrap()
            .is_zero
    );
    assert!(
        twist
            .jacobian_check(c.domain(), &p, &cfg())
            .unwrap()
            .nonsingular
    );

    // φ*(∂θ) for the twist is ∂θ − ∂φ₁ − ∂φ₂
    let y = VectorField::from_named(
        &c,
        &[
            ("theta", Expr::one()),
            ("phi1", Expr::int(-1)),
            ("phi2", Expr::int(-1)),
        ],
    )
    .unwrap();
    let x = VectorField::coordinate(&c, "theta").unwrap();
    assert!(twist.related(&y, &x, &p, &cfg()).unwrap().is_zero);
    let env = Env::new()
        .with_coord("theta", 1.0)
        .with_coord("r", 0.5)
        .with_coord("rho", 0.3)
        .with_coord("phi1", 2.0)
        .with_coord("phi2", 4.0);
    let v = twist.pullback_vector_at(&x, &env).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[3] + 1.0).abs() < 1e-12 && (v[4] + 1.0).abs() < 1e-12);
}

#[test]
fn lie_derivative_of_reeb_invariant_form() {
    let c = tube();
    let rstd =
        VectorField::from_named(&c, &[("phi1", Expr::one()), ("phi2", Expr::one())]).unwrap();
    let l = rstd.lie_derivative(&eta(&c));
    assert!(l.is_zero(&Env::new(), &cfg()).unwrap().is_zero);
}

#[test]
fn map_comparison_wraps_angles() {
    let c = tube();
    let th = Expr::coord("theta");
    let shifted = SmoothMap::new(
        &c,
        &c,
        vec![
            &th + Expr::two_pi(),
            Expr::coord("r"),
            Expr::coord("rho"),
            Expr::coord("phi1"),
            Expr::coord("phi2"),
        ],
        MapKind::Diffeomorphism,
    )
    .unwrap();
    let cmp = shifted
        .compare(&SmoothMap::identity(&c), c.domain(), &Env::new(), &cfg())
        .unwrap();
    assert!(cmp.equal, "{}", cmp.max_residual);
}

#[test]
fn conformal_factor() {
    let c = tube();
    let r2 = Expr::coord("r").powi(2);
    let beta = eta(&c).scale(&(Expr::int(-3) * &r2));
    let rep = conformal_check(&beta, &eta(&c), c.domain(), &Env::new(), &cfg()).unwrap();
    assert!(rep.proportional && rep.single_signed);
    assert!(rep.factor_max < 0.0);
    let rep = conformal_check(&lambda(&c), &eta(&c), c.domain(), &Env::new(), &cfg()).unwrap();
    assert!(!rep.proportional);
}

#[test]
fn form_text_round_trip() {
    let c = tube();
    let w = eta(&c).d().add(
        &DiffForm::dx(&c, 0)
            .wedge(&DiffForm::dx(&c, 4))
            .scale(&Expr::rational(1, 3)),
    );
    let text = w.to_text();
    let back = DiffForm::parse(&c, &text).unwrap();
    assert_eq!(back.to_text(), text);
    assert!(back.sub(&w).is_zero(&Env::new(), &cfg()).unwrap().is_zero);
    let zero = DiffForm::parse(&c, "(form 0 (1 (* 2 r)))").unwrap();
    assert_eq!(
        zero.coefficient(&[])
            .eval(&Env::new().with_coord("r", 2.0))
            .unwrap(),
        4.0
    );
    assert!(DiffForm::parse(&c, "(form 1 (dz 1))").is_err());
}
