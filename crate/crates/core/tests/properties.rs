use proptest::prelude::*;
use transverse_blowup::exterior::Chart;
use transverse_blowup::symexpr::{parse, to_text};
use transverse_blowup::{
    CoordRange, DiffForm, DomainBox, Env, Expr, MapKind, SmoothMap, ZeroTestConfig,
};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::coord("x")),
        Just(Expr::coord("y")),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 1i64..=4).prop_map(|(p, q)| Expr::rational(p, q)),
    ]
}

/// Random trees that stay finite on `[−1, 1]²`.
fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 0i64..=3).prop_map(|(a, n)| a.powi(n)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| (Expr::one() + a.powi(2)).sqrt()),
            inner.clone().prop_map(|a| (Expr::int(2) + a.sin()).recip()),
        ]
    })
}

fn point() -> impl Strategy<Value = Env> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Env::new().with_coord("x", x).with_coord("y", y))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn plane3() -> std::sync::Arc<Chart> {
    Chart::new(
        DomainBox::new(vec![
            CoordRange::interval("x", -1.0, 1.0),
            CoordRange::interval("y", -1.0, 1.0),
            CoordRange::interval("z", -1.0, 1.0),
        ])
        .unwrap(),
    )
}

fn with_z(e: Expr) -> Expr {
    e.substitute(&|n| (n == "y").then(|| Expr::coord("y") + Expr::coord("z")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn derivative_matches_finite_difference(e in expr(), p in point()) {
        let h = 1e-3;
        for name in ["x", "y"] {
            let x = p.coord(name).unwrap();
            let at = |dx: f64| {
                let mut q = p.clone();
                q.set_coord(name, x + dx);
                e.eval(&q).unwrap()
            };
            let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
            let sym = e.differentiate(name).eval(&p).unwrap();
            prop_assert!(close(sym, fd, 1e-6), "{name}: {sym} vs {fd} for {e}");
        }
    }

    #[test]
    fn substitution_composes(e in expr(), g in expr(), p in point()) {
        let direct = e.substitute_one("x", &g).eval(&p).unwrap();
        let mut q = p.clone();
        q.set_coord("x", g.eval(&p).unwrap());
        prop_assert!(close(direct, e.eval(&q).unwrap(), 1e-12));
    }

    #[test]
    fn text_round_trip(e in expr()) {
        let text = to_text(&e);
        let back = parse(&text).unwrap();
        prop_assert_eq!(to_text(&back), text);
        prop_assert_eq!(back, e);
    }

    #[test]
    fn derivative_is_linear(a in expr(), b in expr(), p in point()) {
        let lhs = (a.clone() + b.clone()).differentiate("x").eval(&p).unwrap();
        let rhs = a.differentiate("x").eval(&p).unwrap() + b.differentiate("x").eval(&p).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn forms_satisfy_calculus_identities(f in expr(), g in expr(), h in expr(), k in expr()) {
        let chart = plane3();
        let cfg = ZeroTestConfig::default().with_samples(32);
        let none = Env::new();
        let alpha = DiffForm::one_form(&chart, vec![with_z(f.clone()), with_z(g.clone()), with_z(h.clone())]).unwrap();
        let beta = DiffForm::one_form(&chart, vec![with_z(g), with_z(h), with_z(f.clone())]).unwrap();
        prop_assert!(alpha.d().d().is_zero(&none, &cfg).unwrap().is_zero);
        prop_assert!(alpha.wedge(&alpha).is_zero(&none, &cfg).unwrap().is_zero);
        let swapped = alpha.wedge(&beta).add(&beta.wedge(&alpha));
        prop_assert!(swapped.is_zero(&none, &cfg).unwrap().is_zero);
        let leibniz = alpha.wedge(&beta).d().sub(&alpha.d().wedge(&beta).sub(&alpha.wedge(&beta.d())));
        prop_assert!(leibniz.is_zero(&none, &cfg).unwrap().is_zero);

        let map = SmoothMap::new(
            &chart,
            &chart,
            vec![with_z(k.clone()), Expr::coord("y") + Expr::coord("x").powi(2), with_z(f)],
            MapKind::General,
        ).unwrap();
        let commute = map.pullback(&alpha.d()).unwrap().sub(&map.pullback(&alpha).unwrap().d());
        prop_assert!(commute.is_zero(&none, &cfg).unwrap().is_zero);
    }
}
